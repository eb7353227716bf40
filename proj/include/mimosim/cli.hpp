// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/bench.hpp"
#include "mimosim/calibration.hpp"
#include "mimosim/link_sim.hpp"
#include "mimosim/propagation.hpp"
#include "mimosim/reference_channel.hpp"

#include <CLI11.hpp>

#include <bit>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifndef MIMOSIM_DATA_DIR
#define MIMOSIM_DATA_DIR "data"
#endif

namespace mimosim {

inline std::filesystem::path default_scenario_file() { return std::filesystem::path(MIMOSIM_DATA_DIR) / "scenarios.toml"; }

/// Substream for calibration samples; the carrier frequency is part of the path
/// so runs at different frequencies draw independent samples.
inline std::uint64_t sample_seed(std::uint64_t master, Scenario s, LinkCondition c, double fc_ghz)
{
    return derive_seed(master, {stream::samples, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(c),
                                std::bit_cast<std::uint64_t>(fc_ghz)});
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write " + path.string());
    }
    return out;
}

inline std::filesystem::path sibling(const std::filesystem::path& path, const std::string& suffix)
{
    auto p = path;
    p.replace_filename(path.stem().string() + suffix + path.extension().string());
    return p;
}

struct CommonFlags {
    std::string scenario = "UMi";
    std::string condition;
    double fc_ghz = 28.0;
    std::uint64_t seed = 1;
    std::string config;
    std::string scenario_file;
    unsigned workers = 0;
};

inline ReferenceChannelConfig reference_config_for(const CommonFlags& f, Scenario s)
{
    if (f.config.empty()) {
        return ReferenceChannelConfig::for_scenario(s);
    }
    return DropConfig::load(f.config).reference;
}

inline ScenarioTable scenario_table_for(const CommonFlags& f)
{
    return ScenarioTable::load(f.scenario_file.empty() ? default_scenario_file() : std::filesystem::path(f.scenario_file));
}

}  // namespace detail

/**
 * mimosim {calibrate | simulate | bench | sample} [flags]
 *
 * Exit status 0 on success, 2 on usage errors, 1 on any other failure; a
 * one-line diagnostic goes to err.
 */
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"MIMO channel models: FTR calibration, drop simulation and benchmarks", "mimosim"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    detail::CommonFlags common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", common.scenario, "UMi, UMa, RMa, InH-OfficeMixed or InH-OfficeOpen");
        sub->add_option("--fc", common.fc_ghz, "carrier frequency in GHz");
        sub->add_option("--seed", common.seed, "master seed");
        sub->add_option("--scenario-file", common.scenario_file, "large-scale parameter file (TOML)");
        sub->add_option("--workers", common.workers, "worker threads, 0 = all cores");
    };

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "fit FTR parameters and write the calibration table");
    add_common(calibrate);
    std::size_t count = 100000;
    std::string grid_path;
    std::string samples_path;
    std::string out_path;
    calibrate->add_option("--condition", common.condition, "LoS or NLoS (default: both)");
    calibrate->add_option("--count", count, "reference samples per (scenario, condition)");
    calibrate->add_option("--grid", grid_path, "parameter grid file (TOML)");
    calibrate->add_option("--samples", samples_path, "fit these samples (CSV, gain_linear) instead of generating them");
    calibrate->add_option("--config", common.config, "drop config whose [reference] section drives sample generation");
    calibrate->add_option("--out", out_path, "calibration table (CSV)")->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run drops and write SINR records and their ECDF");
    add_common(simulate);
    std::string model;
    std::string table_path;
    std::string ecdf_path;
    std::optional<std::size_t> drops;
    std::optional<std::uint64_t> sim_seed;
    simulate->add_option("--config", common.config, "drop config (TOML)")->required();
    simulate->add_option("--model", model, "reference or ftr-fast (default: from config)");
    simulate->add_option("--table", table_path, "calibration table, required for ftr-fast");
    simulate->add_option("--count,--drops", drops, "number of drops (default: from config)");
    simulate->add_option("--out", out_path, "SINR records (CSV)")->required();
    simulate->add_option("--ecdf", ecdf_path, "SINR ECDF (CSV), default <out>_ecdf.csv");

    // bench
    auto* bench = app.add_subcommand("bench", "time naive vs cached assembly and reference vs ftr-fast drops");
    add_common(bench);
    BenchConfig bench_cfg;
    std::string raw_path;
    bench->add_option("--reps", bench_cfg.reps, "timed repetitions per size (>= 30)");
    bench->add_option("--sizes", bench_cfg.antenna_counts, "gNB antenna counts");
    bench->add_option("--ue-counts", bench_cfg.ue_counts, "UE counts for the drop sweep");
    bench->add_option("--links", bench_cfg.links_per_rep, "channel realizations per assembly repetition");
    bench->add_option("--out", out_path, "timing summary (CSV)")->required();
    bench->add_option("--raw", raw_path, "per-repetition timings (CSV), default <out>_raw.csv");

    // sample
    auto* sample = app.add_subcommand("sample", "emit small-scale fading samples");
    add_common(sample);
    std::string sample_model = "reference";
    sample->add_option("--model", sample_model, "reference or ftr");
    sample->add_option("--condition", common.condition, "LoS or NLoS")->required();
    sample->add_option("--count", count, "number of samples");
    sample->add_option("--table", table_path, "calibration table, required for ftr");
    sample->add_option("--config", common.config, "drop config whose [reference] section drives the reference model");
    sample->add_option("--out", out_path, "output CSV (default: stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();  // program name
    }
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for usage\n";
        return 2;
    }

    try {
        const Scenario scenario = parse_scenario(common.scenario);

        if (calibrate->parsed()) {
            const auto grid = grid_path.empty() ? ParameterGrid::default_grid() : ParameterGrid::load(grid_path);
            std::vector<LinkCondition> conditions;
            if (!common.condition.empty()) {
                conditions.push_back(parse_condition(common.condition));
            } else if (!samples_path.empty()) {
                err << "usage error: --samples needs --condition\n";
                return 2;
            } else {
                conditions = {LinkCondition::los, LinkCondition::nlos};
            }
            const auto ref = detail::reference_config_for(common, scenario);
            std::vector<FadingSampleSet> sets;
            for (auto c : conditions) {
                FadingSampleSet set;
                set.scenario = scenario;
                set.condition = c;
                set.fc_ghz = common.fc_ghz;
                if (!samples_path.empty()) {
                    set.samples = load_samples_csv(samples_path);
                } else {
                    RngStream rng(sample_seed(common.seed, scenario, c, common.fc_ghz));
                    set.samples = reference_fading_samples(ref, c, count, rng, common.workers);
                }
                sets.push_back(std::move(set));
            }
            FitOptions options;
            options.workers = common.workers;
            const auto table = build_calibration_table(sets, grid, options);
            auto os = detail::open_output(out_path);
            table.write_csv(os);
            return 0;
        }

        if (simulate->parsed()) {
            auto cfg = DropConfig::load(common.config);
            if (!model.empty()) {
                cfg.model = parse_model(model);
            }
            if (drops) {
                cfg.drops = *drops;
            }
            if (simulate->count("--seed") > 0) {
                cfg.seed = common.seed;
            }
            if (simulate->count("--fc") > 0) {
                cfg.fc_ghz = common.fc_ghz;
            }
            if (simulate->count("--scenario") > 0) {
                cfg.scenario = scenario;
            }
            const auto scenarios = detail::scenario_table_for(common);
            std::optional<CalibrationTable> table;
            if (cfg.model == ChannelModel::ftr_fast) {
                if (table_path.empty()) {
                    err << "usage error: --model ftr-fast needs --table\n";
                    return 2;
                }
                table = CalibrationTable::load(table_path);
            }
            const SimulationInputs in{&scenarios, table ? &*table : nullptr, Kernel::optimized};
            const auto records = run_drops(cfg, in, common.workers);
            {
                auto os = detail::open_output(out_path);
                write_sinr_csv(os, records);
            }
            auto os = detail::open_output(ecdf_path.empty() ? detail::sibling(out_path, "_ecdf") : std::filesystem::path(ecdf_path));
            write_ecdf_csv(os, sinr_ecdf(records), "sinr_db");
            return 0;
        }

        if (bench->parsed()) {
            bench_cfg.seed = common.seed;
            bench_cfg.scenario = scenario;
            const auto scenarios = detail::scenario_table_for(common);
            const auto reports = bench_models(bench_cfg, scenarios);
            {
                auto os = detail::open_output(out_path);
                write_timing_summary_csv(os, reports);
            }
            auto os = detail::open_output(raw_path.empty() ? detail::sibling(out_path, "_raw") : std::filesystem::path(raw_path));
            write_timing_raw_csv(os, reports);
            return 0;
        }

        if (sample->parsed()) {
            const auto condition = parse_condition(common.condition);
            if (count == 0) {
                err << "usage error: --count must be at least 1\n";
                return 2;
            }
            std::vector<double> samples;
            RngStream rng(sample_seed(common.seed, scenario, condition, common.fc_ghz));
            const auto m = parse_model(sample_model);
            if (m == ChannelModel::ftr_fast) {
                if (table_path.empty()) {
                    err << "usage error: --model ftr needs --table\n";
                    return 2;
                }
                const auto table = CalibrationTable::load(table_path);
                const auto& p = lookup_ftr_params(table, scenario, condition);
                samples.resize(count);
                for (auto& v : samples) {
                    v = sample_ftr_power(p, rng);
                }
            } else {
                samples = reference_fading_samples(detail::reference_config_for(common, scenario), condition, count, rng,
                                                   common.workers);
            }
            if (out_path.empty() || out_path == "-") {
                write_samples_csv(out, samples);
            } else {
                auto os = detail::open_output(out_path);
                write_samples_csv(os, samples);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return cli_dispatch(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace mimosim

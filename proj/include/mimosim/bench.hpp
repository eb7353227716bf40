// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/antenna.hpp"
#include "mimosim/calibration.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/link_sim.hpp"
#include "mimosim/reference_channel.hpp"
#include "mimosim/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace mimosim {

inline double median(std::vector<double> v)
{
    if (v.empty()) {
        throw DomainError("median of an empty sequence");
    }
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) {
        return hi;
    }
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

/// Timings of one workload pair at one size.
struct TimingPoint {
    std::size_t size = 0;
    std::vector<double> baseline_seconds;
    std::vector<double> candidate_seconds;

    [[nodiscard]] double baseline_median() const { return median(baseline_seconds); }
    [[nodiscard]] double candidate_median() const { return median(candidate_seconds); }
    [[nodiscard]] double ratio() const { return candidate_median() / baseline_median(); }
};

/// Candidate-over-baseline median ratios of one workload across sizes.
struct TimingReport {
    std::string label;
    std::vector<TimingPoint> points;

    [[nodiscard]] std::vector<std::size_t> sizes() const
    {
        std::vector<std::size_t> out;
        for (const auto& p : points) {
            out.push_back(p.size);
        }
        return out;
    }
    [[nodiscard]] std::vector<double> ratios() const
    {
        std::vector<double> out;
        for (const auto& p : points) {
            out.push_back(p.ratio());
        }
        return out;
    }
};

inline double time_once(const std::function<void()>& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Alternates baseline and candidate runs so drift affects both; warm-up runs are discarded.
inline TimingPoint time_pair(std::size_t size, const std::function<void()>& baseline, const std::function<void()>& candidate,
                             int reps, int warmup = 3)
{
    if (reps < 30) {
        throw ConfigError("benchmark needs at least 30 repetitions, got " + std::to_string(reps));
    }
    for (int i = 0; i < warmup; ++i) {
        baseline();
        candidate();
    }
    TimingPoint p;
    p.size = size;
    for (int i = 0; i < reps; ++i) {
        p.baseline_seconds.push_back(time_once(baseline));
        p.candidate_seconds.push_back(time_once(candidate));
    }
    return p;
}

struct BenchConfig {
    std::vector<std::size_t> antenna_counts{4, 16, 64, 256};
    std::vector<std::size_t> ue_counts{};  // optional UE sweep for the drop workload
    int reps = 30;
    int warmup = 3;
    std::size_t links_per_rep = 16;
    std::uint64_t seed = 1;
    Scenario scenario = Scenario::umi;
};

/// Square (or nearly square) UPA with `count` elements.
inline UpaConfig square_upa(std::size_t count)
{
    if (count == 0) {
        throw ConfigError("array size must be positive");
    }
    auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(count))));
    while (side > 1 && count % static_cast<std::size_t>(side) != 0) {
        --side;
    }
    return {static_cast<int>(count / static_cast<std::size_t>(side)), side};
}

/**
 * Channel generation plus beamformed gain for links_per_rep NLoS links
 * between a gNB of the given size and a 2x2 UE: naive assembly with the
 * reference kernel (baseline) versus cached assembly with the optimized
 * kernel (candidate).
 */
inline TimingReport bench_assembly(const BenchConfig& cfg)
{
    TimingReport report{"assembly", {}};
    const UpaConfig ue{2, 2};
    const auto ref = ReferenceChannelConfig::for_scenario(cfg.scenario);
    for (std::size_t size : cfg.antenna_counts) {
        const UpaConfig gnb = square_upa(size);
        const auto w_tx = steering_vector(gnb, Direction{});
        const auto w_rx = steering_vector(ue, Direction{});
        volatile double sink = 0.0;
        auto workload = [&](bool cached, Kernel kernel) {
            return [&, cached, kernel] {
                RngStream rng = RngStream::from_path(cfg.seed, {stream::clusters, size});
                double acc = 0.0;
                for (std::size_t i = 0; i < cfg.links_per_rep; ++i) {
                    const auto cs = generate_cluster_params(ref, LinkCondition::nlos, rng);
                    acc += small_scale_gain(assemble_channel(cs, gnb, ue, cached), w_rx, w_tx, kernel);
                }
                sink = sink + acc;
            };
        };
        report.points.push_back(time_pair(size, workload(false, Kernel::reference), workload(true, Kernel::optimized),
                                          cfg.reps, cfg.warmup));
    }
    return report;
}

/// Small fixed deployment used by the end-to-end timing: three gNBs and ue_count UEs.
inline DropConfig bench_drop_config(std::size_t gnb_antennas, std::size_t ue_count, const BenchConfig& cfg)
{
    DropConfig d;
    d.scenario = cfg.scenario;
    d.reference = ReferenceChannelConfig::for_scenario(cfg.scenario);
    d.fc_ghz = 28.0;
    d.drops = 1;
    d.seed = cfg.seed;
    for (int i = 0; i < 3; ++i) {
        GnbSite g;
        g.position = {150.0 * i, 0.0, 10.0};
        g.bearing = std::numbers::pi / 2;
        g.upa = square_upa(gnb_antennas);
        d.gnbs.push_back(g);
    }
    UeDropArea area;
    area.count = ue_count;
    area.center_x = 150.0;
    area.center_y = 80.0;
    area.radius = 70.0;
    area.upa = UpaConfig{2, 2};
    d.ue_drop = area;
    return d;
}

/// Calibration table with every (scenario, condition) of the benchmark set to a fixed FTR triple.
inline CalibrationTable bench_calibration(Scenario s)
{
    CalibrationTable t;
    t.insert(s, LinkCondition::los, {ftr_from_k_delta(10.0, 8.0, 0.2), 0.0});
    t.insert(s, LinkCondition::nlos, {ftr_from_k_delta(2.0, 0.1, 0.5), 0.0});
    return t;
}

/// End-to-end drop: reference model (baseline) versus ftr-fast (candidate).
inline TimingReport bench_drop(const BenchConfig& cfg, const ScenarioTable& scenarios, bool sweep_ues)
{
    TimingReport report{sweep_ues ? "drop_ue_sweep" : "drop", {}};
    const auto table = bench_calibration(cfg.scenario);
    const SimulationInputs in{&scenarios, &table, Kernel::optimized};
    const auto sizes = sweep_ues ? cfg.ue_counts : cfg.antenna_counts;
    for (std::size_t size : sizes) {
        auto d = sweep_ues ? bench_drop_config(64, size, cfg) : bench_drop_config(size, 10, cfg);
        auto fast = d;
        fast.model = ChannelModel::ftr_fast;
        volatile double sink = 0.0;
        auto run = [&](const DropConfig& c) {
            return [&] {
                double acc = 0.0;
                for (std::size_t k = 0; k < 4; ++k) {
                    for (const auto& r : run_drop(c, in, k)) {
                        acc += r.sinr_db;
                    }
                }
                sink = sink + acc;
            };
        };
        report.points.push_back(time_pair(size, run(d), run(fast), cfg.reps, cfg.warmup));
    }
    return report;
}

inline std::vector<TimingReport> bench_models(const BenchConfig& cfg, const ScenarioTable& scenarios)
{
    std::vector<TimingReport> out{bench_assembly(cfg), bench_drop(cfg, scenarios, false)};
    if (!cfg.ue_counts.empty()) {
        out.push_back(bench_drop(cfg, scenarios, true));
    }
    return out;
}

inline void write_timing_summary_csv(std::ostream& os, const std::vector<TimingReport>& reports)
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "workload,size,baseline_median_s,candidate_median_s,ratio\n";
    for (const auto& r : reports) {
        for (const auto& p : r.points) {
            os << r.label << ',' << p.size << ',' << p.baseline_median() << ',' << p.candidate_median() << ',' << p.ratio()
               << '\n';
        }
    }
}

inline void write_timing_raw_csv(std::ostream& os, const std::vector<TimingReport>& reports)
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "workload,size,variant,rep,seconds\n";
    for (const auto& r : reports) {
        for (const auto& p : r.points) {
            for (std::size_t i = 0; i < p.baseline_seconds.size(); ++i) {
                os << r.label << ',' << p.size << ",baseline," << i << ',' << p.baseline_seconds[i] << '\n';
            }
            for (std::size_t i = 0; i < p.candidate_seconds.size(); ++i) {
                os << r.label << ',' << p.size << ",candidate," << i << ',' << p.candidate_seconds[i] << '\n';
            }
        }
    }
}

}  // namespace mimosim

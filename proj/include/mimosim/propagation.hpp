// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"
#include "mimosim/rng.hpp"
#include "mimosim/types.hpp"

#include <toml.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

namespace mimosim {

/// Per-(scenario, condition) large-scale parameters. Path loss is
/// PL = a log10(d3d) + b + c log10(fc) with d3d in meters and fc in GHz.
struct ScenarioParams {
    Scenario scenario = Scenario::umi;
    LinkCondition condition = LinkCondition::los;
    double a_coef = 0.0;
    double b_coef = 0.0;
    double c_coef = 0.0;
    double sigma_sf = 0.0;
    double o2i_loss = 0.0;
    double eta = 1.0;

    void validate() const
    {
        const std::string key = std::string(to_string(scenario)) + "/" + std::string(to_string(condition));
        if (!(a_coef > 0.0)) {
            throw ConfigError(key + ": a must be positive");
        }
        if (!(sigma_sf >= 0.0)) {
            throw ConfigError(key + ": sigma_sf must be nonnegative");
        }
        if (!(o2i_loss >= 0.0)) {
            throw ConfigError(key + ": o2i must be nonnegative");
        }
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw ConfigError(key + ": eta must lie in (0, 1]");
        }
    }
};

inline constexpr double kMinCarrierGhz = 0.5;
inline constexpr double kMaxCarrierGhz = 100.0;

struct LinkGeometry {
    double d3d = 1.0;    // m
    double d2d = 0.0;    // m
    double fc_ghz = 1.0;

    void validate() const
    {
        if (!(d3d > 0.0)) {
            throw DomainError("link: 3D distance must be positive, got " + std::to_string(d3d));
        }
        if (!(d2d >= 0.0) || d2d > d3d * (1.0 + 1e-12)) {
            throw DomainError("link: need 0 <= d2d <= d3d");
        }
        if (!(fc_ghz >= kMinCarrierGhz && fc_ghz <= kMaxCarrierGhz)) {
            throw DomainError("link: carrier " + std::to_string(fc_ghz) + " GHz outside [0.5, 100]");
        }
    }
};

/// Default LoS probability versus 2D distance for each scenario (UE height 1.5 m).
inline double los_probability(Scenario scenario, double d2d)
{
    if (!(d2d >= 0.0)) {
        throw DomainError("los_probability: negative distance");
    }
    switch (scenario) {
    case Scenario::umi:
        if (d2d <= 18.0) {
            return 1.0;
        }
        return 18.0 / d2d * (1.0 - std::exp(-d2d / 36.0)) + std::exp(-d2d / 36.0);
    case Scenario::uma:
        if (d2d <= 18.0) {
            return 1.0;
        }
        return 18.0 / d2d * (1.0 - std::exp(-d2d / 63.0)) + std::exp(-d2d / 63.0);
    case Scenario::rma:
        return d2d <= 10.0 ? 1.0 : std::exp(-(d2d - 10.0) / 1000.0);
    case Scenario::inh_office_mixed:
        if (d2d <= 1.2) {
            return 1.0;
        }
        if (d2d < 6.5) {
            return std::exp(-(d2d - 1.2) / 4.7);
        }
        return 0.32 * std::exp(-(d2d - 6.5) / 32.6);
    case Scenario::inh_office_open:
        if (d2d <= 5.0) {
            return 1.0;
        }
        if (d2d <= 49.0) {
            return std::exp(-(d2d - 5.0) / 70.8);
        }
        return 0.54 * std::exp(-(d2d - 49.0) / 211.7);
    }
    throw ConfigError("los_probability: unknown scenario");
}

/// Bernoulli LoS draw; p_los_override replaces the scenario formula when set.
inline LinkCondition determine_los(Scenario scenario, double d2d, RngStream& rng, std::optional<double> p_los_override = {})
{
    double p = 0.0;
    if (p_los_override) {
        p = *p_los_override;
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("p_los override must lie in [0, 1]");
        }
    } else {
        p = los_probability(scenario, d2d);
    }
    return rng.uniform() < p ? LinkCondition::los : LinkCondition::nlos;
}

inline LinkCondition determine_los(std::string_view scenario, double d2d, RngStream& rng,
                                   std::optional<double> p_los_override = {})
{
    return determine_los(parse_scenario(scenario), d2d, rng, p_los_override);
}

inline double path_loss_db(const ScenarioParams& params, const LinkGeometry& link)
{
    if (!(link.d3d > 0.0)) {
        throw DomainError("path_loss_db: 3D distance must be positive, got " + std::to_string(link.d3d));
    }
    if (!(link.fc_ghz > 0.0)) {
        throw DomainError("path_loss_db: carrier frequency must be positive");
    }
    return params.a_coef * std::log10(link.d3d) + params.b_coef + params.c_coef * std::log10(link.fc_ghz);
}

/// Zero-mean Gaussian shadowing sample in dB (a gain: positive values raise received power).
inline double shadowing_db(const ScenarioParams& params, RngStream& rng, bool enabled = true)
{
    if (!enabled || params.sigma_sf == 0.0) {
        return 0.0;
    }
    return params.sigma_sf * rng.normal();
}

/// Loss to subtract from transmit power: PL - S + O2I.
inline double large_scale_loss_db(const ScenarioParams& params, const LinkGeometry& link, double shadow_sample_db)
{
    return path_loss_db(params, link) - shadow_sample_db + params.o2i_loss;
}

/// (scenario, condition) -> ScenarioParams, loaded from a TOML data file:
///
///     [UMi.LoS]
///     a = 21.0
///     b = 32.4
///     c = 20.0
///     sigma_sf = 4.0
///     o2i = 0.0      # optional, default 0
///     eta = 1.0      # optional, default 1
class ScenarioTable {
public:
    using Key = std::pair<Scenario, LinkCondition>;

    static ScenarioTable parse(std::string_view text, const std::string& source = "<string>")
    {
        toml::table root;
        try {
            root = toml::parse(text, source);
        } catch (const toml::parse_error& e) {
            throw ConfigError("scenario file " + source + ": " + std::string(e.description()));
        }
        ScenarioTable out;
        for (const auto& [scenario_key, scenario_node] : root) {
            const Scenario scenario = parse_scenario(scenario_key.str());
            const auto* conditions = scenario_node.as_table();
            if (conditions == nullptr) {
                throw ConfigError(source + ": '" + std::string(scenario_key.str()) + "' must be a table");
            }
            for (const auto& [condition_key, record_node] : *conditions) {
                const auto* record = record_node.as_table();
                if (record == nullptr) {
                    throw ConfigError(source + ": record for " + std::string(scenario_key.str()) + "." +
                                      std::string(condition_key.str()) + " must be a table");
                }
                ScenarioParams p;
                p.scenario = scenario;
                p.condition = parse_condition(condition_key.str());
                const std::string where = std::string(scenario_key.str()) + "." + std::string(condition_key.str());
                bool have_a = false;
                bool have_b = false;
                bool have_c = false;
                bool have_sigma = false;
                for (const auto& [field, value] : *record) {
                    const auto number = value.value<double>();
                    if (!number) {
                        throw ConfigError(source + ": " + where + "." + std::string(field.str()) + " must be a number");
                    }
                    const std::string_view name = field.str();
                    if (name == "a") {
                        p.a_coef = *number;
                        have_a = true;
                    } else if (name == "b") {
                        p.b_coef = *number;
                        have_b = true;
                    } else if (name == "c") {
                        p.c_coef = *number;
                        have_c = true;
                    } else if (name == "sigma_sf") {
                        p.sigma_sf = *number;
                        have_sigma = true;
                    } else if (name == "o2i") {
                        p.o2i_loss = *number;
                    } else if (name == "eta") {
                        p.eta = *number;
                    } else {
                        throw ConfigError(source + ": unknown key '" + std::string(name) + "' in " + where);
                    }
                }
                if (!(have_a && have_b && have_c && have_sigma)) {
                    throw ConfigError(source + ": " + where + " needs a, b, c and sigma_sf");
                }
                p.validate();
                out.insert(p);
            }
        }
        return out;
    }

    static ScenarioTable load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open scenario file " + path.string());
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str(), path.string());
    }

    void insert(const ScenarioParams& p)
    {
        if (!entries_.emplace(Key{p.scenario, p.condition}, p).second) {
            throw ConfigError("duplicate scenario record " + std::string(to_string(p.scenario)) + "/" +
                              std::string(to_string(p.condition)));
        }
    }

    [[nodiscard]] const ScenarioParams& get(Scenario s, LinkCondition c) const
    {
        const auto it = entries_.find({s, c});
        if (it == entries_.end()) {
            throw LookupError("no scenario parameters for " + std::string(to_string(s)) + "/" + std::string(to_string(c)));
        }
        return it->second;
    }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<Key, ScenarioParams> entries_;
};

}  // namespace mimosim

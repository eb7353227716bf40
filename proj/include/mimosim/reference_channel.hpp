// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/antenna.hpp"
#include "mimosim/errors.hpp"
#include "mimosim/parallel.hpp"
#include "mimosim/rng.hpp"
#include "mimosim/tensor.hpp"
#include "mimosim/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace mimosim {

/**
 * Knobs of the simplified cluster channel. Clusters carry exponentially
 * decaying powers with log-normal jitter; their angles scatter around the
 * direct-path directions. In LoS the first cluster is the direct ray.
 */
struct ReferenceChannelConfig {
    int n_clusters = 0;  // 0 picks clusters_for(condition)
    double angular_spread_deg = 10.0;
    double k_factor_db = 9.0;
    /// Per-draw Gaussian spread of the K-factor in dB; 0 keeps K fixed.
    double k_factor_spread_db = 0.0;
    double power_decay = 0.2;
    double power_jitter_db = 3.0;
    std::size_t max_elements = std::size_t{1} << 26;

    static ReferenceChannelConfig for_scenario(Scenario s)
    {
        ReferenceChannelConfig cfg;
        cfg.k_factor_db = (s == Scenario::umi || s == Scenario::uma) ? 9.0 : 7.0;
        return cfg;
    }

    [[nodiscard]] int clusters_for(LinkCondition c) const noexcept
    {
        if (n_clusters > 0) {
            return n_clusters;
        }
        return c == LinkCondition::los ? 13 : 20;
    }

    void validate() const
    {
        if (n_clusters < 0) {
            throw ConfigError("reference channel: cluster count must be at least 1, got " + std::to_string(n_clusters));
        }
        if (!(angular_spread_deg >= 0.0) || !(k_factor_spread_db >= 0.0) || !(power_decay >= 0.0) ||
            !(power_jitter_db >= 0.0)) {
            throw ConfigError("reference channel: spreads and decay must be nonnegative");
        }
        if (!std::isfinite(k_factor_db)) {
            throw ConfigError("reference channel: k_factor_db must be finite");
        }
        if (max_elements == 0) {
            throw ConfigError("reference channel: element budget must be positive");
        }
    }

    [[nodiscard]] double k_factor_linear() const noexcept { return std::pow(10.0, k_factor_db / 10.0); }
};

struct ClusterSet {
    std::vector<double> powers;
    std::vector<double> aod;
    std::vector<double> zod;
    std::vector<double> aoa;
    std::vector<double> zoa;
    std::vector<Complex> alpha;
    double k_factor = 0.0;

    [[nodiscard]] std::size_t n_clusters() const noexcept { return powers.size(); }

    void validate() const
    {
        const std::size_t n = powers.size();
        if (n == 0) {
            throw ConfigError("cluster set is empty");
        }
        if (aod.size() != n || zod.size() != n || aoa.size() != n || zoa.size() != n || alpha.size() != n) {
            throw DimensionError("cluster set: per-cluster sequences differ in length");
        }
        double total = 0.0;
        for (double p : powers) {
            if (!(p >= 0.0)) {
                throw DomainError("cluster set: negative power");
            }
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw DomainError("cluster set: powers sum to " + std::to_string(total));
        }
    }
};

/**
 * Draws one cluster realization. departure and arrival are the direct-path
 * directions seen from the transmitter and the receiver; scattered clusters
 * spread around them with angular_spread_deg per angle.
 */
inline ClusterSet generate_cluster_params(const ReferenceChannelConfig& cfg, LinkCondition condition, RngStream& rng,
                                          Direction departure = {}, Direction arrival = {})
{
    cfg.validate();
    const int n = cfg.clusters_for(condition);
    if (n < 1) {
        throw ConfigError("reference channel: cluster count must be at least 1");
    }
    const auto count = static_cast<std::size_t>(n);
    ClusterSet cs;
    cs.powers.resize(count);
    cs.aod.resize(count);
    cs.zod.resize(count);
    cs.aoa.resize(count);
    cs.zoa.resize(count);
    cs.alpha.resize(count);

    const bool los = condition == LinkCondition::los;
    const std::size_t first = los ? 1 : 0;
    if (los) {
        double k_db = cfg.k_factor_db;
        if (cfg.k_factor_spread_db > 0.0) {
            k_db += cfg.k_factor_spread_db * rng.normal();
        }
        cs.k_factor = std::pow(10.0, k_db / 10.0);
        cs.powers[0] = count == 1 ? 1.0 : cs.k_factor / (cs.k_factor + 1.0);
        cs.aod[0] = departure.phi;
        cs.zod[0] = departure.theta;
        cs.aoa[0] = arrival.phi;
        cs.zoa[0] = arrival.theta;
        cs.alpha[0] = Complex(1.0, 0.0);
    }

    std::vector<double> scattered;
    scattered.reserve(count - first);
    for (std::size_t i = first; i < count; ++i) {
        const double jitter = cfg.power_jitter_db > 0.0 ? cfg.power_jitter_db * rng.normal() : 0.0;
        scattered.push_back(std::exp(-cfg.power_decay * static_cast<double>(i - first)) * std::pow(10.0, jitter / 10.0));
    }
    std::sort(scattered.begin(), scattered.end(), std::greater<>());
    double total = 0.0;
    for (double p : scattered) {
        total += p;
    }
    const double budget = los ? 1.0 - cs.powers[0] : 1.0;

    const double spread = cfg.angular_spread_deg * std::numbers::pi / 180.0;
    for (std::size_t i = first; i < count; ++i) {
        cs.powers[i] = total > 0.0 ? budget * scattered[i - first] / total : 0.0;
        const auto dep = Direction::normalized(departure.theta + spread * rng.normal(), departure.phi + spread * rng.normal());
        const auto arr = Direction::normalized(arrival.theta + spread * rng.normal(), arrival.phi + spread * rng.normal());
        cs.aod[i] = dep.phi;
        cs.zod[i] = dep.theta;
        cs.aoa[i] = arr.phi;
        cs.zoa[i] = arr.theta;
        const double re = rng.normal();
        const double im = rng.normal();
        cs.alpha[i] = Complex(re, im) / std::numbers::sqrt2;
    }
    return cs;
}

/// Instrumentation for assemble_channel: sin/cos of cluster angles, and
/// complex exponentials of element phases.
struct TrigCounters {
    std::size_t angle_evals = 0;
    std::size_t phase_evals = 0;
};

namespace detail {

struct ClusterTrig {
    double cos_zoa, sin_zoa_sin_aoa, cos_zod, sin_zod_sin_aod;
};

inline ClusterTrig cluster_trig(const ClusterSet& cs, std::size_t n, TrigCounters* counters)
{
    if (counters != nullptr) {
        counters->angle_evals += 6;
    }
    return {std::cos(cs.zoa[n]), std::sin(cs.zoa[n]) * std::sin(cs.aoa[n]), std::cos(cs.zod[n]),
            std::sin(cs.zod[n]) * std::sin(cs.aod[n])};
}

}  // namespace detail

/**
 * Per-cluster channel matrices, page n of size U_rx x U_tx:
 *
 *     H_n[u, s] = sqrt(P_n) alpha_n a_rx(aoa_n, zoa_n)[u] a_tx(aod_n, zod_n)[s]
 *
 * The naive path re-evaluates the cluster's angle functions and one complex
 * exponential for every (u, s). The cached path evaluates the angle functions
 * once per cluster and forms each page as an outer product of the two
 * separable array responses.
 */
inline ComplexTensor3 assemble_channel(const ClusterSet& cs, const UpaConfig& tx, const UpaConfig& rx, bool cached,
                                       TrigCounters* counters = nullptr,
                                       std::size_t max_elements = ReferenceChannelConfig{}.max_elements)
{
    cs.validate();
    tx.validate();
    rx.validate();
    const std::size_t u_rx = rx.size();
    const std::size_t u_tx = tx.size();
    const std::size_t n_clusters = cs.n_clusters();
    if (u_rx > max_elements / u_tx || u_rx * u_tx > max_elements / n_clusters) {
        throw DimensionError("assemble_channel: " + std::to_string(u_rx) + "x" + std::to_string(u_tx) + "x" +
                             std::to_string(n_clusters) + " exceeds the element budget of " + std::to_string(max_elements));
    }
    ComplexTensor3 h(u_rx, u_tx, n_clusters);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    if (!cached) {
        for (std::size_t n = 0; n < n_clusters; ++n) {
            const Complex gain = std::sqrt(cs.powers[n]) * cs.alpha[n];
            for (std::size_t u = 0; u < u_rx; ++u) {
                const double mr = static_cast<double>(u / static_cast<std::size_t>(rx.u_h));
                const double nr = static_cast<double>(u % static_cast<std::size_t>(rx.u_h));
                for (std::size_t s = 0; s < u_tx; ++s) {
                    const double mt = static_cast<double>(s / static_cast<std::size_t>(tx.u_h));
                    const double nt = static_cast<double>(s % static_cast<std::size_t>(tx.u_h));
                    const auto t = detail::cluster_trig(cs, n, counters);
                    const double phase = two_pi * (mr * rx.d_v * t.cos_zoa + nr * rx.d_h * t.sin_zoa_sin_aoa +
                                                   mt * tx.d_v * t.cos_zod + nt * tx.d_h * t.sin_zod_sin_aod);
                    if (counters != nullptr) {
                        ++counters->phase_evals;
                    }
                    h(u, s, n) = gain * std::polar(1.0, phase);
                }
            }
        }
        return h;
    }

    std::vector<Complex> a_rx(u_rx);
    std::vector<Complex> a_tx(u_tx);
    for (std::size_t n = 0; n < n_clusters; ++n) {
        const auto t = detail::cluster_trig(cs, n, counters);
        detail::fill_array_response(rx, t.cos_zoa, t.sin_zoa_sin_aoa, a_rx.data());
        detail::fill_array_response(tx, t.cos_zod, t.sin_zod_sin_aod, a_tx.data());
        if (counters != nullptr) {
            counters->phase_evals += static_cast<std::size_t>(rx.u_h + rx.u_v + tx.u_h + tx.u_v);
        }
        const Complex gain = std::sqrt(cs.powers[n]) * cs.alpha[n];
        Complex* page = h.page_data(n);
        for (std::size_t u = 0; u < u_rx; ++u) {
            const Complex left = gain * a_rx[u];
            Complex* row = page + u * u_tx;
            for (std::size_t s = 0; s < u_tx; ++s) {
                row[s] = left * a_tx[s];
            }
        }
    }
    return h;
}

/// |sum_n w_rx^T H_n w_tx|^2
inline double small_scale_gain(const ComplexTensor3& h3, const ComplexVector& w_rx, const ComplexVector& w_tx,
                               Kernel kernel = Kernel::optimized)
{
    const auto per_cluster = tensor_quadratic_form(w_rx, h3, w_tx, kernel);
    Complex sum{};
    for (const auto& v : per_cluster.values()) {
        sum += v;
    }
    return std::norm(sum);
}

/// Linear power-gain samples plus the metadata of the generator that produced them.
struct FadingSampleSet {
    std::vector<double> samples;
    Scenario scenario = Scenario::umi;
    LinkCondition condition = LinkCondition::los;
    double fc_ghz = 0.0;

    void validate(std::size_t min_size = 1) const
    {
        if (samples.size() < min_size) {
            throw DomainError("sample set has " + std::to_string(samples.size()) + " samples, need at least " +
                              std::to_string(min_size));
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!std::isfinite(samples[i]) || samples[i] < 0.0) {
                throw DomainError("sample " + std::to_string(i) + " is not a finite nonnegative gain");
            }
        }
    }
};

inline void write_samples_csv(std::ostream& os, const std::vector<double>& samples)
{
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "gain_linear\n";
    for (double v : samples) {
        os << v << '\n';
    }
}

inline std::vector<double> read_samples_csv(std::istream& is, const std::string& source = "<stream>")
{
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError(source + ": empty sample file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "gain_linear") {
        throw ConfigError(source + ": expected header 'gain_linear', got '" + line + "'");
    }
    std::vector<double> out;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != line.size() || !std::isfinite(v) || v < 0.0) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": not a finite nonnegative gain: '" + line + "'");
        }
        out.push_back(v);
    }
    return out;
}

inline std::vector<double> load_samples_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open sample file " + path.string());
    }
    return read_samples_csv(in, path.string());
}

/**
 * count small-scale power gains of single isotropic antennas, each from a
 * fresh cluster realization. Draw i uses the substream derived from one
 * base seed taken from rng and the index i, so the result does not depend on
 * the worker count.
 */
inline std::vector<double> reference_fading_samples(const ReferenceChannelConfig& cfg, LinkCondition condition,
                                                    std::size_t count, RngStream& rng, unsigned workers = 0)
{
    cfg.validate();
    if (count < 1) {
        throw DomainError("reference_fading_samples: count must be at least 1");
    }
    const std::uint64_t base = rng.next_u64();
    const UpaConfig single{};
    const ComplexVector unit(std::vector<Complex>{Complex(1.0, 0.0)});
    std::vector<double> out(count);
    parallel_for(
        count,
        [&](std::size_t i) {
            RngStream draw(derive_seed(base, {i}));
            const auto cs = generate_cluster_params(cfg, condition, draw);
            out[i] = small_scale_gain(assemble_channel(cs, single, single, true, nullptr, cfg.max_elements), unit, unit);
        },
        workers);
    return out;
}

}  // namespace mimosim

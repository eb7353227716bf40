// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>

namespace mimosim {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based seed derivation.
 *
 * The seed of a substream identified by the path (id_0, ..., id_k) under a
 * master seed is
 *
 *     h_0     = splitmix64(master)
 *     h_{i+1} = splitmix64(h_i ^ splitmix64(id_i + 1))
 *
 * so any substream can be recreated from the master seed and its path alone,
 * independently of how many draws other streams have consumed.
 */
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = splitmix64(master);
    for (auto id : path) {
        h = splitmix64(h ^ splitmix64(id + 1));
    }
    return h;
}

/// Stable integer tags for named substreams.
namespace stream {
inline constexpr std::uint64_t los = 1;
inline constexpr std::uint64_t shadowing = 2;
inline constexpr std::uint64_t fading = 3;
inline constexpr std::uint64_t clusters = 4;
inline constexpr std::uint64_t placement = 5;
inline constexpr std::uint64_t scheduling = 6;
inline constexpr std::uint64_t samples = 7;
}  // namespace stream

/**
 * Deterministic random stream: std::mt19937_64 plus distribution code
 * owned here, so sample sequences do not depend on the standard library's
 * implementation-defined distributions.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Independent child stream; does not advance this stream.
    [[nodiscard]] static RngStream from_path(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        return RngStream(derive_seed(master, path));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n)
    {
        // Reject the top partial block so the modulo is unbiased.
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal, Marsaglia polar method.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape < 1 uses the U^{1/shape} boost.
    double gamma(double shape, double scale = 1.0)
    {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0, 1.0);
            double u = uniform();
            while (u == 0.0) {
                u = uniform();
            }
            return scale * g * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * (x * x) * (x * x)) {
                return scale * d * v;
            }
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
                return scale * d * v;
            }
        }
    }

    /// Uniform phase on [0, 2pi).
    double phase() { return 2.0 * std::numbers::pi * uniform(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mimosim

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"
#include "mimosim/tensor.hpp"
#include "mimosim/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace mimosim {

enum class ElementPattern { isotropic, directional_3gpp };

inline std::string_view to_string(ElementPattern p) noexcept
{
    return p == ElementPattern::isotropic ? "isotropic" : "directional-3gpp";
}

inline ElementPattern parse_pattern(std::string_view s)
{
    if (s == "isotropic") {
        return ElementPattern::isotropic;
    }
    if (s == "directional-3gpp" || s == "3gpp") {
        return ElementPattern::directional_3gpp;
    }
    throw ConfigError("unknown element pattern '" + std::string(s) + "'");
}

/// Uniform planar array in the local y-z plane, boresight along +x.
/// Spacings are in wavelengths.
struct UpaConfig {
    int u_h = 1;
    int u_v = 1;
    double d_h = 0.5;
    double d_v = 0.5;
    ElementPattern pattern = ElementPattern::isotropic;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(u_h) * static_cast<std::size_t>(u_v); }

    void validate() const
    {
        if (u_h < 1 || u_v < 1) {
            throw ConfigError("UPA needs at least one element per axis (u_h=" + std::to_string(u_h) +
                              ", u_v=" + std::to_string(u_v) + ")");
        }
        if (!(d_h > 0.0) || !(d_v > 0.0)) {
            throw ConfigError("UPA spacings must be positive");
        }
    }
};

/// Zenith theta in [0, pi], azimuth phi in (-pi, pi], radians.
struct Direction {
    double theta = std::numbers::pi / 2;
    double phi = 0.0;

    /// Folds arbitrary angles onto the canonical ranges, preserving the pointing direction.
    static Direction normalized(double theta, double phi) noexcept
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        theta = std::fmod(theta, two_pi);
        if (theta < 0.0) {
            theta += two_pi;
        }
        if (theta > std::numbers::pi) {
            theta = two_pi - theta;
            phi += std::numbers::pi;
        }
        return {theta, wrap_angle(phi)};
    }

    /// Wraps to (-pi, pi].
    static double wrap_angle(double a) noexcept
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        a = std::fmod(a, two_pi);
        if (a <= -std::numbers::pi) {
            a += two_pi;
        } else if (a > std::numbers::pi) {
            a -= two_pi;
        }
        return a;
    }
};

inline constexpr double kDirectionalMaxGainDbi = 8.0;
inline constexpr double kDirectionalMaxAttenuationDb = 30.0;
inline constexpr double kDirectionalBeamwidthDeg = 65.0;

/// Single-element linear power gain toward dir.
inline double element_gain(ElementPattern pattern, Direction dir) noexcept
{
    if (pattern == ElementPattern::isotropic) {
        return 1.0;
    }
    const double theta_deg = dir.theta * 180.0 / std::numbers::pi;
    const double phi_deg = dir.phi * 180.0 / std::numbers::pi;
    const double vertical = std::min(12.0 * std::pow((theta_deg - 90.0) / kDirectionalBeamwidthDeg, 2), kDirectionalMaxAttenuationDb);
    const double horizontal = std::min(12.0 * std::pow(phi_deg / kDirectionalBeamwidthDeg, 2), kDirectionalMaxAttenuationDb);
    const double gain_db = kDirectionalMaxGainDbi - std::min(vertical + horizontal, kDirectionalMaxAttenuationDb);
    return std::pow(10.0, gain_db / 10.0);
}

namespace detail {

/// Fills out[m * u_h + n] = exp(j 2pi m d_v cos_theta) * exp(j 2pi n d_h sin_theta_sin_phi).
/// Costs u_v + u_h complex exponentials.
inline void fill_array_response(const UpaConfig& upa, double cos_theta, double sin_theta_sin_phi, Complex* out)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    thread_local std::vector<Complex> horizontal;
    horizontal.resize(static_cast<std::size_t>(upa.u_h));
    for (int n = 0; n < upa.u_h; ++n) {
        horizontal[static_cast<std::size_t>(n)] = std::polar(1.0, two_pi * n * upa.d_h * sin_theta_sin_phi);
    }
    for (int m = 0; m < upa.u_v; ++m) {
        const Complex vertical = std::polar(1.0, two_pi * m * upa.d_v * cos_theta);
        Complex* row = out + static_cast<std::size_t>(m) * static_cast<std::size_t>(upa.u_h);
        for (int n = 0; n < upa.u_h; ++n) {
            row[n] = vertical * horizontal[static_cast<std::size_t>(n)];
        }
    }
}

}  // namespace detail

/// Isotropic-element array response, entry (m, n) at flat index m * u_h + n.
inline ComplexVector array_response(const UpaConfig& upa, Direction dir)
{
    ComplexVector a(upa.size());
    detail::fill_array_response(upa, std::cos(dir.theta), std::sin(dir.theta) * std::sin(dir.phi), a.values().data());
    return a;
}

/// conj(a(dir0)) / sqrt(U): unit-norm weights that co-phase a plane wave from dir0.
inline ComplexVector steering_vector(const UpaConfig& upa, Direction dir0)
{
    auto w = array_response(upa, dir0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(upa.size()));
    for (auto& v : w.values()) {
        v = std::conj(v) * scale;
    }
    return w;
}

/// |a(dir)^T w|^2 for precomputed weights, excluding element pattern.
inline double array_factor_gain(const UpaConfig& upa, Direction dir, const ComplexVector& w)
{
    const auto a = array_response(upa, dir);
    if (a.size() != w.size()) {
        throw DimensionError("array_factor_gain: weights have " + std::to_string(w.size()) + " entries, array has " +
                             std::to_string(a.size()));
    }
    Complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * w[i];
    }
    return std::norm(acc);
}

/**
 * Combined array and beamforming gain toward dir with the beam steered at dir0,
 * relative to a single isotropic element:
 *
 *     G = |a(dir)^T w(dir0)|^2 * g(dir)
 *
 * The element pattern g is common to all elements. For NLoS links the keyhole
 * abstraction overstates the gain and the result is scaled by eta.
 */
inline double beamforming_gain(const UpaConfig& upa, Direction dir, Direction dir0, LinkCondition condition, double eta)
{
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw DomainError("beamforming_gain: eta must lie in (0, 1], got " + std::to_string(eta));
    }
    const double g = array_factor_gain(upa, dir, steering_vector(upa, dir0)) * element_gain(upa.pattern, dir);
    return condition == LinkCondition::nlos ? eta * g : g;
}

}  // namespace mimosim

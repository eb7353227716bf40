// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mimosim/errors.hpp"
#include "mimosim/rng.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace mimosim {

/**
 * Fluctuating two-ray fading parameters, normalized to unit mean power
 * (v1^2 + v2^2 + 2 sigma2 = 1).
 *
 *   k     = (v1^2 + v2^2) / (2 sigma2)   specular-to-diffuse power ratio
 *   delta = 2 v1 v2 / (v1^2 + v2^2)     similarity of the two specular powers
 *   m     = shape (and rate) of the unit-mean Gamma variable shadowing both specular terms
 */
struct FtrParameters {
    double m = 1.0;
    double k = 0.0;
    double delta = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double sigma2 = 0.5;

    void validate(double tol = 1e-9) const
    {
        if (!(m > 0.0) || !(k >= 0.0) || !(delta >= 0.0 && delta <= 1.0) || !(v1 >= 0.0) || !(v2 >= 0.0) ||
            !(sigma2 > 0.0)) {
            throw DomainError("FTR parameters out of domain");
        }
        const double specular = v1 * v1 + v2 * v2;
        if (std::abs(specular / (2.0 * sigma2) - k) > tol * std::max(1.0, k)) {
            throw DomainError("FTR parameters: amplitudes inconsistent with k");
        }
        if (specular > 0.0 && std::abs(2.0 * v1 * v2 / specular - delta) > tol) {
            throw DomainError("FTR parameters: amplitudes inconsistent with delta");
        }
        if (std::abs(specular + 2.0 * sigma2 - 1.0) > tol) {
            throw DomainError("FTR parameters: mean power is not 1");
        }
    }
};

/// Unit-mean-power FTR parameters from (m, K, Delta).
inline FtrParameters ftr_from_k_delta(double m, double k, double delta)
{
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw DomainError("ftr_from_k_delta: m must be positive and finite");
    }
    if (!(k >= 0.0) || !std::isfinite(k)) {
        throw DomainError("ftr_from_k_delta: k must be nonnegative and finite");
    }
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw DomainError("ftr_from_k_delta: delta must lie in [0, 1]");
    }
    FtrParameters p;
    p.m = m;
    p.k = k;
    p.delta = delta;
    p.sigma2 = 1.0 / (2.0 * (k + 1.0));
    const double specular = k / (k + 1.0);
    const double root = std::sqrt(1.0 - delta * delta);
    p.v1 = std::sqrt(specular * (1.0 + root) / 2.0);
    p.v2 = std::sqrt(specular * (1.0 - root) / 2.0);
    return p;
}

/// One power sample |V|^2 with V = sqrt(xi) (v1 e^{j phi1} + v2 e^{j phi2}) + X + jY.
inline double sample_ftr_power(const FtrParameters& p, RngStream& rng)
{
    const double xi = rng.gamma(p.m, 1.0 / p.m);
    const double phi1 = rng.phase();
    const double phi2 = rng.phase();
    const double sigma = std::sqrt(p.sigma2);
    const double x = sigma * rng.normal();
    const double y = sigma * rng.normal();
    const std::complex<double> specular = std::sqrt(xi) * (std::polar(p.v1, phi1) + std::polar(p.v2, phi2));
    return std::norm(specular + std::complex<double>(x, y));
}

/// A probability together with its complement, each carried at full relative precision.
struct Probability {
    double cdf = 0.0;
    double sf = 1.0;
};

namespace detail {

/// Poisson(mean) mixing weights over k.
struct PoissonMixing {
    double mean = 0.0;

    [[nodiscard]] bool degenerate() const noexcept { return !(mean > 0.0); }
    [[nodiscard]] double log_pmf(std::size_t k) const
    {
        const double kd = static_cast<double>(k);
        return -mean + kd * std::log(mean) - std::lgamma(kd + 1.0);
    }
    [[nodiscard]] double ratio(std::size_t k) const noexcept { return mean / (static_cast<double>(k) + 1.0); }
    /// P(K < k)
    [[nodiscard]] double mass_below(std::size_t k) const
    {
        return k == 0 ? 0.0 : boost::math::gamma_q(static_cast<double>(k), mean);
    }
    /// P(K >= k)
    [[nodiscard]] double mass_from(std::size_t k) const
    {
        return k == 0 ? 1.0 : boost::math::gamma_p(static_cast<double>(k), mean);
    }
};

/// Negative-binomial mixing weights: a Poisson whose mean is itself Gamma(shape)-distributed.
struct NegBinomialMixing {
    double shape = 1.0;
    double mean = 0.0;

    [[nodiscard]] bool degenerate() const noexcept { return !(mean > 0.0); }
    [[nodiscard]] double success() const noexcept { return shape / (shape + mean); }
    [[nodiscard]] double failure() const noexcept { return mean / (shape + mean); }
    [[nodiscard]] double log_pmf(std::size_t k) const
    {
        const double kd = static_cast<double>(k);
        return std::lgamma(kd + shape) - std::lgamma(kd + 1.0) - std::lgamma(shape) + shape * std::log(success()) +
               kd * std::log(failure());
    }
    [[nodiscard]] double ratio(std::size_t k) const noexcept
    {
        const double kd = static_cast<double>(k);
        return (kd + shape) / (kd + 1.0) * failure();
    }
    [[nodiscard]] double mass_below(std::size_t k) const
    {
        return k == 0 ? 0.0 : boost::math::ibeta(shape, static_cast<double>(k), success());
    }
    [[nodiscard]] double mass_from(std::size_t k) const
    {
        return k == 0 ? 1.0 : boost::math::ibetac(shape, static_cast<double>(k), success());
    }
};

/**
 * For K drawn from the mixing law, returns
 *
 *   cdf = sum_k w_k P(k + 1, y),   sf = sum_k w_k Q(k + 1, y)
 *
 * with P, Q the regularized incomplete gamma functions. This is the CDF of a
 * Gamma(K + 1, 1) variable at y, i.e. of a noncentral chi-square power when
 * the mixing law is Poisson.
 *
 * Only k within 12 standard deviations of y contribute fractional terms;
 * below that window P(k+1, y) = 1 and above it Q(k+1, y) = 1 to double
 * precision, so those ranges enter through the mixing law's own CDF. Both
 * outputs are sums of nonnegative terms and keep relative accuracy in the tails.
 */
template <class Mixing>
Probability gamma_mixture(const Mixing& mix, double y)
{
    if (!(y > 0.0)) {
        return {0.0, 1.0};
    }
    if (std::isinf(y)) {
        return {1.0, 0.0};
    }
    if (mix.degenerate()) {
        return {-std::expm1(-y), std::exp(-y)};
    }
    const double spread = 12.0 * std::sqrt(y) + 16.0;
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(y - spread)));
    const auto hi = static_cast<std::size_t>(std::ceil(y + spread));
    const std::size_t n = hi - lo;

    thread_local std::vector<double> pmf;
    thread_local std::vector<double> upper;
    pmf.resize(n + 1);
    upper.resize(n + 2);
    pmf[0] = std::exp(-y + static_cast<double>(lo) * std::log(y) - std::lgamma(static_cast<double>(lo) + 1.0));
    for (std::size_t i = 1; i <= n; ++i) {
        pmf[i] = pmf[i - 1] * y / static_cast<double>(lo + i);
    }
    // upper[i] = sum_{t >= i} pmf[t] = P(lo + i, y) for the Poisson(y) count
    upper[n + 1] = 0.0;
    for (std::size_t i = n + 1; i-- > 0;) {
        upper[i] = upper[i + 1] + pmf[i];
    }

    double cdf = lo > 0 ? mix.mass_below(lo) : 0.0;
    double sf = mix.mass_from(hi);
    double lower = 0.0;  // sum_{t <= i} pmf[t]
    double log_scale = mix.log_pmf(lo);
    double scale = std::exp(log_scale);
    double r = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = r * scale;
        lower += pmf[i];
        cdf += w * upper[i + 1];
        sf += w * lower;
        r *= mix.ratio(lo + i);
        if (r > 1e200 || (r > 0.0 && r < 1e-200)) {
            log_scale += std::log(r);
            r = 1.0;
            scale = std::exp(log_scale);
        }
    }
    return {std::min(cdf, 1.0), std::min(sf, 1.0)};
}

}  // namespace detail

/// First-order Marcum Q together with its complement: {1 - Q1(a, b), Q1(a, b)}.
inline Probability marcum_q1_pair(double a, double b)
{
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw DomainError("marcum_q1: arguments must be nonnegative");
    }
    return detail::gamma_mixture(detail::PoissonMixing{0.5 * a * a}, 0.5 * b * b);
}

/// First-order Marcum Q function Q1(a, b).
inline double marcum_q1(double a, double b) { return marcum_q1_pair(a, b).sf; }

/// Nodes and normalized weights integrating against the unit-mean Gamma(shape) density.
struct GammaQuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Generalized Gauss-Laguerre rule (alpha = shape - 1) via Golub-Welsch, rescaled to unit mean.
inline GammaQuadratureRule gamma_gauss_laguerre(double shape, int n)
{
    if (!(shape > 0.0) || n < 1) {
        throw DomainError("gamma_gauss_laguerre: need shape > 0 and n >= 1");
    }
    const double alpha = shape - 1.0;
    Eigen::VectorXd diag(n);
    Eigen::VectorXd sub(std::max(n - 1, 1));
    for (int i = 0; i < n; ++i) {
        diag(i) = 2.0 * i + alpha + 1.0;
    }
    for (int i = 1; i < n; ++i) {
        sub(i - 1) = std::sqrt(i * (i + alpha));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    GammaQuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i) / shape;
        const double v = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v * v;
    }
    return rule;
}

/// How the Gamma variable xi is integrated out of the conditional Rician CDF.
enum class XiIntegration {
    /// Exact: a Gamma-mixed Poisson is negative binomial.
    negative_binomial,
    /// Generalized Gauss-Laguerre nodes against the Gamma weight.
    gauss_laguerre,
};

struct QuadratureConfig {
    int xi_nodes = 64;
    int phase_nodes = 64;
    XiIntegration xi_method = XiIntegration::negative_binomial;

    void validate() const
    {
        if (xi_nodes < 8 || phase_nodes < 8) {
            throw ConfigError("quadrature needs at least 8 nodes per axis (xi_nodes=" + std::to_string(xi_nodes) +
                              ", phase_nodes=" + std::to_string(phase_nodes) + ")");
        }
    }

    friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

namespace detail {

inline const GammaQuadratureRule& cached_gamma_rule(double shape, int n)
{
    thread_local std::map<std::pair<double, int>, GammaQuadratureRule> cache;
    auto it = cache.find({shape, n});
    if (it == cache.end()) {
        it = cache.emplace(std::make_pair(shape, n), gamma_gauss_laguerre(shape, n)).first;
    }
    return it->second;
}

}  // namespace detail

/**
 * CDF and complementary CDF of the FTR power at x.
 *
 * Conditional on xi and the phase difference dphi = phi1 - phi2, the envelope
 * is Rician with specular power xi * (v1^2 + v2^2 + 2 v1 v2 cos dphi), so the
 * power CDF is a Poisson mixture of Gamma(k+1) CDFs in y = x / (2 sigma2).
 * dphi is integrated with the trapezoid rule on [0, pi] (the integrand is
 * even and 2pi-periodic); xi either in closed form or by Gauss-Laguerre.
 */
inline Probability ftr_distribution(const FtrParameters& p, double x, const QuadratureConfig& quad = {})
{
    quad.validate();
    if (!(x >= 0.0)) {
        throw DomainError("ftr_cdf: x must be nonnegative");
    }
    if (x == 0.0) {
        return {0.0, 1.0};
    }
    if (std::isinf(x)) {
        return {1.0, 0.0};
    }
    const double y = x / (2.0 * p.sigma2);
    const double specular = p.v1 * p.v1 + p.v2 * p.v2;
    if (specular == 0.0) {
        return {-std::expm1(-y), std::exp(-y)};
    }

    auto conditional = [&](double specular_power) -> Probability {
        const double mean = specular_power / (2.0 * p.sigma2);
        if (quad.xi_method == XiIntegration::negative_binomial) {
            return detail::gamma_mixture(detail::NegBinomialMixing{p.m, mean}, y);
        }
        const auto& rule = detail::cached_gamma_rule(p.m, quad.xi_nodes);
        Probability acc{0.0, 0.0};
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const auto pr = detail::gamma_mixture(detail::PoissonMixing{rule.nodes[i] * mean}, y);
            acc.cdf += rule.weights[i] * pr.cdf;
            acc.sf += rule.weights[i] * pr.sf;
        }
        return acc;
    };

    // The smaller tail is the accurate one; the other is its complement so both stay monotone.
    auto finish = [](Probability pr) -> Probability {
        if (pr.sf < pr.cdf) {
            const double sf = std::clamp(pr.sf, 0.0, 1.0);
            return {1.0 - sf, sf};
        }
        const double cdf = std::clamp(pr.cdf, 0.0, 1.0);
        return {cdf, 1.0 - cdf};
    };
    const double cross = 2.0 * p.v1 * p.v2;
    if (cross == 0.0) {
        return finish(conditional(specular));
    }
    const int n = quad.phase_nodes;
    Probability acc{0.0, 0.0};
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n ? 0.5 : 1.0) / n;
        const double dphi = std::numbers::pi * i / n;
        const auto pr = conditional(std::max(0.0, specular + cross * std::cos(dphi)));
        acc.cdf += w * pr.cdf;
        acc.sf += w * pr.sf;
    }
    return finish(acc);
}

/// P(F <= x) for the FTR power F.
inline double ftr_cdf(const FtrParameters& p, double x, const QuadratureConfig& quad = {})
{
    return ftr_distribution(p, x, quad).cdf;
}

}  // namespace mimosim

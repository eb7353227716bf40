// SPDX-License-Identifier: Apache-2.0
#include "mimosim/calibration.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace mimosim;

namespace {

// Direct evaluation of -n - sum (2i-1)/n [ln F(Y_i) + ln(1 - F(Y_{n+1-i}))] from a list of F values.
double a2_oracle(const std::vector<double>& f)
{
    const double n = static_cast<double>(f.size());
    double s = 0.0;
    for (std::size_t i = 1; i <= f.size(); ++i) {
        s += (2.0 * static_cast<double>(i) - 1.0) / n * (std::log(f[i - 1]) + std::log(1.0 - f[f.size() - i]));
    }
    return -n - s;
}

std::vector<double> sorted_exponential(std::uint64_t seed, std::size_t n)
{
    RngStream rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = -std::log1p(-rng.uniform());
    }
    std::sort(v.begin(), v.end());
    return v;
}

double exp_cdf(double x) { return -std::expm1(-x); }

ParameterGrid small_grid()
{
    ParameterGrid g;
    g.m_values = {1.0, 5.0, 50.0};
    g.k_values = {0.1, 3.0, 10.0};
    g.delta_values = {0.0, 0.5, 1.0};
    return g;
}

std::vector<double> ftr_samples(const FtrParameters& p, std::uint64_t seed, std::size_t n)
{
    RngStream rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) {
        x = sample_ftr_power(p, rng);
    }
    return v;
}

TEST(AndersonDarling, HandValues)
{
    const auto uniform = [](double x) { return x; };
    EXPECT_NEAR(anderson_darling_statistic({0.5}, uniform), a2_oracle({0.5}), 1e-12);
    EXPECT_NEAR(anderson_darling_statistic({0.5}, uniform), -1.0 - 2.0 * std::log(0.5), 1e-12);
    EXPECT_NEAR(anderson_darling_statistic({0.25, 0.75}, uniform), a2_oracle({0.25, 0.75}), 1e-12);
    EXPECT_NEAR(anderson_darling_statistic({0.25, 0.75}, uniform), 0.2493405784752332, 1e-12);
}

TEST(AndersonDarling, AgreesWithDirectFormula)
{
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> f(1 + trial * 7);
        for (auto& v : f) {
            v = u(g);
        }
        std::sort(f.begin(), f.end());
        const double expected = a2_oracle(f);
        EXPECT_NEAR(anderson_darling_statistic(f, [](double x) { return x; }), expected, 1e-10 * std::max(1.0, std::abs(expected)));
    }
}

TEST(AndersonDarling, AcceptsProbabilityAndLogPair)
{
    const auto s = sorted_exponential(5, 500);
    const double plain = anderson_darling_statistic(s, exp_cdf);
    EXPECT_NEAR(anderson_darling_statistic(s, [](double x) { return Probability{-std::expm1(-x), std::exp(-x)}; }), plain, 1e-9);
    EXPECT_NEAR(anderson_darling_statistic(s, [](double x) { return std::pair{std::log(-std::expm1(-x)), -x}; }), plain, 1e-9);
}

TEST(AndersonDarling, ProbabilityIntegralTransformInvariance)
{
    const auto s = sorted_exponential(9, 10000);
    std::vector<double> pit(s.size());
    std::transform(s.begin(), s.end(), pit.begin(), exp_cdf);
    EXPECT_NEAR(anderson_darling_statistic(s, exp_cdf), anderson_darling_statistic(pit, [](double u) { return u; }), 1e-12);
}

TEST(AndersonDarling, NullDistributionQuantiles)
{
    // Asymptotic null quantiles of A^2: 0.95 -> 2.492, 0.99 -> 3.857.
    const int seeds = 1000;
    int below_95 = 0;
    int below_99 = 0;
    for (int seed = 0; seed < seeds; ++seed) {
        const double a2 = anderson_darling_statistic(sorted_exponential(static_cast<std::uint64_t>(seed) + 1000, 10000), exp_cdf);
        below_95 += a2 < 2.492 ? 1 : 0;
        below_99 += a2 < 3.857 ? 1 : 0;
    }
    // Binomial standard errors at 1000 seeds are about 0.007 and 0.003.
    EXPECT_NEAR(below_95 / static_cast<double>(seeds), 0.95, 0.021);
    EXPECT_NEAR(below_99 / static_cast<double>(seeds), 0.99, 0.0095);
}

TEST(AndersonDarling, ClampsDegenerateProbabilities)
{
    const double a2 = anderson_darling_statistic({0.0, 1.0}, [](double x) { return x; });
    EXPECT_TRUE(std::isfinite(a2));
    EXPECT_GT(a2, 10.0);
}

TEST(AndersonDarling, InputErrors)
{
    const auto uniform = [](double x) { return x; };
    EXPECT_THROW(anderson_darling_statistic({}, uniform), DomainError);
    EXPECT_THROW(anderson_darling_statistic({0.7, 0.2}, uniform), PreconditionError);
}

TEST(FtrCdfTable, TracksDirectEvaluation)
{
    for (auto [m, k, d] : std::vector<std::tuple<double, double, double>>{{0.5, 1000.0, 1.0}, {5.0, 5.0, 0.5}, {500.0, 1.0, 0.0}, {2.0, 0.1, 0.3}}) {
        const auto p = ftr_from_k_delta(m, k, d);
        const FtrCdfTable table(p, {});
        double worst = 0.0;
        for (double lx = -8.0; lx <= 1.3; lx += 0.0137) {
            const double x = std::pow(10.0, lx);
            const auto exact = ftr_distribution(p, x);
            const auto [lc, ls] = table.log_probabilities(x);
            if (exact.cdf > 1e-12) {
                worst = std::max(worst, std::abs(lc - std::log(exact.cdf)));
            }
            if (exact.sf > 1e-12) {
                worst = std::max(worst, std::abs(ls - std::log(exact.sf)));
            }
        }
        EXPECT_LT(worst, 1e-3) << m << ' ' << k << ' ' << d;
    }
}

TEST(FtrCdfCache, ReusesTables)
{
    FtrCdfCache cache;
    const auto a = cache.get(2.0, 3.0, 0.5, {});
    const auto b = cache.get(2.0, 3.0, 0.5, {});
    EXPECT_EQ(a.get(), b.get());
    EXPECT_EQ(cache.size(), 1u);
    QuadratureConfig other;
    other.phase_nodes = 32;
    EXPECT_NE(cache.get(2.0, 3.0, 0.5, other).get(), a.get());
    cache.clear();
    EXPECT_EQ(cache.size(), 0u);
}

TEST(FitFtr, RecoversGridTriple)
{
    const auto grid = small_grid();
    const auto truth = ftr_from_k_delta(5.0, 10.0, 0.5);
    const auto fit = fit_ftr(ftr_samples(truth, 3, 20000), grid);
    EXPECT_EQ(fit.params.m, 5.0);
    EXPECT_EQ(fit.params.k, 10.0);
    EXPECT_EQ(fit.params.delta, 0.5);
    const auto [m, k, d] = grid.at(fit.grid_index);
    EXPECT_EQ(m, 5.0);
    EXPECT_EQ(k, 10.0);
    EXPECT_EQ(d, 0.5);
}

TEST(FitFtr, ExponentialSamplesPickSmallestK)
{
    const auto fit = fit_ftr(sorted_exponential(4, 20000), small_grid());
    EXPECT_EQ(fit.params.k, 0.1);
}

TEST(FitFtr, TabulatedMatchesDirect)
{
    ParameterGrid g;
    g.m_values = {2.0, 10.0};
    g.k_values = {1.0, 5.0};
    g.delta_values = {0.2, 0.8};
    const auto s = ftr_samples(ftr_from_k_delta(10.0, 5.0, 0.8), 6, 2000);
    FitOptions tab;
    FitOptions direct;
    direct.evaluation = CdfEvaluation::direct;
    const auto a = fit_ftr(s, g, tab);
    const auto b = fit_ftr(s, g, direct);
    EXPECT_EQ(a.grid_index, b.grid_index);
    EXPECT_NEAR(a.a2, b.a2, 1e-2 * std::max(1.0, b.a2));
}

TEST(FitFtr, InvariantToOrderScaleAndWorkers)
{
    const auto grid = small_grid();
    auto s = ftr_samples(ftr_from_k_delta(1.0, 3.0, 1.0), 8, 5000);
    FitOptions seq;
    seq.workers = 1;
    const auto base = fit_ftr(s, grid, seq);

    std::mt19937_64 g(1);
    std::shuffle(s.begin(), s.end(), g);
    FitOptions par;
    par.workers = 4;
    const auto shuffled = fit_ftr(s, grid, par);
    EXPECT_EQ(shuffled.grid_index, base.grid_index);
    EXPECT_EQ(shuffled.a2, base.a2);

    for (auto& v : s) {
        v *= 37.5;
    }
    const auto scaled = fit_ftr(s, grid, seq);
    EXPECT_EQ(scaled.grid_index, base.grid_index);
    EXPECT_NEAR(scaled.a2, base.a2, 1e-9 * base.a2);
}

TEST(FitFtr, TiesResolveToFirstTriple)
{
    // Duplicate parameter points on the m axis are not allowed, but with K = 0 every m and delta gives the
    // same exponential law, so the minimum is shared by all of them.
    ParameterGrid g;
    g.m_values = {1.0, 2.0, 3.0};
    g.k_values = {0.0};
    g.delta_values = {0.0, 0.5};
    const auto fit = fit_ftr(sorted_exponential(2, 1000), g);
    EXPECT_EQ(fit.grid_index, 0u);
}

TEST(FitFtr, InputErrors)
{
    const auto grid = small_grid();
    EXPECT_THROW(fit_ftr(std::vector<double>(50, 1.0), grid), DomainError);
    auto s = sorted_exponential(1, 500);
    s[3] = -1.0;
    EXPECT_THROW(fit_ftr(s, grid), DomainError);
    ParameterGrid bad = grid;
    bad.k_values = {3.0, 1.0};
    EXPECT_THROW(fit_ftr(sorted_exponential(1, 500), bad), ConfigError);
}

TEST(ParameterGrid, DefaultLayout)
{
    const auto g = ParameterGrid::default_grid();
    EXPECT_EQ(g.size(), 9u * 11u * 11u);
    EXPECT_NO_THROW(g.validate());
    const auto [m, k, d] = g.at(g.size() - 1);
    EXPECT_EQ(m, 500.0);
    EXPECT_NEAR(k, 1000.0, 1e-9);
    EXPECT_EQ(d, 1.0);
    const auto [m1, k1, d1] = g.at(1);
    EXPECT_EQ(m1, 0.5);
    EXPECT_NEAR(k1, 0.1, 1e-15);
    EXPECT_EQ(d1, 0.1);
}

TEST(ParameterGrid, ParseToml)
{
    const auto g = ParameterGrid::parse("m = [1, 2.5]\nk_db = [0, 10]\ndelta = [0.0, 1.0]\n");
    EXPECT_EQ(g.m_values, (std::vector<double>{1.0, 2.5}));
    EXPECT_NEAR(g.k_values[1], 10.0, 1e-12);
    const auto lin = ParameterGrid::parse("m = [1]\nk = [0, 3]\ndelta = [0.5]\n");
    EXPECT_EQ(lin.k_values, (std::vector<double>{0.0, 3.0}));

    EXPECT_THROW(ParameterGrid::parse("m = [1]\nk = [1]\ndelta = [0.5]\nextra = [1]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = [1]\nk = [1]\nk_db = [1]\ndelta = [0.5]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = [1]\nk = [1]\ndelta = [1.5]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = [2, 1]\nk = [1]\ndelta = [0.5]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = [1]\ndelta = [0.5]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = ['a']\nk = [1]\ndelta = [0.5]\n"), ConfigError);
    EXPECT_THROW(ParameterGrid::parse("m = [1\n"), ConfigError);
}

CalibrationTable two_entry_table()
{
    CalibrationTable t;
    t.insert(Scenario::umi, LinkCondition::los, {ftr_from_k_delta(10.0, std::pow(10.0, 0.9), 0.3), 1.2345678901234567});
    t.insert(Scenario::umi, LinkCondition::nlos, {ftr_from_k_delta(0.5, 0.1, 1.0), 0.1});
    return t;
}

TEST(CalibrationTable, CsvRoundTrip)
{
    const auto t = two_entry_table();
    std::stringstream ss;
    t.write_csv(ss);
    const auto back = CalibrationTable::read_csv(ss);
    EXPECT_EQ(back.size(), 2u);
    for (const auto& [key, e] : t.entries()) {
        const auto& r = back.get(key.first, key.second);
        EXPECT_NEAR(r.params.m, e.params.m, 1e-12 * e.params.m);
        EXPECT_NEAR(r.params.k, e.params.k, 1e-12 * e.params.k);
        EXPECT_NEAR(r.params.delta, e.params.delta, 1e-12);
        EXPECT_NEAR(r.a2, e.a2, 1e-12);
    }
    EXPECT_TRUE(back == t);
}

TEST(CalibrationTable, LookupAndInsertErrors)
{
    auto t = two_entry_table();
    EXPECT_TRUE(t.contains(Scenario::umi, LinkCondition::los));
    EXPECT_FALSE(t.contains(Scenario::rma, LinkCondition::los));
    EXPECT_THROW((void)t.get(Scenario::rma, LinkCondition::los), LookupError);
    EXPECT_THROW((void)lookup_ftr_params(t, Scenario::uma, LinkCondition::nlos), LookupError);
    EXPECT_EQ(lookup_ftr_params(t, Scenario::umi, LinkCondition::nlos).m, 0.5);
    EXPECT_THROW(t.insert(Scenario::umi, LinkCondition::los, {ftr_from_k_delta(1.0, 1.0, 0.0), 0.0}), ConfigError);
    FtrParameters broken = ftr_from_k_delta(1.0, 1.0, 0.0);
    broken.sigma2 = 0.4;
    EXPECT_THROW(t.insert(Scenario::rma, LinkCondition::los, {broken, 0.0}), DomainError);
}

TEST(CalibrationTable, MalformedCsv)
{
    std::stringstream header("scenario,condition,m\n");
    EXPECT_THROW(CalibrationTable::read_csv(header), ConfigError);
    std::stringstream row(
        "scenario,condition,m,k,delta,v1,v2,sigma2,a2\n"
        "UMi,LoS,1,1,0,0.5,0,0.25\n");
    EXPECT_THROW(CalibrationTable::read_csv(row), ConfigError);
    std::stringstream dup;
    two_entry_table().write_csv(dup);
    std::string text = dup.str();
    text += text.substr(text.find('\n') + 1);
    std::stringstream dup2(text);
    EXPECT_THROW(CalibrationTable::read_csv(dup2), ConfigError);
}

TEST(BuildCalibrationTable, FitsEverySetAndRejectsDuplicates)
{
    FadingSampleSet a;
    a.scenario = Scenario::uma;
    a.condition = LinkCondition::nlos;
    a.fc_ghz = 28.0;
    a.samples = sorted_exponential(1, 3000);
    FadingSampleSet b = a;
    b.condition = LinkCondition::los;
    b.samples = ftr_samples(ftr_from_k_delta(50.0, 10.0, 0.0), 2, 3000);
    const auto t = build_calibration_table({a, b}, small_grid());
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.get(Scenario::uma, LinkCondition::nlos).params.k, 0.1);
    EXPECT_EQ(t.get(Scenario::uma, LinkCondition::los).params.k, 10.0);
    EXPECT_THROW(build_calibration_table({a, a}, small_grid()), ConfigError);
}

}  // namespace

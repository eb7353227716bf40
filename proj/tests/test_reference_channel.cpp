// SPDX-License-Identifier: Apache-2.0
#include "mimosim/reference_channel.hpp"
#include "mimosim/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <sstream>

using namespace mimosim;

namespace {

ClusterSet single_cluster()
{
    ClusterSet cs;
    cs.powers = {1.0};
    cs.aod = {0.0};
    cs.zod = {std::numbers::pi / 2};
    cs.aoa = {0.0};
    cs.zoa = {std::numbers::pi / 2};
    cs.alpha = {Complex(1.0, 0.0)};
    return cs;
}

TEST(ClusterGeneration, DominantRayLimit)
{
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 1;
    cfg.k_factor_db = 60.0;
    RngStream rng(1);
    const auto cs = generate_cluster_params(cfg, LinkCondition::los, rng);
    ASSERT_EQ(cs.n_clusters(), 1u);
    EXPECT_GE(cs.powers[0], 0.999999);
}

TEST(ClusterGeneration, NlosPowersSortedAndNormalized)
{
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 10;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RngStream rng(seed);
        const auto cs = generate_cluster_params(cfg, LinkCondition::nlos, rng);
        ASSERT_EQ(cs.n_clusters(), 10u);
        EXPECT_TRUE(std::is_sorted(cs.powers.rbegin(), cs.powers.rend()));
        EXPECT_NEAR(std::accumulate(cs.powers.begin(), cs.powers.end(), 0.0), 1.0, 1e-9);
    }
}

TEST(ClusterGeneration, LosLayoutAndDefaults)
{
    const auto cfg = ReferenceChannelConfig::for_scenario(Scenario::umi);
    RngStream rng(4);
    const Direction dep{1.4, 0.3};
    const Direction arr{1.7, -2.0};
    const auto cs = generate_cluster_params(cfg, LinkCondition::los, rng, dep, arr);
    EXPECT_EQ(cs.n_clusters(), 13u);
    const double k = std::pow(10.0, 0.9);
    EXPECT_NEAR(cs.powers[0], k / (k + 1.0), 1e-12);
    EXPECT_EQ(cs.alpha[0], Complex(1.0));
    EXPECT_EQ(cs.aod[0], dep.phi);
    EXPECT_EQ(cs.zoa[0], arr.theta);
    EXPECT_NEAR(std::accumulate(cs.powers.begin(), cs.powers.end(), 0.0), 1.0, 1e-9);

    RngStream rng2(4);
    EXPECT_EQ(generate_cluster_params(cfg, LinkCondition::nlos, rng2).n_clusters(), 20u);
}

TEST(ClusterGeneration, Deterministic)
{
    const auto cfg = ReferenceChannelConfig::for_scenario(Scenario::uma);
    RngStream a(8);
    RngStream b(8);
    const auto x = generate_cluster_params(cfg, LinkCondition::nlos, a);
    const auto y = generate_cluster_params(cfg, LinkCondition::nlos, b);
    EXPECT_EQ(x.powers, y.powers);
    EXPECT_EQ(x.aoa, y.aoa);
    EXPECT_EQ(x.alpha, y.alpha);
}

TEST(ClusterGeneration, InvalidConfig)
{
    ReferenceChannelConfig cfg;
    cfg.n_clusters = -2;
    RngStream rng(1);
    EXPECT_THROW(generate_cluster_params(cfg, LinkCondition::nlos, rng), ConfigError);
}

TEST(AssembleChannel, SingleElementSingleCluster)
{
    const auto h = assemble_channel(single_cluster(), UpaConfig{}, UpaConfig{}, true);
    ASSERT_EQ(h.pages(), 1u);
    EXPECT_NEAR(std::abs(h(0, 0, 0) - Complex(1.0)), 0.0, 1e-15);
}

TEST(AssembleChannel, MatchesDefinitionEntrywise)
{
    RngStream rng(6);
    const auto cs = generate_cluster_params(ReferenceChannelConfig{}, LinkCondition::nlos, rng, {1.2, 0.4}, {1.9, -0.7});
    const UpaConfig tx{3, 2, 0.5, 0.7};
    const UpaConfig rx{2, 2};
    const auto h = assemble_channel(cs, tx, rx, true);
    for (std::size_t n = 0; n < cs.n_clusters(); ++n) {
        const auto ar = array_response(rx, {cs.zoa[n], cs.aoa[n]});
        const auto at = array_response(tx, {cs.zod[n], cs.aod[n]});
        for (std::size_t u = 0; u < rx.size(); ++u) {
            for (std::size_t s = 0; s < tx.size(); ++s) {
                const Complex expected = std::sqrt(cs.powers[n]) * cs.alpha[n] * ar[u] * at[s];
                EXPECT_NEAR(std::abs(h(u, s, n) - expected), 0.0, 1e-13);
            }
        }
    }
}

TEST(AssembleChannel, CachedMatchesNaive)
{
    std::mt19937_64 g(12);
    std::uniform_int_distribution<int> side(1, 8);
    for (int trial = 0; trial < 100; ++trial) {
        RngStream rng(static_cast<std::uint64_t>(trial));
        ReferenceChannelConfig cfg;
        cfg.n_clusters = 20;
        cfg.angular_spread_deg = 40.0;
        const auto cs = generate_cluster_params(cfg, trial % 2 ? LinkCondition::los : LinkCondition::nlos, rng,
                                                Direction::normalized(rng.uniform(0, 3.14), rng.uniform(-3, 3)),
                                                Direction::normalized(rng.uniform(0, 3.14), rng.uniform(-3, 3)));
        const UpaConfig tx{side(g), side(g)};
        const UpaConfig rx{side(g), side(g)};
        const auto a = assemble_channel(cs, tx, rx, false);
        const auto b = assemble_channel(cs, tx, rx, true);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.values().size(); ++i) {
            worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
        }
        EXPECT_LE(worst, 1e-12) << "trial " << trial;
    }
}

TEST(AssembleChannel, TrigCallCounts)
{
    RngStream rng(3);
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 20;
    const auto cs = generate_cluster_params(cfg, LinkCondition::nlos, rng);
    for (auto [tx, rx] : std::vector<std::pair<UpaConfig, UpaConfig>>{{{1, 1}, {1, 1}}, {{4, 2}, {2, 2}}, {{8, 8}, {8, 8}}}) {
        TrigCounters naive;
        TrigCounters cached;
        (void)assemble_channel(cs, tx, rx, false, &naive);
        (void)assemble_channel(cs, tx, rx, true, &cached);
        const std::size_t c = cached.angle_evals / cs.n_clusters();
        EXPECT_EQ(cached.angle_evals, cs.n_clusters() * c);
        EXPECT_EQ(naive.angle_evals, cs.n_clusters() * tx.size() * rx.size() * c);
        EXPECT_EQ(naive.phase_evals, cs.n_clusters() * tx.size() * rx.size());
    }
}

TEST(AssembleChannel, ElementBudget)
{
    RngStream rng(3);
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 20;
    const auto cs = generate_cluster_params(cfg, LinkCondition::nlos, rng);
    EXPECT_THROW(assemble_channel(cs, UpaConfig{8, 8}, UpaConfig{8, 8}, true, nullptr, 1000), DimensionError);
}

TEST(AssembleChannel, PageEnergyMatchesClusterPower)
{
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 5;
    cfg.power_jitter_db = 0.0;  // fixed per-cluster powers across seeds
    const UpaConfig tx{2, 2};
    const UpaConfig rx{2, 1};
    std::vector<double> energy(5, 0.0);
    std::vector<double> power(5, 0.0);
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
        RngStream rng(static_cast<std::uint64_t>(s));
        const auto cs = generate_cluster_params(cfg, LinkCondition::nlos, rng);
        const auto h = assemble_channel(cs, tx, rx, true);
        for (std::size_t n = 0; n < 5; ++n) {
            for (std::size_t u = 0; u < rx.size(); ++u) {
                for (std::size_t c = 0; c < tx.size(); ++c) {
                    energy[n] += std::norm(h(u, c, n));
                }
            }
            power[n] += cs.powers[n];
        }
    }
    for (std::size_t n = 0; n < 5; ++n) {
        const double expected = power[n] / seeds * static_cast<double>(rx.size() * tx.size());
        EXPECT_NEAR(energy[n] / seeds, expected, 0.03 * expected) << n;
    }
}

TEST(SmallScaleGain, HandCases)
{
    const auto h = assemble_channel(single_cluster(), UpaConfig{}, UpaConfig{}, true);
    const ComplexVector one{1.0};
    EXPECT_NEAR(small_scale_gain(h, one, one), 1.0, 1e-15);

    ComplexMatrix plus(1, 1, 1.0);
    ComplexMatrix minus(1, 1, -1.0);
    EXPECT_EQ(small_scale_gain(ComplexTensor3::from_pages({plus, minus}), one, one), 0.0);
    EXPECT_THROW(small_scale_gain(h, ComplexVector(2), one), DimensionError);
}

TEST(SmallScaleGain, MatchesBruteForce)
{
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ComplexMatrix> pages;
        for (int n = 0; n < 6; ++n) {
            pages.push_back(oracle::random_matrix(g, 4, 3));
        }
        const auto wl = oracle::random_vector(g, 4);
        const auto wr = oracle::random_vector(g, 3);
        Complex sum{};
        for (const auto& p : pages) {
            sum += oracle::triple_loop(oracle::to_std(wl), oracle::nested(p), oracle::to_std(wr));
        }
        const double expected = std::norm(sum);
        EXPECT_NEAR(small_scale_gain(ComplexTensor3::from_pages(pages), wl, wr), expected, 1e-12 * expected);
    }
}

TEST(SmallScaleGain, MatchedSingleCluster)
{
    auto cs = single_cluster();
    cs.aod = {0.3};
    cs.zod = {1.2};
    cs.aoa = {-0.8};
    cs.zoa = {1.9};
    cs.alpha = {Complex(0.6, -0.9)};
    const UpaConfig tx{4, 4};
    const UpaConfig rx{2, 2};
    const auto h = assemble_channel(cs, tx, rx, true);
    const double gain = small_scale_gain(h, steering_vector(rx, {1.9, -0.8}), steering_vector(tx, {1.2, 0.3}));
    EXPECT_NEAR(gain, 16.0 * 4.0 * std::norm(cs.alpha[0]), 1e-9);
}

TEST(ReferenceSamples, DeterministicRay)
{
    ReferenceChannelConfig cfg;
    cfg.n_clusters = 1;
    cfg.k_factor_db = 60.0;
    RngStream rng(2);
    for (double v : reference_fading_samples(cfg, LinkCondition::los, 1000, rng)) {
        EXPECT_NEAR(v, 1.0, 1e-6);
    }
}

TEST(ReferenceSamples, NlosIsUnitMeanRayleigh)
{
    auto cfg = ReferenceChannelConfig::for_scenario(Scenario::umi);
    RngStream rng(2);
    const auto s = reference_fading_samples(cfg, LinkCondition::nlos, 100000, rng);
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    EXPECT_GE(mean, 0.98);
    EXPECT_LE(mean, 1.02);
    EXPECT_LT(ks_statistic(s, [](double x) { return -std::expm1(-x); }), 0.02);
}

TEST(ReferenceSamples, WorkerCountDoesNotChangeResult)
{
    const auto cfg = ReferenceChannelConfig::for_scenario(Scenario::rma);
    RngStream a(10);
    RngStream b(10);
    EXPECT_EQ(reference_fading_samples(cfg, LinkCondition::los, 2000, a, 1), reference_fading_samples(cfg, LinkCondition::los, 2000, b, 4));
    RngStream c(1);
    EXPECT_THROW(reference_fading_samples(cfg, LinkCondition::los, 0, c), DomainError);
}

TEST(SampleCsv, RoundTripAndErrors)
{
    const std::vector<double> v{0.0, 1.5, 1e-300, 3.141592653589793};
    std::stringstream ss;
    write_samples_csv(ss, v);
    EXPECT_EQ(read_samples_csv(ss), v);

    std::stringstream bad_header("gain\n1.0\n");
    EXPECT_THROW(read_samples_csv(bad_header), ConfigError);
    std::stringstream negative("gain_linear\n-1\n");
    EXPECT_THROW(read_samples_csv(negative), ConfigError);
    std::stringstream junk("gain_linear\n1.0abc\n");
    EXPECT_THROW(read_samples_csv(junk), ConfigError);
}

}  // namespace

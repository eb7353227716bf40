// SPDX-License-Identifier: Apache-2.0
#include "mimosim/tensor.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace mimosim;

namespace {

const Complex j{0.0, 1.0};

TEST(ComplexVector, NormMatchesDefinition)
{
    ComplexVector v{{3.0, 4.0}, {0.0, 12.0}};
    EXPECT_NEAR(v.norm(), 13.0, 13.0 * 1e-12);
    EXPECT_EQ(v.size(), 2u);
}

TEST(ComplexMatrix, ResizeAndBoundsChecks)
{
    ComplexMatrix m(2, 3);
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    m.resize(4, 1);
    EXPECT_EQ(m.rows(), 4u);
    EXPECT_EQ(m.cols(), 1u);
    EXPECT_NO_THROW(m.at(3, 0));
    EXPECT_THROW(m.at(4, 0), std::out_of_range);
    EXPECT_THROW(m.at(0, 1), std::out_of_range);
}

TEST(ComplexTensor3, PagesShareShape)
{
    const auto t = ComplexTensor3::from_pages({ComplexMatrix::identity(2), ComplexMatrix::identity(2)});
    EXPECT_EQ(t.pages(), 2u);
    EXPECT_EQ(t.rows(), 2u);
    try {
        (void)ComplexTensor3::from_pages({ComplexMatrix::identity(2), ComplexMatrix(2, 3)});
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("page 1"), std::string::npos);
    }
}

TEST(QuadraticForm, BasisVectorsSelectEntry)
{
    std::mt19937_64 g(3);
    const auto h = oracle::random_matrix(g, 3, 4);
    ComplexVector e_left(3);
    ComplexVector e_right(4);
    e_left[0] = 1.0;
    e_right[0] = 1.0;
    EXPECT_EQ(quadratic_form(e_left, h, e_right, Kernel::reference), h(0, 0));
    EXPECT_EQ(quadratic_form(e_left, h, e_right, Kernel::optimized), h(0, 0));
}

TEST(QuadraticForm, HandExpansions)
{
    ComplexMatrix h(2, 2);
    h(0, 0) = 1.0;
    h(0, 1) = 2.0;
    h(1, 0) = 3.0;
    h(1, 1) = 4.0;
    const ComplexVector ones{1.0, 1.0};
    for (auto k : {Kernel::reference, Kernel::optimized}) {
        EXPECT_EQ(quadratic_form(ones, h, ones, k), Complex(10.0));
        EXPECT_EQ(quadratic_form(ComplexVector{j, 0.0}, ComplexMatrix::identity(2), ComplexVector{1.0, 0.0}, k), j);
    }
}

TEST(QuadraticForm, NoConjugation)
{
    const ComplexVector w{j};
    ComplexMatrix h(1, 1, 1.0);
    // j * 1 * j = -1; a conjugating implementation would give 1.
    EXPECT_EQ(quadratic_form(w, h, w), Complex(-1.0));
}

TEST(QuadraticForm, DimensionMismatchThrows)
{
    const ComplexMatrix h(2, 3);
    EXPECT_THROW(quadratic_form(ComplexVector(2), h, ComplexVector(2)), DimensionError);
    EXPECT_THROW(quadratic_form(ComplexVector(3), h, ComplexVector(3)), DimensionError);
}

TEST(QuadraticForm, MatchesTripleLoopOracle)
{
    std::mt19937_64 g(11);
    std::uniform_int_distribution<std::size_t> dim(1, 16);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t u = dim(g);
        const std::size_t s = dim(g);
        const auto wl = oracle::random_vector(g, u);
        const auto wr = oracle::random_vector(g, s);
        const auto h = oracle::random_matrix(g, u, s);
        const Complex expected = oracle::triple_loop(oracle::to_std(wl), oracle::nested(h), oracle::to_std(wr));
        for (auto k : {Kernel::reference, Kernel::optimized}) {
            const Complex got = quadratic_form(wl, h, wr, k);
            EXPECT_LE(std::abs(got - expected), 1e-12 * std::abs(expected)) << "trial " << trial;
        }
    }
}

TEST(QuadraticForm, LinearInLeftWeights)
{
    std::mt19937_64 g(5);
    const Complex alpha{0.3, -1.7};
    for (int trial = 0; trial < 50; ++trial) {
        const auto wl = oracle::random_vector(g, 6);
        const auto wr = oracle::random_vector(g, 5);
        const auto h = oracle::random_matrix(g, 6, 5);
        ComplexVector scaled = wl;
        for (auto& v : scaled.values()) {
            v *= alpha;
        }
        const Complex base = quadratic_form(wl, h, wr);
        EXPECT_LE(std::abs(quadratic_form(scaled, h, wr) - alpha * base), 1e-12 * std::abs(alpha * base));
    }
}

TEST(TensorQuadraticForm, PerPageResults)
{
    const auto t = ComplexTensor3::from_pages({ComplexMatrix::identity(2), [] {
                                                   auto m = ComplexMatrix::identity(2);
                                                   m(0, 0) = 2.0;
                                                   m(1, 1) = 2.0;
                                                   return m;
                                               }()});
    const ComplexVector e1{1.0, 0.0};
    const auto r = tensor_quadratic_form(e1, t, e1);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], Complex(1.0));
    EXPECT_EQ(r[1], Complex(2.0));

    const ComplexTensor3 zero(3, 2, 4);
    const auto z = tensor_quadratic_form(ComplexVector{1.0, 2.0, 3.0}, zero, ComplexVector{1.0, 1.0});
    for (const auto& v : z.values()) {
        EXPECT_EQ(v, Complex(0.0));
    }
}

TEST(TensorQuadraticForm, SinglePageMatchesQuadraticForm)
{
    std::mt19937_64 g(9);
    const auto m = oracle::random_matrix(g, 4, 3);
    const auto wl = oracle::random_vector(g, 4);
    const auto wr = oracle::random_vector(g, 3);
    const auto r = tensor_quadratic_form(wl, ComplexTensor3::from_pages({m}), wr);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0], quadratic_form(wl, m, wr));
}

TEST(TensorQuadraticForm, BitwiseEqualToPerPageCalls)
{
    std::mt19937_64 g(21);
    std::vector<ComplexMatrix> pages;
    for (int n = 0; n < 8; ++n) {
        pages.push_back(oracle::random_matrix(g, 5, 7));
    }
    const auto t = ComplexTensor3::from_pages(pages);
    const auto wl = oracle::random_vector(g, 5);
    const auto wr = oracle::random_vector(g, 7);
    for (auto k : {Kernel::reference, Kernel::optimized}) {
        const auto r = tensor_quadratic_form(wl, t, wr, k);
        for (std::size_t n = 0; n < pages.size(); ++n) {
            EXPECT_EQ(r[n], quadratic_form(wl, pages[n], wr, k));
        }
    }
}

TEST(TensorQuadraticForm, MismatchNamesPage)
{
    const ComplexTensor3 t(2, 2, 3);
    try {
        (void)tensor_quadratic_form(ComplexVector(3), t, ComplexVector(2));
        FAIL() << "expected DimensionError";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("page 0"), std::string::npos);
    }
}

TEST(TensorText, RoundTrip)
{
    std::mt19937_64 g(2);
    const auto t = ComplexTensor3::from_pages({oracle::random_matrix(g, 3, 2), oracle::random_matrix(g, 3, 2)});
    std::stringstream ss;
    write_text(ss, t);
    EXPECT_EQ(read_tensor_text(ss), t);

    const auto m = oracle::random_matrix(g, 2, 5);
    std::stringstream ms;
    write_text(ms, m);
    EXPECT_EQ(read_matrix_text(ms), m);

    std::stringstream bad("2 2 1\n1 0\n");
    EXPECT_THROW(read_tensor_text(bad), ConfigError);
}

}  // namespace

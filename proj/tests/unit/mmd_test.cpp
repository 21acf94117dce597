#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "chtn/errors.hpp"
#include "chtn/mmd.hpp"
#include "chtn/rng.hpp"

using namespace chtn;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double shift = 0.0) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal() + shift;
  return m;
}

}  // namespace

TEST(MedianHeuristic, HandEnumeration) {
  EXPECT_EQ(median_heuristic(Matrix{{0}, {1}, {3}}), 4.0);
}

TEST(MedianHeuristic, IdenticalRowsFallBack) {
  EXPECT_EQ(median_heuristic(Matrix{{2, 2}, {2, 2}, {2, 2}}), 1.0);
}

TEST(MedianHeuristic, SinglePair) {
  EXPECT_EQ(median_heuristic(Matrix{{0}, {2}}), 4.0);
}

TEST(MedianHeuristic, NeedsTwoRows) {
  EXPECT_THROW(median_heuristic(Matrix{{1, 2}}), InvalidArgument);
}

TEST(KernelSpec, Validation) {
  KernelSpec k;
  EXPECT_NO_THROW(k.validate());
  k.multipliers = {};
  EXPECT_THROW(k.validate(), InvalidArgument);
  k.multipliers = {1.0, -1.0};
  EXPECT_THROW(k.validate(), InvalidArgument);
  k.multipliers = {1.0};
  k.base_bandwidth_sq = 0.0;
  EXPECT_THROW(k.validate(), InvalidArgument);
}

TEST(Mmd2, IdenticalSamplesAreZero) {
  Rng rng(1);
  const Matrix a = random_matrix(rng, 6, 3);
  EXPECT_NEAR(mmd2_biased(a, a, KernelSpec{}).value, 0.0, 1e-12);
}

TEST(Mmd2, TwoSingletonClosedForm) {
  const KernelSpec k{0.5, {1.0}};
  EXPECT_NEAR(mmd2_biased(Matrix{{0}}, Matrix{{1}}, k).value, 2.0 - 2.0 * std::exp(-1.0), 1e-12);
}

TEST(Mmd2, MatchesBruteForce) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(rng, 2 + rng.below(6), 3);
    const Matrix b = random_matrix(rng, 2 + rng.below(6), 3, 0.5);
    const KernelSpec k{rng.uniform(0.3, 3.0), KernelSpec::default_multipliers()};
    EXPECT_NEAR(mmd2_biased(a, b, k).value,
                oracle::brute_force_mmd2(a, b, k.base_bandwidth_sq, k.multipliers), 1e-10);
  }
}

TEST(Mmd2, SymmetricAndNonNegative) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(rng, 4, 2);
    const Matrix b = random_matrix(rng, 5, 2);
    const KernelSpec k;
    const double ab = mmd2_biased(a, b, k).value;
    EXPECT_GE(ab, 0.0);
    EXPECT_EQ(ab, mmd2_biased(b, a, k).value);
  }
}

TEST(Mmd2, DimensionMismatchThrows) {
  EXPECT_THROW(mmd2_biased(Matrix(2, 2), Matrix(2, 3), KernelSpec{}), InvalidArgument);
  EXPECT_THROW(mmd2_biased(Matrix(0, 2), Matrix(2, 2), KernelSpec{}), InvalidArgument);
}

TEST(Mmd2Gradient, ZeroAtIdenticalSamples) {
  Rng rng(4);
  const Matrix a = random_matrix(rng, 5, 3);
  const auto g = mmd2_gradient(a, a, KernelSpec{});
  for (double v : g.wrt_a.values()) EXPECT_NEAR(v, 0.0, 1e-10);
  for (double v : g.wrt_b.values()) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Mmd2Gradient, MatchesFiniteDifferences) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    Matrix a = random_matrix(rng, 3, 2);
    Matrix b = random_matrix(rng, 3, 2, 0.7);
    const KernelSpec k{rng.uniform(0.5, 2.0), KernelSpec::default_multipliers()};
    const auto g = mmd2_gradient(a, b, k);
    auto f = [&] { return oracle::brute_force_mmd2(a, b, k.base_bandwidth_sq, k.multipliers); };
    EXPECT_LT(oracle::rel_error(g.wrt_a.values(), oracle::fd_gradient(f, a.values())), 1e-6);
    EXPECT_LT(oracle::rel_error(g.wrt_b.values(), oracle::fd_gradient(f, b.values())), 1e-6);
  }
}

TEST(Mmd2Gradient, SwapSwapsBlocks) {
  Rng rng(6);
  const Matrix a = random_matrix(rng, 3, 2);
  const Matrix b = random_matrix(rng, 4, 2);
  const auto ab = mmd2_gradient(a, b, KernelSpec{});
  const auto ba = mmd2_gradient(b, a, KernelSpec{});
  for (std::size_t i = 0; i < ab.wrt_a.size(); ++i)
    EXPECT_NEAR(ab.wrt_a.values()[i], ba.wrt_b.values()[i], 1e-15);
  for (std::size_t i = 0; i < ab.wrt_b.size(); ++i)
    EXPECT_NEAR(ab.wrt_b.values()[i], ba.wrt_a.values()[i], 1e-15);
}

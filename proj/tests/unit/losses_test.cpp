#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "chtn/errors.hpp"
#include "chtn/losses.hpp"
#include "chtn/mmd.hpp"
#include "chtn/rng.hpp"

using namespace chtn;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double sd = 1.0) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.normal(0.0, sd);
  return m;
}

Labels random_labels(Rng& rng, std::size_t n, std::size_t c) {
  Labels y(n);
  for (auto& v : y) v = rng.below(c);
  return y;
}

}  // namespace

TEST(SoftmaxLoss, UniformLogits) {
  const Matrix z(3, 10, 0.25);
  const Labels y{0, 4, 9};
  EXPECT_NEAR(softmax_supervision_loss(z, y).value, std::log(10.0), 1e-12);
}

TEST(SoftmaxLoss, Saturation) {
  Matrix z(1, 3);
  z(0, 1) = 50.0;
  const Labels y{1};
  EXPECT_LT(softmax_supervision_loss(z, y).value, 1e-20);
}

TEST(SoftmaxLoss, MatchesLonghandAndGradient) {
  Rng rng(1);
  Matrix z = random_matrix(rng, 4, 3, 2.0);
  const Labels y = random_labels(rng, 4, 3);
  auto f = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) s += oracle::row_cross_entropy(z.row(i), y[i]);
    return s / static_cast<double>(z.rows());
  };
  const auto loss = softmax_supervision_loss(z, y);
  EXPECT_NEAR(loss.value, f(), 1e-13);
  EXPECT_LT(oracle::rel_error(loss.grad_logits.values(), oracle::fd_gradient(f, z.values())), 1e-7);
}

TEST(SoftmaxLoss, RejectsBadLabels) {
  const Matrix z(2, 3);
  EXPECT_THROW(softmax_supervision_loss(z, Labels{0, 3}), InvalidArgument);
  EXPECT_THROW(softmax_supervision_loss(z, Labels{0}), InvalidArgument);
}

TEST(CrossPairLoss, AlignedIsZero) {
  Rng rng(2);
  const Matrix a = random_matrix(rng, 3, 4);
  EXPECT_EQ(cross_pair_loss(a, a).value, 0.0);
}

TEST(CrossPairLoss, HandEvaluation) {
  EXPECT_EQ(cross_pair_loss(Matrix{{0, 0}}, Matrix{{3, 4}}).value, 25.0);
}

TEST(CrossPairLoss, HomogeneousOfDegreeTwo) {
  Rng rng(3);
  const Matrix a = random_matrix(rng, 3, 4);
  const Matrix b = random_matrix(rng, 3, 4);
  EXPECT_NEAR(cross_pair_loss(2.0 * a, 2.0 * b).value, 4.0 * cross_pair_loss(a, b).value, 1e-12);
}

TEST(CrossPairLoss, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  Matrix a = random_matrix(rng, 3, 2);
  Matrix b = random_matrix(rng, 3, 2);
  auto f = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += oracle::sq_dist(a, i, b, i);
    return s;
  };
  const auto l = cross_pair_loss(a, b);
  EXPECT_LT(oracle::rel_error(l.grad_img.values(), oracle::fd_gradient(f, a.values())), 1e-7);
  EXPECT_LT(oracle::rel_error(l.grad_txt.values(), oracle::fd_gradient(f, b.values())), 1e-7);
}

TEST(CrossPairLoss, ShapeMismatchThrows) {
  EXPECT_THROW(cross_pair_loss(Matrix(2, 2), Matrix(3, 2)), InvalidArgument);
}

TEST(CorrelationLoss, UniformBothModalities) {
  const Matrix z(4, 20);
  const Labels y{0, 5, 10, 19};
  EXPECT_NEAR(correlation_loss(z, z, y).value, 2.0 * std::log(20.0), 1e-12);
}

TEST(CorrelationLoss, IdenticalInputsDoubleSupervision) {
  Rng rng(5);
  const Matrix z = random_matrix(rng, 5, 4, 3.0);
  const Labels y = random_labels(rng, 5, 4);
  EXPECT_EQ(correlation_loss(z, z, y).value, 2.0 * softmax_supervision_loss(z, y).value);
}

TEST(CorrelationLoss, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  Matrix zi = random_matrix(rng, 3, 4);
  Matrix zt = random_matrix(rng, 3, 4);
  const Labels y = random_labels(rng, 3, 4);
  auto f = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      s += oracle::row_cross_entropy(zi.row(i), y[i]) + oracle::row_cross_entropy(zt.row(i), y[i]);
    return s / 3.0;
  };
  const auto l = correlation_loss(zi, zt, y);
  EXPECT_NEAR(l.value, f(), 1e-13);
  EXPECT_LT(oracle::rel_error(l.grad_img.values(), oracle::fd_gradient(f, zi.values())), 1e-7);
  EXPECT_LT(oracle::rel_error(l.grad_txt.values(), oracle::fd_gradient(f, zt.values())), 1e-7);
}

TEST(SingleModalLoss, IdenticalListsAreZero) {
  Rng rng(7);
  const std::vector<Matrix> acts{random_matrix(rng, 4, 3), random_matrix(rng, 4, 2)};
  EXPECT_NEAR(single_modal_loss(acts, acts, KernelSpec{}), 0.0, 1e-12);
}

TEST(SingleModalLoss, OneLayerIsMmd) {
  Rng rng(8);
  const std::vector<Matrix> s{random_matrix(rng, 4, 3)};
  const std::vector<Matrix> t{random_matrix(rng, 5, 3)};
  const KernelSpec k{1.7, KernelSpec::default_multipliers()};
  EXPECT_EQ(single_modal_loss(s, t, k), mmd2_biased(s[0], t[0], k).value);
}

TEST(SingleModalLoss, TwoLayersAdd) {
  Rng rng(9);
  const std::vector<Matrix> s{random_matrix(rng, 4, 3), random_matrix(rng, 4, 2)};
  const std::vector<Matrix> t{random_matrix(rng, 4, 3), random_matrix(rng, 4, 2)};
  const KernelSpec k;
  EXPECT_NEAR(single_modal_loss(s, t, k),
              mmd2_biased(s[0], t[0], k).value + mmd2_biased(s[1], t[1], k).value, 1e-12);
  const std::vector<KernelSpec> ks{KernelSpec{0.5, {1.0}}, KernelSpec{2.0, {1.0, 2.0}}};
  EXPECT_NEAR(single_modal_loss(s, t, ks),
              mmd2_biased(s[0], t[0], ks[0]).value + mmd2_biased(s[1], t[1], ks[1]).value, 1e-12);
}

TEST(SingleModalLoss, LayerCountMismatchThrows) {
  const std::vector<Matrix> s{Matrix(2, 2)};
  const std::vector<Matrix> t{Matrix(2, 2), Matrix(2, 2)};
  EXPECT_THROW(single_modal_loss(s, t, KernelSpec{}), InvalidArgument);
}

TEST(LossWeights, Defaults) {
  const LossWeights w;
  EXPECT_EQ(w.single, 1.0);
  EXPECT_EQ(w.source, 1.0);
  EXPECT_EQ(w.cross, 0.001);
  EXPECT_EQ(w.correlation, 1.0);
  LossWeights bad;
  bad.cross = -1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

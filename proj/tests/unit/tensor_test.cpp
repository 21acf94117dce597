#include <gtest/gtest.h>

#include <cmath>

#include "chtn/errors.hpp"
#include "chtn/rng.hpp"
#include "chtn/tensor.hpp"

using namespace chtn;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(matmul(Matrix::identity(2), a), a);
}

TEST(Matmul, HandArithmetic) {
  const Matrix r = matmul(Matrix{{1, 2}}, Matrix{{3}, {4}});
  ASSERT_EQ(r.rows(), 1u);
  ASSERT_EQ(r.cols(), 1u);
  EXPECT_EQ(r(0, 0), 11.0);
}

TEST(Matmul, ZeroAnnihilates) {
  const Matrix r = matmul(Matrix(2, 3), Matrix{{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(r, Matrix(2, 2));
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), InvalidArgument);
  EXPECT_THROW(matmul_nt(Matrix(2, 3), Matrix(2, 2)), InvalidArgument);
  EXPECT_THROW(matmul_tn(Matrix(2, 3), Matrix(3, 2)), InvalidArgument);
}

TEST(Matmul, TransposedVariantsAgree) {
  Rng rng(3);
  Matrix a(3, 4), b(5, 4), c(3, 2);
  for (double& v : a.values()) v = rng.normal();
  for (double& v : b.values()) v = rng.normal();
  for (double& v : c.values()) v = rng.normal();
  const Matrix nt = matmul_nt(a, b);
  const Matrix ref = matmul(a, transpose(b));
  for (std::size_t i = 0; i < nt.size(); ++i) EXPECT_NEAR(nt.values()[i], ref.values()[i], 1e-14);
  const Matrix tn = matmul_tn(a, c);
  const Matrix ref2 = matmul(transpose(a), c);
  for (std::size_t i = 0; i < tn.size(); ++i) EXPECT_NEAR(tn.values()[i], ref2.values()[i], 1e-14);
}

TEST(Relu, Definition) {
  EXPECT_EQ(relu(Matrix{{-1, 0, 2}}), (Matrix{{0, 0, 2}}));
}

TEST(Relu, BackwardMasks) {
  EXPECT_EQ(relu_backward(Matrix{{-1, 2}}, Matrix{{5, 5}}), (Matrix{{0, 5}}));
}

TEST(Relu, Idempotent) {
  const Matrix x{{-3, 0.5, 0, 7, -0.1}};
  EXPECT_EQ(relu(relu(x)), relu(x));
}

TEST(LogSoftmax, UniformLogits) {
  const std::vector<double> z(10, 0.7);
  for (double v : log_softmax(z)) EXPECT_NEAR(v, -std::log(10.0), 1e-12);
}

TEST(LogSoftmax, ShiftInvariant) {
  const std::vector<double> z{0.3, -1.2, 2.5};
  std::vector<double> shifted = z;
  for (double& v : shifted) v += 123.0;
  const auto a = log_softmax(z);
  const auto b = log_softmax(shifted);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(LogSoftmax, HandEvaluation) {
  const auto r = log_softmax(std::vector<double>{0.0, std::log(3.0)});
  EXPECT_NEAR(r[0], -std::log(4.0), 1e-15);
  EXPECT_NEAR(r[1], std::log(3.0) - std::log(4.0), 1e-15);
}

TEST(LogSoftmax, StableForLargeLogits) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> z(7);
    for (double& v : z) v = rng.uniform(-1e3, 1e3);
    double s = 0.0;
    for (double v : log_softmax(z)) {
      ASSERT_TRUE(std::isfinite(v));
      s += std::exp(v);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(LogSoftmax, EmptyThrows) {
  EXPECT_THROW(log_softmax(std::vector<double>{}), InvalidArgument);
}

TEST(Cosine, Cases) {
  const std::vector<double> u{0.3, -2.0, 5.0};
  EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(std::vector<double>{1, 2}, std::vector<double>{2, 4}), 1.0, 1e-15);
}

TEST(Cosine, ZeroVectorIsDegenerate) {
  EXPECT_THROW(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}),
               DegenerateInput);
}

TEST(Cosine, BoundedAndSymmetric) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> u(4), v(4);
    for (double& x : u) x = rng.normal();
    for (double& x : v) x = rng.normal();
    const double c = cosine_similarity(u, v);
    EXPECT_LE(std::abs(c), 1.0);
    EXPECT_EQ(c, cosine_similarity(v, u));
  }
}

TEST(Helpers, RowOps) {
  Matrix x{{1, 2}, {3, 4}, {5, 6}};
  add_row_vector(x, std::vector<double>{10, 20});
  EXPECT_EQ(x, (Matrix{{11, 22}, {13, 24}, {15, 26}}));
  EXPECT_EQ(column_sums(x), (std::vector<double>{39, 72}));
  const std::vector<std::size_t> idx{2, 0};
  EXPECT_EQ(gather_rows(x, idx), (Matrix{{15, 26}, {11, 22}}));
  EXPECT_EQ(vstack(Matrix{{1, 2}}, Matrix{{3, 4}}), (Matrix{{1, 2}, {3, 4}}));
  EXPECT_THROW(vstack(Matrix(1, 2), Matrix(1, 3)), InvalidArgument);
}

TEST(Helpers, SoftmaxRowsSumToOne) {
  Rng rng(2);
  Matrix z(6, 5);
  for (double& v : z.values()) v = rng.normal(0, 10);
  const Matrix p = softmax_rows(z);
  for (std::size_t r = 0; r < p.rows(); ++r) {
    double s = 0.0;
    for (double v : p.row(r)) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

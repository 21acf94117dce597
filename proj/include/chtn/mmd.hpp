#pragma once

#include <vector>

#include "chtn/tensor.hpp"

namespace chtn {

// Mixture of Gaussian kernels
//   k(x, y) = sum_s exp(-|x - y|^2 / (2 * s * base_bandwidth_sq))
// over the multipliers s.
struct KernelSpec {
  double base_bandwidth_sq = 1.0;
  std::vector<double> multipliers = default_multipliers();

  static std::vector<double> default_multipliers() { return {0.25, 0.5, 1.0, 2.0, 4.0}; }

  // Throws InvalidArgument unless every field is positive and finite.
  void validate() const;
  double operator()(std::span<const double> x, std::span<const double> y) const;
};

struct MmdValue {
  double value = 0.0;
};

struct MmdGradient {
  Matrix wrt_a;
  Matrix wrt_b;
};

// Median of squared Euclidean distances over all unordered pairs of distinct
// rows. Falls back to the mean when the median is 0, and to 1 when that is 0
// too. Needs at least two rows.
double median_heuristic(const Matrix& samples);

// Biased (V-statistic) estimate of the squared MMD between the row samples
// `a` and `b`. Clamped at 0.
MmdValue mmd2_biased(const Matrix& a, const Matrix& b, const KernelSpec& kernel);

// Gradient of mmd2_biased with respect to every entry of `a` and `b`. The
// clamp is ignored: this is the gradient of the unclamped estimator.
MmdGradient mmd2_gradient(const Matrix& a, const Matrix& b, const KernelSpec& kernel);

}  // namespace chtn

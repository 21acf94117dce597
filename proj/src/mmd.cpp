#include "chtn/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chtn/errors.hpp"

namespace chtn {
namespace {

void check_inputs(const Matrix& a, const Matrix& b, const KernelSpec& kernel,
                  const char* op) {
  kernel.validate();
  if (a.rows() == 0 || b.rows() == 0) {
    throw InvalidArgument(std::string(op) + ": empty sample");
  }
  if (a.cols() != b.cols()) {
    throw InvalidArgument(std::string(op) + ": dimension mismatch " +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
  }
}

// Kernel value and d k / d (|x-y|^2) at a given squared distance.
struct KernelAt {
  double value = 0.0;
  double slope = 0.0;
};

KernelAt kernel_at(double dist_sq, const KernelSpec& kernel) {
  KernelAt out;
  for (double s : kernel.multipliers) {
    const double width = 2.0 * s * kernel.base_bandwidth_sq;
    const double e = std::exp(-dist_sq / width);
    out.value += e;
    out.slope -= e / width;
  }
  return out;
}

double mean_kernel(const Matrix& x, const Matrix& y, const KernelSpec& kernel) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j)
      sum += kernel_at(squared_distance(x.row(i), y.row(j)), kernel).value;
  return sum / (static_cast<double>(x.rows()) * static_cast<double>(y.rows()));
}

// Adds coef * sum_j dk(x_i, y_j)/dx_i to grad row i, for all i.
void accumulate_pair_gradient(const Matrix& x, const Matrix& y, const KernelSpec& kernel,
                              double coef, Matrix& grad) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto xi = x.row(i);
    auto gi = grad.row(i);
    for (std::size_t j = 0; j < y.rows(); ++j) {
      auto yj = y.row(j);
      // d k / d x = slope * 2 (x - y)
      const double w = coef * 2.0 * kernel_at(squared_distance(xi, yj), kernel).slope;
      if (w == 0.0) continue;
      for (std::size_t d = 0; d < xi.size(); ++d) gi[d] += w * (xi[d] - yj[d]);
    }
  }
}

}  // namespace

void KernelSpec::validate() const {
  if (!(base_bandwidth_sq > 0.0) || !std::isfinite(base_bandwidth_sq)) {
    throw InvalidArgument("KernelSpec: base_bandwidth_sq must be positive and finite");
  }
  if (multipliers.empty()) throw InvalidArgument("KernelSpec: no multipliers");
  for (double s : multipliers) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("KernelSpec: multipliers must be positive and finite");
    }
  }
}

double KernelSpec::operator()(std::span<const double> x, std::span<const double> y) const {
  return kernel_at(squared_distance(x, y), *this).value;
}

double median_heuristic(const Matrix& samples) {
  const std::size_t n = samples.rows();
  if (n < 2) throw InvalidArgument("median_heuristic: need at least 2 samples");
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dists.push_back(squared_distance(samples.row(i), samples.row(j)));

  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  double median = dists.size() % 2 == 1 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
  if (median > 0.0) return median;

  double mean = 0.0;
  for (double d : dists) mean += d;
  mean /= static_cast<double>(dists.size());
  return mean > 0.0 ? mean : 1.0;
}

MmdValue mmd2_biased(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
  check_inputs(a, b, kernel, "mmd2_biased");
  // Canonical argument order keeps the summation order, and therefore the
  // rounded result, identical under mmd2(a, b) vs mmd2(b, a).
  const bool a_first = a.rows() != b.rows() ? a.rows() < b.rows() : a.data() <= b.data();
  const Matrix& x = a_first ? a : b;
  const Matrix& y = a_first ? b : a;
  const double xx = mean_kernel(x, x, kernel);
  const double yy = mean_kernel(y, y, kernel);
  const double xy = mean_kernel(x, y, kernel);
  return {std::max(0.0, xx + yy - 2.0 * xy)};
}

MmdGradient mmd2_gradient(const Matrix& a, const Matrix& b, const KernelSpec& kernel) {
  check_inputs(a, b, kernel, "mmd2_gradient");
  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(b.rows());
  MmdGradient g{Matrix(a.rows(), a.cols()), Matrix(b.rows(), b.cols())};
  // Each self term sees x_i once as the first and once as the second
  // argument, hence the factor 2.
  accumulate_pair_gradient(a, a, kernel, 2.0 / (m * m), g.wrt_a);
  accumulate_pair_gradient(a, b, kernel, -2.0 / (m * n), g.wrt_a);
  accumulate_pair_gradient(b, b, kernel, 2.0 / (n * n), g.wrt_b);
  accumulate_pair_gradient(b, a, kernel, -2.0 / (m * n), g.wrt_b);
  return g;
}

}  // namespace chtn

#pragma once

// Reference implementations used only by the tests. Each is written
// directly from the definition, with no shared code from the library beyond
// the Matrix container.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "chtn/tensor.hpp"

namespace chtn::oracle {

inline double sq_dist(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double d = a(i, k) - b(j, k);
    s += d * d;
  }
  return s;
}

inline double mixture_kernel(double d2, double sigma_sq, const std::vector<double>& mults) {
  double k = 0.0;
  for (double s : mults) k += std::exp(-d2 / (2.0 * s * sigma_sq));
  return k;
}

// Double loop over every (i, j) of each of the three blocks.
inline double brute_force_mmd2(const Matrix& a, const Matrix& b, double sigma_sq,
                               const std::vector<double>& mults) {
  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(b.rows());
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) aa += mixture_kernel(sq_dist(a, i, a, j), sigma_sq, mults);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) bb += mixture_kernel(sq_dist(b, i, b, j), sigma_sq, mults);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) ab += mixture_kernel(sq_dist(a, i, b, j), sigma_sq, mults);
  return aa / (m * m) + bb / (n * n) - 2.0 * ab / (m * n);
}

// AP by recounting the relevant prefix at every hit: O(n^2).
inline double naive_ap(const std::vector<int>& rel) {
  const int total = std::count(rel.begin(), rel.end(), 1);
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < rel.size(); ++k) {
    if (!rel[k]) continue;
    int hits = 0;
    for (std::size_t j = 0; j <= k; ++j) hits += rel[j];
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / total;
}

inline double naive_cosine(std::span<const double> u, std::span<const double> v) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

// Selection sort on similarity, descending; ties keep the lower index.
inline std::vector<std::size_t> naive_rank(std::span<const double> q, const Matrix& gallery) {
  std::vector<double> sim(gallery.rows());
  for (std::size_t i = 0; i < gallery.rows(); ++i) sim[i] = naive_cosine(q, gallery.row(i));
  std::vector<std::size_t> order;
  std::vector<bool> used(gallery.rows(), false);
  for (std::size_t r = 0; r < gallery.rows(); ++r) {
    std::size_t best = gallery.rows();
    for (std::size_t i = 0; i < gallery.rows(); ++i) {
      if (used[i]) continue;
      if (best == gallery.rows() || sim[i] > sim[best]) best = i;
    }
    used[best] = true;
    order.push_back(best);
  }
  return order;
}

// Naive MAP over all queries with at least one relevant gallery item.
inline double naive_map(const Matrix& queries, const std::vector<std::size_t>& qy,
                        const Matrix& gallery, const std::vector<std::size_t>& gy) {
  double sum = 0.0;
  int counted = 0;
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto order = naive_rank(queries.row(q), gallery);
    std::vector<int> rel;
    for (auto i : order) rel.push_back(gy[i] == qy[q] ? 1 : 0);
    if (std::count(rel.begin(), rel.end(), 1) == 0) continue;
    sum += naive_ap(rel);
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

// Central differences of f with respect to every entry of `values`.
inline std::vector<double> fd_gradient(const std::function<double()>& f, std::span<double> values,
                                       double h = 1e-5) {
  std::vector<double> g(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = f();
    values[i] = saved - h;
    const double down = f();
    values[i] = saved;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// |a - n| / max(|a|, |n|), 0 for two zero vectors.
inline double rel_error(std::span<const double> a, std::span<const double> n) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - n[i]) * (a[i] - n[i]);
    na += a[i] * a[i];
    nn += n[i] * n[i];
  }
  const double scale = std::sqrt(std::max(na, nn));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

// Log-sum-exp cross-entropy for one row, written out longhand.
inline double row_cross_entropy(std::span<const double> z, std::size_t label) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : z) s += std::exp(v - mx);
  return -(z[label] - mx - std::log(s));
}

}  // namespace chtn::oracle

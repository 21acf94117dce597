#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "chtn/network.hpp"
#include "chtn/objective.hpp"

namespace chtn {

// Toy problem for comparing analytic gradients with central differences.
struct GradcheckSpec {
  std::size_t d_src = 4;
  std::size_t d_img = 4;
  std::size_t d_txt = 3;
  std::size_t hidden = 4;
  std::size_t c_src = 3;
  std::size_t c_tgt = 3;
  std::size_t batch = 3;
  Ablation ablation = Ablation::Full;

  static constexpr std::size_t kMaxParameters = 5000;
};

// Parses "key=value,key=value" over the GradcheckSpec field names plus
// "ablation". Empty text gives the defaults.
GradcheckSpec parse_gradcheck_dims(const std::string& text);

// Vector relative error |a - n| / max(|a|, |n|) of one parameter tensor,
// 0 when both are exactly zero.
struct BlockError {
  std::string block;
  double rel_error = 0.0;
};

struct TermReport {
  std::string term;  // single, source, cross, correlation, total
  double max_rel_error = 0.0;
  std::string worst_block;
  std::vector<BlockError> blocks;
};

struct GradcheckReport {
  std::vector<TermReport> terms;
  std::size_t parameter_count = 0;

  double max_rel_error() const;
  // "term/block" with the largest error.
  std::string worst() const;
};

// A random toy instance: parameters with perturbed biases, random features
// and labels, and fixed median-heuristic kernels.
struct GradcheckProblem {
  Params params;
  Batch batch;
  LayerKernels kernels;
};
GradcheckProblem make_gradcheck_problem(const GradcheckSpec& spec, std::uint64_t seed);

// Checks each loss term in isolation (unit weight, others 0) and the
// weighted total with default weights. `corrupt` scales the analytic
// gradient by (1 + corrupt) as a negative control.
GradcheckReport run_gradcheck(const GradcheckSpec& spec, std::uint64_t seed,
                              double step = 1e-5, double corrupt = 0.0);

}  // namespace chtn

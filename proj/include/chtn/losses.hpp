#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chtn/mmd.hpp"
#include "chtn/tensor.hpp"

namespace chtn {

using Labels = std::vector<std::size_t>;

// Multipliers of the four training objectives. The cross-modal term is
// summed over pairs rather than averaged, so its default weight is small.
struct LossWeights {
  double single = 1.0;
  double source = 1.0;
  double cross = 0.001;
  double correlation = 1.0;

  void validate() const;
};

struct LossBreakdown {
  double single = 0.0;
  double source = 0.0;
  double cross = 0.0;
  double correlation = 0.0;
  double total = 0.0;

  // Fills `total` from the four terms.
  void combine(const LossWeights& w);
};

struct SoftmaxLoss {
  double value = 0.0;
  Matrix grad_logits;
};

struct PairLoss {
  double value = 0.0;
  Matrix grad_img;
  Matrix grad_txt;
};

// Mean negative log-likelihood of `labels` under row-wise softmax of
// `logits`, with its gradient (softmax - onehot) / batch.
SoftmaxLoss softmax_supervision_loss(const Matrix& logits, std::span<const std::size_t> labels);

// Sum over rows of |img_p - txt_p|^2. Row p of both matrices must come from
// the same image/text pair.
PairLoss cross_pair_loss(const Matrix& img_act, const Matrix& txt_act);

// Softmax loss of the image logits plus that of the text logits, both
// against the shared pair labels.
PairLoss correlation_loss(const Matrix& img_logits, const Matrix& txt_logits,
                          std::span<const std::size_t> labels);

// Sum over layers of mmd2_biased(src_acts[l], tgt_acts[l]).
double single_modal_loss(std::span<const Matrix> src_acts, std::span<const Matrix> tgt_acts,
                         const KernelSpec& kernel);
// Same with a separate kernel per layer.
double single_modal_loss(std::span<const Matrix> src_acts, std::span<const Matrix> tgt_acts,
                         std::span<const KernelSpec> kernels);

}  // namespace chtn

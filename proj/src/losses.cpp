#include "chtn/losses.hpp"

#include <cmath>
#include <string>

#include "chtn/errors.hpp"

namespace chtn {

void LossWeights::validate() const {
  for (double w : {single, source, cross, correlation}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("LossWeights: weights must be finite and non-negative");
    }
  }
}

void LossBreakdown::combine(const LossWeights& w) {
  total = w.single * single + w.source * source + w.cross * cross +
          w.correlation * correlation;
}

SoftmaxLoss softmax_supervision_loss(const Matrix& logits,
                                     std::span<const std::size_t> labels) {
  const std::size_t batch = logits.rows();
  if (batch == 0) throw InvalidArgument("softmax_supervision_loss: empty batch");
  if (labels.size() != batch) {
    throw InvalidArgument("softmax_supervision_loss: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(batch) + " rows");
  }
  const double inv_batch = 1.0 / static_cast<double>(batch);
  SoftmaxLoss out{0.0, Matrix(batch, logits.cols())};
  for (std::size_t i = 0; i < batch; ++i) {
    if (labels[i] >= logits.cols()) {
      throw InvalidArgument("softmax_supervision_loss: label " + std::to_string(labels[i]) +
                            " out of range [0, " + std::to_string(logits.cols()) + ")");
    }
    const auto log_p = log_softmax(logits.row(i));
    out.value -= log_p[labels[i]];
    auto g = out.grad_logits.row(i);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = std::exp(log_p[j]) * inv_batch;
    g[labels[i]] -= inv_batch;
  }
  out.value *= inv_batch;
  return out;
}

PairLoss cross_pair_loss(const Matrix& img_act, const Matrix& txt_act) {
  if (!img_act.same_shape(txt_act)) {
    throw InvalidArgument("cross_pair_loss: shape mismatch " + std::to_string(img_act.rows()) +
                          "x" + std::to_string(img_act.cols()) + " vs " +
                          std::to_string(txt_act.rows()) + "x" + std::to_string(txt_act.cols()));
  }
  PairLoss out{0.0, img_act - txt_act, Matrix()};
  for (double d : out.grad_img.values()) out.value += d * d;
  out.grad_img *= 2.0;
  out.grad_txt = out.grad_img * -1.0;
  return out;
}

PairLoss correlation_loss(const Matrix& img_logits, const Matrix& txt_logits,
                          std::span<const std::size_t> labels) {
  if (img_logits.rows() != txt_logits.rows()) {
    throw InvalidArgument("correlation_loss: image and text batches differ in size");
  }
  auto img = softmax_supervision_loss(img_logits, labels);
  auto txt = softmax_supervision_loss(txt_logits, labels);
  return {img.value + txt.value, std::move(img.grad_logits), std::move(txt.grad_logits)};
}

double single_modal_loss(std::span<const Matrix> src_acts, std::span<const Matrix> tgt_acts,
                         const KernelSpec& kernel) {
  std::vector<KernelSpec> kernels(src_acts.size(), kernel);
  return single_modal_loss(src_acts, tgt_acts, kernels);
}

double single_modal_loss(std::span<const Matrix> src_acts, std::span<const Matrix> tgt_acts,
                         std::span<const KernelSpec> kernels) {
  if (src_acts.size() != tgt_acts.size() || kernels.size() != src_acts.size()) {
    throw InvalidArgument("single_modal_loss: layer lists differ in length");
  }
  double total = 0.0;
  for (std::size_t l = 0; l < src_acts.size(); ++l) {
    total += mmd2_biased(src_acts[l], tgt_acts[l], kernels[l]).value;
  }
  return total;
}

}  // namespace chtn

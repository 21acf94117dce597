#pragma once

#include <optional>
#include <vector>

#include "chtn/losses.hpp"
#include "chtn/mmd.hpp"
#include "chtn/network.hpp"

namespace chtn {

// One minibatch from each stream. Row p of img_x and txt_x belong to the
// same target pair and share tgt_y[p].
struct Batch {
  Matrix src_x;
  Labels src_y;
  Matrix img_x;
  Matrix txt_x;
  Labels tgt_y;
};

// MMD kernels for the fc6 and fc7 layer pairs.
struct LayerKernels {
  KernelSpec fc6;
  KernelSpec fc7;
};

// Forward pass of every active pathway on one batch, and the weighted joint
// objective on top of it.
//
// Gradient accumulation order is fixed (source supervision, MMD, cross-modal,
// correlation; then source, image, text traces) so results are reproducible.
class Objective {
 public:
  Objective(const Params& params, const Batch& batch);

  // Median-heuristic bandwidths computed on the pooled source and target
  // image activations of each layer. Only meaningful when the source
  // pathway is active; otherwise returns unit bandwidths.
  LayerKernels median_kernels(const std::vector<double>& multipliers) const;

  // Loss values; fills `grads` (zeroed first) when non-null. Terms removed by
  // the ablation are reported as 0 and contribute no gradient.
  LossBreakdown evaluate(const LayerKernels& kernels, const LossWeights& weights,
                         Gradients* grads = nullptr) const;

  const std::optional<ForwardTrace>& source_trace() const { return source_; }
  const ForwardTrace& image_trace() const { return image_; }
  const ForwardTrace& text_trace() const { return text_; }

 private:
  const Params& params_;
  const Batch& batch_;
  std::optional<ForwardTrace> source_;
  ForwardTrace image_;
  ForwardTrace text_;
};

// Convenience wrappers.
LossBreakdown objective_value(const Params& params, const Batch& batch,
                              const LayerKernels& kernels, const LossWeights& weights);
LossBreakdown objective_gradients(const Params& params, const Batch& batch,
                                  const LayerKernels& kernels, const LossWeights& weights,
                                  Gradients& grads);

}  // namespace chtn

#include "chtn/objective.hpp"

#include "chtn/errors.hpp"

namespace chtn {

Objective::Objective(const Params& params, const Batch& batch)
    : params_(params),
      batch_(batch),
      image_(forward_target(batch.img_x, Modality::Image, params)),
      text_(forward_target(batch.txt_x, Modality::Text, params)) {
  if (batch.img_x.rows() != batch.txt_x.rows() || batch.tgt_y.size() != batch.img_x.rows()) {
    throw InvalidArgument("Objective: target image, text and labels must be row-aligned");
  }
  if (params.config.uses_source_pathway()) {
    if (batch.src_y.size() != batch.src_x.rows()) {
      throw InvalidArgument("Objective: source features and labels differ in length");
    }
    source_ = forward_source(batch.src_x, params);
  }
}

LayerKernels Objective::median_kernels(const std::vector<double>& multipliers) const {
  LayerKernels k;
  k.fc6.multipliers = multipliers;
  k.fc7.multipliers = multipliers;
  if (source_) {
    k.fc6.base_bandwidth_sq = median_heuristic(vstack(source_->h6, image_.h6));
    k.fc7.base_bandwidth_sq = median_heuristic(vstack(source_->h7, image_.h7));
  }
  return k;
}

LossBreakdown Objective::evaluate(const LayerKernels& kernels, const LossWeights& weights,
                                  Gradients* grads) const {
  weights.validate();
  const NetworkConfig& cfg = params_.config;
  LossBreakdown out;

  TraceGrads src_up, img_up, txt_up;

  if (source_ && cfg.uses_source_loss()) {
    auto sup = softmax_supervision_loss(source_->logits, batch_.src_y);
    out.source = sup.value;
    if (grads) src_up.d_logits = std::move(sup.grad_logits) * weights.source;
  }

  if (source_) {
    out.single = mmd2_biased(source_->h6, image_.h6, kernels.fc6).value +
                 mmd2_biased(source_->h7, image_.h7, kernels.fc7).value;
    if (grads) {
      auto g6 = mmd2_gradient(source_->h6, image_.h6, kernels.fc6);
      auto g7 = mmd2_gradient(source_->h7, image_.h7, kernels.fc7);
      src_up.d_h6 = std::move(g6.wrt_a) * weights.single;
      src_up.d_h7 = std::move(g7.wrt_a) * weights.single;
      img_up.d_h6 = std::move(g6.wrt_b) * weights.single;
      img_up.d_h7 = std::move(g7.wrt_b) * weights.single;
    }
  }

  {
    auto c6 = cross_pair_loss(image_.h6, text_.h6);
    auto c7 = cross_pair_loss(image_.h7, text_.h7);
    out.cross = c6.value + c7.value;
    if (grads) {
      auto add = [](Matrix& dst, Matrix g) {
        if (dst.empty()) dst = std::move(g);
        else dst += g;
      };
      add(img_up.d_h6, std::move(c6.grad_img) * weights.cross);
      add(img_up.d_h7, std::move(c7.grad_img) * weights.cross);
      txt_up.d_h6 = std::move(c6.grad_txt) * weights.cross;
      txt_up.d_h7 = std::move(c7.grad_txt) * weights.cross;
    }
  }

  {
    auto corr = correlation_loss(image_.logits, text_.logits, batch_.tgt_y);
    out.correlation = corr.value;
    if (grads) {
      img_up.d_logits = std::move(corr.grad_img) * weights.correlation;
      txt_up.d_logits = std::move(corr.grad_txt) * weights.correlation;
    }
  }

  out.combine(weights);

  if (grads) {
    *grads = ParamSet::zeros(cfg);
    if (source_) backward(*source_, src_up, params_, *grads);
    backward(image_, img_up, params_, *grads);
    backward(text_, txt_up, params_, *grads);
  }
  return out;
}

LossBreakdown objective_value(const Params& params, const Batch& batch,
                              const LayerKernels& kernels, const LossWeights& weights) {
  return Objective(params, batch).evaluate(kernels, weights);
}

LossBreakdown objective_gradients(const Params& params, const Batch& batch,
                                  const LayerKernels& kernels, const LossWeights& weights,
                                  Gradients& grads) {
  return Objective(params, batch).evaluate(kernels, weights, &grads);
}

}  // namespace chtn

#include "chtn/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "chtn/errors.hpp"

namespace chtn {
namespace {

void glorot_uniform(Affine& layer, Rng& rng) {
  const double fan_out = static_cast<double>(layer.weight.rows());
  const double fan_in = static_cast<double>(layer.weight.cols());
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& w : layer.weight.values()) w = rng.uniform(-limit, limit);
  std::fill(layer.bias.values().begin(), layer.bias.values().end(), 0.0);
}

const PathwayParams& target_pathway(const Params& params, Modality modality) {
  return modality == Modality::Image ? params.values.image : params.values.text;
}

PathwayParams& pathway_grads(Gradients& grads, Pathway p) {
  switch (p) {
    case Pathway::Source: return grads.source;
    case Pathway::TargetImage: return grads.image;
    case Pathway::TargetText: return grads.text;
  }
  throw InvalidState("unknown pathway");
}

const PathwayParams& pathway_params(const Params& params, Pathway p) {
  switch (p) {
    case Pathway::Source: return params.values.source;
    case Pathway::TargetImage: return params.values.image;
    case Pathway::TargetText: return params.values.text;
  }
  throw InvalidState("unknown pathway");
}

// Accumulates weight/bias gradients for y = x W^T + b and returns dL/dx.
Matrix affine_backward(const Affine& layer, const Matrix& x, const Matrix& dy, Affine& grad,
                       bool need_input_grad = true) {
  grad.weight += matmul_tn(dy, x);
  const auto db = column_sums(dy);
  auto gb = grad.bias.values();
  for (std::size_t j = 0; j < db.size(); ++j) gb[j] += db[j];
  if (!need_input_grad) return {};
  return matmul(dy, layer.weight);
}

void add_if_present(Matrix& target, const Matrix& extra, const char* what) {
  if (extra.empty()) return;
  if (!target.same_shape(extra)) {
    throw InvalidState(std::string("backward: upstream ") + what + " shape does not match trace");
  }
  target += extra;
}

void run_pathway(const Matrix& x, const PathwayParams& p, ForwardTrace& t) {
  t.input = x;
  t.z6 = p.fc6.forward(x);
  t.h6 = relu(t.z6);
  t.z7 = p.fc7.forward(t.h6);
  t.h7 = relu(t.z7);
}

}  // namespace

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::Full: return "full";
    case Ablation::OnlyCross: return "only-cross";
    case Ablation::NoShare: return "no-share";
    case Ablation::NoSrcSp: return "no-src-sp";
  }
  return "unknown";
}

Ablation parse_ablation(std::string_view text) {
  std::string norm;
  for (char ch : text) {
    norm.push_back(ch == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  for (auto a : {Ablation::Full, Ablation::OnlyCross, Ablation::NoShare, Ablation::NoSrcSp}) {
    if (norm == to_string(a)) return a;
  }
  // CamelCase spellings used in result tables.
  if (norm == "onlycross") return Ablation::OnlyCross;
  if (norm == "noshare") return Ablation::NoShare;
  if (norm == "nosrcsp") return Ablation::NoSrcSp;
  throw InvalidArgument("unknown ablation '" + std::string(text) + "'");
}

void NetworkConfig::validate() const {
  if (d_img_src == 0 || d_img_tgt == 0 || d_txt == 0 || hidden == 0) {
    throw InvalidArgument("NetworkConfig: all dimensions must be >= 1");
  }
  if (c_src < 2 || c_tgt < 2) {
    throw InvalidArgument("NetworkConfig: class counts must be >= 2");
  }
}

Matrix Affine::forward(const Matrix& x) const {
  if (x.cols() != weight.cols()) {
    throw InvalidArgument("Affine: input has " + std::to_string(x.cols()) +
                          " columns, layer expects " + std::to_string(weight.cols()));
  }
  Matrix y = matmul_nt(x, weight);
  add_row_vector(y, bias.values());
  return y;
}

ParamSet ParamSet::zeros(const NetworkConfig& c) {
  ParamSet s;
  s.source = {Affine(c.hidden, c.d_img_src), Affine(c.hidden, c.hidden)};
  s.source_head = {Affine(c.c_src, c.hidden)};
  s.image = {Affine(c.hidden, c.d_img_tgt), Affine(c.hidden, c.hidden)};
  s.text = {Affine(c.hidden, c.d_txt), Affine(c.hidden, c.hidden)};
  s.shared = {Affine(c.hidden, c.hidden), Affine(c.hidden, c.hidden), Affine(c.c_tgt, c.hidden)};
  return s;
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

void Params::apply_sgd(const Gradients& grads, double lr) {
  std::vector<const Matrix*> g;
  grads.for_each([&](const std::string&, const Matrix& m) { g.push_back(&m); });
  std::size_t i = 0;
  values.for_each([&](const std::string& name, Matrix& m) {
    if (!m.same_shape(*g[i])) throw InvalidArgument("apply_sgd: gradient shape mismatch at " + name);
    auto pv = m.values();
    auto gv = g[i]->values();
    for (std::size_t k = 0; k < pv.size(); ++k) pv[k] -= lr * gv[k];
    ++i;
  });
  ++generation;
}

Params init_params(const NetworkConfig& config, Rng& rng) {
  config.validate();
  Params p{config, ParamSet::zeros(config), 0};
  auto& v = p.values;
  glorot_uniform(v.source.fc6, rng);
  glorot_uniform(v.source.fc7, rng);
  glorot_uniform(v.source_head.fc8s, rng);
  if (config.d_img_src == config.d_img_tgt) {
    v.image = v.source;
  } else {
    glorot_uniform(v.image.fc6, rng);
    glorot_uniform(v.image.fc7, rng);
  }
  glorot_uniform(v.text.fc6, rng);
  glorot_uniform(v.text.fc7, rng);
  glorot_uniform(v.shared.fc8, rng);
  glorot_uniform(v.shared.fc9, rng);
  glorot_uniform(v.shared.target_head, rng);
  return p;
}

ForwardTrace forward_source(const Matrix& x, const Params& params) {
  if (x.cols() != params.config.d_img_src) {
    throw InvalidArgument("forward_source: expected " + std::to_string(params.config.d_img_src) +
                          " input columns, got " + std::to_string(x.cols()));
  }
  ForwardTrace t;
  t.pathway = Pathway::Source;
  t.generation = params.generation;
  run_pathway(x, params.values.source, t);
  t.logits = params.values.source_head.fc8s.forward(t.h7);
  return t;
}

ForwardTrace forward_target(const Matrix& x, Modality modality, const Params& params) {
  const std::size_t expected =
      modality == Modality::Image ? params.config.d_img_tgt : params.config.d_txt;
  if (x.cols() != expected) {
    throw InvalidArgument(std::string("forward_target(") +
                          (modality == Modality::Image ? "image" : "text") + "): expected " +
                          std::to_string(expected) + " input columns, got " +
                          std::to_string(x.cols()));
  }
  ForwardTrace t;
  t.pathway = modality == Modality::Image ? Pathway::TargetImage : Pathway::TargetText;
  t.generation = params.generation;
  run_pathway(x, target_pathway(params, modality), t);
  const auto& shared = params.values.shared;
  if (params.config.uses_shared_layers()) {
    t.through_shared = true;
    t.z8 = shared.fc8.forward(t.h7);
    t.h8 = relu(t.z8);
    t.z9 = shared.fc9.forward(t.h8);
    t.h9 = relu(t.z9);
    t.logits = shared.target_head.forward(t.h9);
  } else {
    t.logits = shared.target_head.forward(t.h7);
  }
  return t;
}

void backward(const ForwardTrace& trace, const TraceGrads& upstream, const Params& params,
              Gradients& out) {
  if (trace.generation != params.generation) {
    throw InvalidState("backward: trace from parameter generation " +
                       std::to_string(trace.generation) + ", parameters are at " +
                       std::to_string(params.generation));
  }
  const bool wants_shared =
      trace.pathway != Pathway::Source && params.config.uses_shared_layers();
  if (trace.through_shared != wants_shared) {
    throw InvalidState("backward: trace does not match the network's ablation");
  }

  Matrix d_h7(trace.h7.rows(), trace.h7.cols());
  if (!upstream.d_logits.empty()) {
    if (!upstream.d_logits.same_shape(trace.logits)) {
      throw InvalidState("backward: upstream logits shape does not match trace");
    }
    if (trace.pathway == Pathway::Source) {
      d_h7 += affine_backward(params.values.source_head.fc8s, trace.h7, upstream.d_logits,
                              out.source_head.fc8s);
    } else if (trace.through_shared) {
      const auto& s = params.values.shared;
      Matrix d_h9 = affine_backward(s.target_head, trace.h9, upstream.d_logits,
                                    out.shared.target_head);
      Matrix d_h8 = affine_backward(s.fc9, trace.h8, relu_backward(trace.z9, d_h9),
                                    out.shared.fc9);
      d_h7 += affine_backward(s.fc8, trace.h7, relu_backward(trace.z8, d_h8), out.shared.fc8);
    } else {
      d_h7 += affine_backward(params.values.shared.target_head, trace.h7, upstream.d_logits,
                              out.shared.target_head);
    }
  }
  add_if_present(d_h7, upstream.d_h7, "h7");

  const PathwayParams& p = pathway_params(params, trace.pathway);
  PathwayParams& g = pathway_grads(out, trace.pathway);
  Matrix d_h6 = affine_backward(p.fc7, trace.h6, relu_backward(trace.z7, d_h7), g.fc7);
  add_if_present(d_h6, upstream.d_h6, "h6");
  affine_backward(p.fc6, trace.input, relu_backward(trace.z6, d_h6), g.fc6,
                  /*need_input_grad=*/false);
}

Matrix common_representation(const Matrix& x, Modality modality, const Params& params) {
  return softmax_rows(forward_target(x, modality, params).logits);
}

}  // namespace chtn

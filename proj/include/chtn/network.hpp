#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "chtn/rng.hpp"
#include "chtn/tensor.hpp"

namespace chtn {

// Which parts of the hybrid transfer network are active.
//   Full       all pathways, shared correlation layers, all four losses
//   OnlyCross  no source pathway (so no MMD or source loss) and no shared
//              layers; target fc7 feeds the target classifier directly
//   NoShare    no shared layers; everything else as Full
//   NoSrcSp    no source supervision loss; everything else as Full
enum class Ablation { Full, OnlyCross, NoShare, NoSrcSp };

enum class Modality { Image, Text };

enum class Pathway : std::uint8_t { Source, TargetImage, TargetText };

std::string_view to_string(Ablation a);
// Accepts "full", "only-cross", "no-share", "no-src-sp" (case-insensitive,
// '_' accepted for '-').
Ablation parse_ablation(std::string_view text);

struct NetworkConfig {
  std::size_t d_img_src = 0;
  std::size_t d_img_tgt = 0;
  std::size_t d_txt = 0;
  std::size_t hidden = 64;
  std::size_t c_src = 0;
  std::size_t c_tgt = 0;
  Ablation ablation = Ablation::Full;

  void validate() const;

  bool uses_source_pathway() const { return ablation != Ablation::OnlyCross; }
  bool uses_shared_layers() const {
    return ablation == Ablation::Full || ablation == Ablation::NoSrcSp;
  }
  bool uses_source_loss() const {
    return ablation == Ablation::Full || ablation == Ablation::NoShare;
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// y = x W^T + b, with W stored (out x in) and b as a 1 x out row.
struct Affine {
  Matrix weight;
  Matrix bias;

  Affine() = default;
  Affine(std::size_t out, std::size_t in) : weight(out, in), bias(1, out) {}

  Matrix forward(const Matrix& x) const;

  friend bool operator==(const Affine&, const Affine&) = default;
};

struct PathwayParams {
  Affine fc6;
  Affine fc7;

  friend bool operator==(const PathwayParams&, const PathwayParams&) = default;
};

// fc8 and fc9 process image and text activations with the same values.
struct SharedParams {
  Affine fc8;
  Affine fc9;
  Affine target_head;

  friend bool operator==(const SharedParams&, const SharedParams&) = default;
};

struct SourceHead {
  Affine fc8s;

  friend bool operator==(const SourceHead&, const SourceHead&) = default;
};

// Every learnable tensor of the network. Also used as the gradient
// container, so gradients always have the parameters' shapes.
struct ParamSet {
  PathwayParams source;
  SourceHead source_head;
  PathwayParams image;
  PathwayParams text;
  SharedParams shared;

  // Zero tensors shaped for `config`.
  static ParamSet zeros(const NetworkConfig& config);

  // Visits every tensor as (name, matrix) in the fixed serialization order:
  // source.fc6, source.fc7, source_head.fc8s, image.fc6, image.fc7,
  // text.fc6, text.fc7, shared.fc8, shared.fc9, shared.target_head; weight
  // before bias within each layer.
  template <typename Self, typename F>
  static void visit(Self& set, F&& f) {
    auto layer = [&](const char* name, auto& affine) {
      f(std::string(name) + ".weight", affine.weight);
      f(std::string(name) + ".bias", affine.bias);
    };
    layer("source.fc6", set.source.fc6);
    layer("source.fc7", set.source.fc7);
    layer("source_head.fc8s", set.source_head.fc8s);
    layer("image.fc6", set.image.fc6);
    layer("image.fc7", set.image.fc7);
    layer("text.fc6", set.text.fc6);
    layer("text.fc7", set.text.fc7);
    layer("shared.fc8", set.shared.fc8);
    layer("shared.fc9", set.shared.fc9);
    layer("shared.target_head", set.shared.target_head);
  }
  template <typename F>
  void for_each(F&& f) { visit(*this, f); }
  template <typename F>
  void for_each(F&& f) const { visit(*this, f); }

  std::size_t parameter_count() const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;
};

using Gradients = ParamSet;

struct Params {
  NetworkConfig config;
  ParamSet values;
  // Bumped on every update; forward traces remember the value they saw.
  std::uint64_t generation = 0;

  // values -= lr * grads.
  void apply_sgd(const Gradients& grads, double lr);
};

// Glorot-uniform weights, zero biases. The source and target image pathways
// start from identical fc6/fc7 values whenever their input dims agree.
Params init_params(const NetworkConfig& config, Rng& rng);

// Activations kept for the backward pass. z* are pre-activations.
struct ForwardTrace {
  Pathway pathway = Pathway::Source;
  std::uint64_t generation = 0;
  bool through_shared = false;
  Matrix input;
  Matrix z6, h6, z7, h7;
  Matrix z8, h8, z9, h9;
  Matrix logits;
};

ForwardTrace forward_source(const Matrix& x, const Params& params);
ForwardTrace forward_target(const Matrix& x, Modality modality, const Params& params);

// Upstream gradients entering a trace. Empty matrices mean "no gradient".
struct TraceGrads {
  Matrix d_h6;
  Matrix d_h7;
  Matrix d_logits;
};

// Accumulates the parameter gradients implied by `upstream` into `out`.
// Throws InvalidState if the trace was produced under a different parameter
// generation or its shapes do not line up with `upstream`.
void backward(const ForwardTrace& trace, const TraceGrads& upstream, const Params& params,
              Gradients& out);

// Row-wise softmax of the target logits: the common representation.
Matrix common_representation(const Matrix& x, Modality modality, const Params& params);

}  // namespace chtn

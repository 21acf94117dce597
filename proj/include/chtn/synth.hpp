#pragma once

#include <cstddef>
#include <cstdint>

#include "chtn/dataset.hpp"

namespace chtn {

// Latent-factor generator for a labeled source image set and a paired
// image/text target set.
//
// Each target class c has a latent mean mu_c ~ N(0, I). A pair draws one
// latent z = mu_c + noise_sigma * e and renders
//   image = A (z + noise_sigma * e_img),  text = B (z + noise_sigma * e_txt)
// with fixed random maps A (d_img x d_latent) and B (d_txt x d_latent).
// The first `overlap` source classes reuse target means shifted by
// N(0, source_shift^2) perturbations; the remaining source classes get fresh
// means. Source samples are rendered through A like target images, so the
// two image domains share structure.
struct SynthConfig {
  std::size_t c_tgt = 4;
  std::size_t c_src = 6;
  std::size_t overlap = 4;
  std::size_t d_latent = 8;
  std::size_t d_img = 32;
  std::size_t d_txt = 24;
  double noise_sigma = 1.0;
  double source_shift = 0.1;
  std::size_t n_train = 400;
  std::size_t n_test = 100;
  std::size_t n_src = 300;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthData {
  Dataset source;
  // All n_train + n_test pairs, before the train/test split.
  PairedDataset target;
};

SynthData generate_synthetic(const SynthConfig& cfg);

// generate_synthetic followed by split(n_train, n_test) with a seed-derived
// generator.
struct SynthSplit {
  Dataset source;
  PairedDataset train;
  TestSplit test;
};
SynthSplit generate_synthetic_split(const SynthConfig& cfg);

}  // namespace chtn

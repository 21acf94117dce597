#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "chtn/synth.hpp"
#include "chtn/trainer.hpp"

namespace chtn {

// "key = value" lines; '#' starts a comment; blank lines ignored. Keys are
// unique. Unknown keys are rejected by the typed readers below.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin);
  static KeyValueFile load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, std::size_t> lines_;
  std::string origin_;

  friend class KeyValueReader;
};

// Training run configuration. Keys (all optional):
//   lr, iterations, batch_src, batch_tgt, seed, hidden,
//   w_single, w_source, w_cross, w_corr,
//   ablation            full | only-cross | no-share | no-src-sp
//   bandwidth_refresh   true | false
//   kernel_multipliers  comma-separated positive reals
//   lr_decay_every, lr_decay_factor, checkpoint_every
struct RunConfig {
  TrainConfig train;
  std::size_t hidden = 64;
};

RunConfig parse_run_config(const KeyValueFile& file);
std::string format_run_config(const RunConfig& cfg);

// Synthetic data configuration. Keys (all optional): c_tgt, c_src, overlap,
// d_latent, d_img, d_txt, noise_sigma, source_shift, n_train, n_test, n_src,
// seed.
SynthConfig parse_synth_config(const KeyValueFile& file);
std::string format_synth_config(const SynthConfig& cfg);

}  // namespace chtn

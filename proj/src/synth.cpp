#include "chtn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chtn/errors.hpp"

namespace chtn {
namespace {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal(0.0, stddev);
  return m;
}

std::vector<double> noisy(std::span<const double> mean, double sigma, Rng& rng) {
  std::vector<double> out(mean.begin(), mean.end());
  for (double& v : out) v += sigma * rng.normal();
  return out;
}

// map * latent, written into `out`.
void render(const Matrix& map, std::span<const double> latent, std::span<double> out) {
  for (std::size_t i = 0; i < map.rows(); ++i) out[i] = dot(map.row(i), latent);
}

}  // namespace

void SynthConfig::validate() const {
  if (c_tgt < 2 || c_src < 2) throw InvalidArgument("SynthConfig: class counts must be >= 2");
  if (overlap > std::min(c_src, c_tgt)) {
    throw InvalidArgument("SynthConfig: overlap " + std::to_string(overlap) +
                          " exceeds min(c_src, c_tgt)");
  }
  if (d_latent == 0 || d_img == 0 || d_txt == 0) {
    throw InvalidArgument("SynthConfig: dimensions must be >= 1");
  }
  if (!(noise_sigma >= 0.0) || !(source_shift >= 0.0)) {
    throw InvalidArgument("SynthConfig: noise levels must be non-negative");
  }
  if (n_train == 0 || n_src == 0) throw InvalidArgument("SynthConfig: empty split");
}

SynthData generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double map_scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_latent));
  const Matrix img_map = gaussian_matrix(cfg.d_img, cfg.d_latent, map_scale, rng);
  const Matrix txt_map = gaussian_matrix(cfg.d_txt, cfg.d_latent, map_scale, rng);
  const Matrix tgt_means = gaussian_matrix(cfg.c_tgt, cfg.d_latent, 1.0, rng);

  Matrix src_means = gaussian_matrix(cfg.c_src, cfg.d_latent, 1.0, rng);
  for (std::size_t c = 0; c < cfg.overlap; ++c) {
    auto row = src_means.row(c);
    auto tied = tgt_means.row(c);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = tied[j] + cfg.source_shift * rng.normal();
  }

  SynthData out;
  const std::size_t n_pairs = cfg.n_train + cfg.n_test;
  auto& img = out.target.img;
  auto& txt = out.target.txt;
  img = {Matrix(n_pairs, cfg.d_img), {}, cfg.c_tgt};
  txt = {Matrix(n_pairs, cfg.d_txt), {}, cfg.c_tgt};
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const std::size_t label = p % cfg.c_tgt;
    const auto latent = noisy(tgt_means.row(label), cfg.noise_sigma, rng);
    const auto img_latent = noisy(latent, cfg.noise_sigma, rng);
    const auto txt_latent = noisy(latent, cfg.noise_sigma, rng);
    render(img_map, img_latent, img.features.row(p));
    render(txt_map, txt_latent, txt.features.row(p));
    img.labels.push_back(label);
    txt.labels.push_back(label);
  }

  out.source = {Matrix(cfg.n_src, cfg.d_img), {}, cfg.c_src};
  for (std::size_t r = 0; r < cfg.n_src; ++r) {
    const std::size_t label = r % cfg.c_src;
    // Same two noise draws as a target image, so the domains differ only in
    // their class means.
    const auto latent = noisy(noisy(src_means.row(label), cfg.noise_sigma, rng),
                              cfg.noise_sigma, rng);
    render(img_map, latent, out.source.features.row(r));
    out.source.labels.push_back(label);
  }
  return out;
}

SynthSplit generate_synthetic_split(const SynthConfig& cfg) {
  SynthData data = generate_synthetic(cfg);
  Rng rng(cfg.seed ^ 0x5eed5eed5eed5eedull);
  auto parts = split(data.target, cfg.n_train, cfg.n_test, rng);
  return {std::move(data.source), std::move(parts.train), std::move(parts.test)};
}

}  // namespace chtn

#include "chtn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "chtn/errors.hpp"

namespace chtn {
namespace {

constexpr std::uint64_t kSamplerSeedOffset = 0x9E3779B97F4A7C15ull;

void check_finite(const LossBreakdown& b, std::size_t iteration) {
  const std::pair<const char*, double> terms[] = {{"single", b.single},
                                                  {"source", b.source},
                                                  {"cross", b.cross},
                                                  {"correlation", b.correlation},
                                                  {"total", b.total}};
  for (const auto& [name, value] : terms) {
    if (!std::isfinite(value)) throw DivergenceError(name, iteration);
  }
}

void check_compatible(const Dataset& source, const PairedDataset& target,
                      const NetworkConfig& net) {
  target.validate();
  if (target.img.dim() != net.d_img_tgt || target.txt.dim() != net.d_txt ||
      target.img.class_count != net.c_tgt) {
    throw InvalidArgument("target data does not match the network configuration");
  }
  if (net.uses_source_pathway()) {
    source.validate();
    if (source.dim() != net.d_img_src || source.class_count != net.c_src) {
      throw InvalidArgument("source data does not match the network configuration");
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("TrainConfig: lr must be > 0");
  if (batch_tgt == 0 || batch_src == 0) throw InvalidArgument("TrainConfig: batch sizes must be >= 1");
  if (ablation != Ablation::OnlyCross && (batch_src < 2 || batch_tgt < 2)) {
    throw InvalidArgument("TrainConfig: MMD needs batch sizes >= 2");
  }
  weights.validate();
  KernelSpec k;
  k.multipliers = kernel_multipliers;
  k.validate();
  if (lr_decay_every > 0 && !(lr_decay_factor > 0.0)) {
    throw InvalidArgument("TrainConfig: lr_decay_factor must be > 0");
  }
}

double TrainConfig::lr_at(std::size_t iteration) const {
  if (lr_decay_every == 0) return lr;
  const auto steps = static_cast<double>(iteration / lr_decay_every);
  return lr * std::pow(lr_decay_factor, steps);
}

void BatchSampler::Stream::take(Rng& rng, std::vector<std::size_t>& out) {
  if (order.empty() || cursor + batch > n) {
    order = rng.permutation(n);
    cursor = 0;
  }
  out.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
             order.begin() + static_cast<std::ptrdiff_t>(cursor + batch));
  cursor += batch;
}

BatchSampler::BatchSampler(const Dataset& source, const PairedDataset& target,
                           std::size_t batch_src, std::size_t batch_tgt)
    : source_(source), target_(target) {
  if (source.size() == 0 || target.size() == 0) {
    throw InvalidArgument("BatchSampler: empty dataset");
  }
  if (batch_src == 0 || batch_tgt == 0) throw InvalidArgument("BatchSampler: zero batch size");
  if (batch_src > source.size() || batch_tgt > target.size()) {
    throw InvalidArgument("BatchSampler: batch larger than dataset");
  }
  src_stream_ = {source.size(), batch_src, {}, 0};
  tgt_stream_ = {target.size(), batch_tgt, {}, 0};
}

Batch BatchSampler::next(Rng& rng) {
  src_stream_.take(rng, last_src_);
  tgt_stream_.take(rng, last_tgt_);
  Batch b;
  b.src_x = gather_rows(source_.features, last_src_);
  for (std::size_t r : last_src_) b.src_y.push_back(source_.labels[r]);
  b.img_x = gather_rows(target_.img.features, last_tgt_);
  b.txt_x = gather_rows(target_.txt.features, last_tgt_);
  for (std::size_t r : last_tgt_) b.tgt_y.push_back(target_.img.labels[r]);
  return b;
}

NetworkConfig make_network_config(const Dataset& source, const PairedDataset& target,
                                  std::size_t hidden, Ablation ablation) {
  NetworkConfig c;
  c.d_img_src = source.dim();
  c.d_img_tgt = target.img.dim();
  c.d_txt = target.txt.dim();
  c.hidden = hidden;
  c.c_src = source.class_count;
  c.c_tgt = target.img.class_count;
  c.ablation = ablation;
  c.validate();
  return c;
}

TrainResult train(const Dataset& source, const PairedDataset& target,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                  const CheckpointHook& on_checkpoint) {
  const auto started = std::chrono::steady_clock::now();
  net_cfg.validate();
  train_cfg.validate();
  if (net_cfg.ablation != train_cfg.ablation) {
    throw InvalidArgument("train: network and training configs name different ablations");
  }
  check_compatible(source, target, net_cfg);

  Rng init_rng(train_cfg.seed);
  TrainResult result{init_params(net_cfg, init_rng), {}};
  Params& params = result.params;

  if (train_cfg.iterations > 0) {
    Rng sample_rng(train_cfg.seed + kSamplerSeedOffset);
    BatchSampler sampler(source, target, train_cfg.batch_src, train_cfg.batch_tgt);
    std::optional<LayerKernels> kernels;
    Gradients grads;
    result.log.history.reserve(train_cfg.iterations);

    for (std::size_t it = 1; it <= train_cfg.iterations; ++it) {
      const Batch batch = sampler.next(sample_rng);
      const Objective objective(params, batch);
      if (!kernels || train_cfg.bandwidth_refresh) {
        kernels = objective.median_kernels(train_cfg.kernel_multipliers);
      }
      const LossBreakdown losses = objective.evaluate(*kernels, train_cfg.weights, &grads);
      check_finite(losses, it);
      result.log.history.push_back(losses);
      params.apply_sgd(grads, train_cfg.lr_at(it - 1));
      if (on_checkpoint && train_cfg.checkpoint_every > 0 &&
          it % train_cfg.checkpoint_every == 0) {
        on_checkpoint(it, params);
      }
    }
  }

  result.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

Batch full_batch(const Dataset& source, const PairedDataset& target) {
  return {source.features, source.labels, target.img.features, target.txt.features,
          target.img.labels};
}

LossBreakdown evaluate_full_losses(const Dataset& source, const PairedDataset& target,
                                   const Params& params, const TrainConfig& cfg,
                                   const std::optional<LayerKernels>& kernels) {
  check_compatible(source, target, params.config);
  const Batch batch = full_batch(source, target);
  const Objective objective(params, batch);
  const LayerKernels k = kernels ? *kernels : objective.median_kernels(cfg.kernel_multipliers);
  return objective.evaluate(k, cfg.weights);
}

}  // namespace chtn

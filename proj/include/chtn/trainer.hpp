#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "chtn/dataset.hpp"
#include "chtn/losses.hpp"
#include "chtn/network.hpp"
#include "chtn/objective.hpp"

namespace chtn {

struct TrainConfig {
  double lr = 0.01;
  std::size_t iterations = 500;
  std::size_t batch_src = 32;
  std::size_t batch_tgt = 32;
  LossWeights weights;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::Full;
  // Recompute median-heuristic bandwidths on every minibatch. When false the
  // bandwidths from the first minibatch are kept for the whole run.
  bool bandwidth_refresh = true;
  std::vector<double> kernel_multipliers = KernelSpec::default_multipliers();
  // Step decay: lr *= lr_decay_factor every lr_decay_every iterations.
  // 0 disables it.
  std::size_t lr_decay_every = 0;
  double lr_decay_factor = 0.1;
  // Checkpoint callback period; 0 disables it.
  std::size_t checkpoint_every = 0;

  void validate() const;
  double lr_at(std::size_t iteration) const;
};

struct TrainLog {
  std::vector<LossBreakdown> history;
  double wall_seconds = 0.0;
};

struct TrainResult {
  Params params;
  TrainLog log;
};

// Epoch-style sampler: each stream is walked through a shuffled order and
// reshuffled once fewer than a batch of rows remain. Target image and text
// rows are drawn with the same indices, so pairs stay aligned.
class BatchSampler {
 public:
  BatchSampler(const Dataset& source, const PairedDataset& target, std::size_t batch_src,
               std::size_t batch_tgt);

  Batch next(Rng& rng);

  // Indices used by the most recent next() call.
  const std::vector<std::size_t>& last_source_rows() const { return last_src_; }
  const std::vector<std::size_t>& last_target_rows() const { return last_tgt_; }

 private:
  struct Stream {
    std::size_t n = 0;
    std::size_t batch = 0;
    std::vector<std::size_t> order;
    std::size_t cursor = 0;
    void take(Rng& rng, std::vector<std::size_t>& out);
  };

  const Dataset& source_;
  const PairedDataset& target_;
  Stream src_stream_, tgt_stream_;
  std::vector<std::size_t> last_src_, last_tgt_;
};

// Derives the network shape from the data.
NetworkConfig make_network_config(const Dataset& source, const PairedDataset& target,
                                  std::size_t hidden, Ablation ablation);

using CheckpointHook = std::function<void(std::size_t iteration, const Params& params)>;

// Minibatch SGD on the weighted joint objective. Parameters are initialized
// with init_params(net_cfg, Rng(train_cfg.seed)). Throws DivergenceError on
// the first non-finite loss term.
TrainResult train(const Dataset& source, const PairedDataset& target,
                  const NetworkConfig& net_cfg, const TrainConfig& train_cfg,
                  const CheckpointHook& on_checkpoint = {});

// Joint objective over the whole source set and all labeled target pairs,
// in dataset order. Uses median-heuristic bandwidths on the full sets unless
// `kernels` is supplied.
LossBreakdown evaluate_full_losses(const Dataset& source, const PairedDataset& target,
                                   const Params& params, const TrainConfig& cfg,
                                   const std::optional<LayerKernels>& kernels = std::nullopt);

// Batch holding every row of both datasets, in order.
Batch full_batch(const Dataset& source, const PairedDataset& target);

}  // namespace chtn

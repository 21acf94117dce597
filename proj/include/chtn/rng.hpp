#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace chtn {

// Seeded pseudo-random source with a platform-independent output stream.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++ standard.
// The standard distributions are not (their algorithms are left to the
// library), so every derived quantity is computed here:
//   uniform()      53 high bits of one engine draw, scaled to [0, 1)
//   normal()       Box-Muller on two uniform() draws, both outputs used
//   below(n)       rejection sampling on the top of the 64-bit range
//   shuffle()      Fisher-Yates from the last index down, using below()
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chtn

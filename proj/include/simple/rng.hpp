#pragma once

#include <cstdint>
#include <random>

namespace simple {

// Stream tags keep seeds drawn for different purposes apart even when they
// share a master seed and index.
enum class SeedStream : std::uint64_t {
  adjacency = 1,
  model_params = 2,
  moments = 3,
  oracle_samples = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for replication `index` of `stream`, a pure function of its inputs so
// results do not depend on the order in which replications run.
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                          std::uint64_t index);
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream,
                          std::uint64_t group, std::uint64_t index);

// mt19937_64 with a fixed, library-independent mapping to [0, 1). The
// standard distributions are implementation-defined, so they are avoided
// wherever bit reproducibility matters.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // 53-bit uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace simple

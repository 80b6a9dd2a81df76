#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wavesieve {

// SplitMix64 finalizer. Used to derive independent stream seeds from a root
// seed: derive_seed(root, {a, b, ...}) folds each stream label into the state
// in order, so (root, {rep, component}) never collides with (root, {rep}).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root,
                          std::initializer_list<std::uint64_t> stream);

// Seedable generator with platform-independent output. The engine is
// mt19937_64 (its sequence is fixed by the standard); uniform and normal
// transforms are implemented here because std:: distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the Marsaglia polar method; the second variate of
  // each accepted pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wavesieve

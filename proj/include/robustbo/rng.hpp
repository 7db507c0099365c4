#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace robustbo {

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Seed for a named consumer stream under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded generator with platform-independent variates.
///
/// Only the raw mt19937_64 stream is taken from the standard library; uniform,
/// normal and categorical draws are computed here so outputs are byte-identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Child generator for `stream`, independent of this generator's state.
  static Rng derive(std::uint64_t master, std::uint64_t stream) { return Rng(derive_seed(master, stream)); }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  /// Unbiased integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Index drawn with probabilities `pmf` (assumed normalized).
  std::size_t categorical(std::span<const double> pmf);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace robustbo

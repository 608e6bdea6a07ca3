#pragma once

// Random streams.
//
// Every random quantity in the library is drawn from `Rng`, a std::mt19937_64
// engine whose single-word seed is passed through the SplitMix64 finalizer.
// Uniform variates and bounded integers are produced here (not by <random>
// distributions) so output is bit-identical across standard libraries.
//
// Independent streams are derived, never shared:
//   derive_seed(s, i)        = mix64(s ^ mix64(i))
//   derive_seed(s, g, t)     = derive_seed(derive_seed(s, g), t)
// The experiment harness uses derive_seed(master, grid_index, trial_index) for
// the trial seed, then derive_seed(trial_seed, k) for the k-th sub-stream
// (k = 0 graph, 1 weights, 2 solver start vector).

#include <cmath>
#include <cstdint>
#include <random>

namespace wrg {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid_index,
                                    std::uint64_t trial_index) noexcept {
  return derive_seed(derive_seed(master, grid_index), trial_index);
}

namespace stream {
inline constexpr std::uint64_t graph = 0;
inline constexpr std::uint64_t weights = 1;
inline constexpr std::uint64_t solver = 2;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Unbiased integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  /// Fair sign, +1 or -1.
  double sign() { return (next() >> 63) ? -1.0 : 1.0; }

  /// Unit exponential variate.
  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wrg

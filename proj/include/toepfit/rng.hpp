#pragma once

#include <cmath>
#include <cstdint>

namespace toepfit {

// Counter-based generator (Weyl increment + 64-bit mix finalizer). Cheap to
// seed, no warm-up, and fork() derives statistically independent substreams
// from (state, tag) alone, so the number of draws taken from one stream never
// shifts another. Every stochastic routine in the library takes an explicit
// seed and forks per substep; given the same seed the draw sequence is
// identical across runs and platforms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  std::uint64_t operator()() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Child stream keyed by (current state, tag). Fork before drawing from the
  // parent if reproducible tags are wanted; draws advance the state.
  Rng fork(std::uint64_t tag) const {
    return Rng(mix(state_ ^ mix(tag + 0x632be59bd9b4e019ull)));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via the polar method; the rejected-pair-free spare is
  // cached, so draws come in internally consistent pairs.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Unbiased integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = operator()();
    } while (x >= limit);
    return x % bound;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stable 64-bit seed for the tagged substream of `seed`; used to hand
// independent seeds to nested components without sharing generator state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return Rng(seed).fork(tag)();
}

}  // namespace toepfit

// rng.hpp - deterministic random number generation.
//
// The generator core is splitmix64 with a hand-rolled Box-Muller transform,
// so draws do not depend on standard-library distribution internals. Trial
// seeds are derived by hashing (master seed, point index, trial index),
// which keeps concurrent sweeps reproducible.

#pragma once

#include <complex>
#include <cstdint>

namespace capasim {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless mix of a seed with two indices (e.g. SNR point, trial).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  (void)splitmix64_next(s);
  s ^= 0x632be59bd9b4e019ULL + a;
  (void)splitmix64_next(s);
  s ^= 0x9e6c63d0876a9a7dULL + b;
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // decorrelate trivially related seeds
    (void)splitmix64_next(state_);
  }

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  /// Circular complex Gaussian with unit total variance.
  std::complex<double> cgaussian() {
    const double s = 0.70710678118654752440;
    return {s * gaussian(), s * gaussian()};
  }

  bool bernoulli() { return (next_u64() & 1ULL) != 0; }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace capasim

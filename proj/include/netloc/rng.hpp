#pragma once

#include <cmath>
#include <cstdint>

namespace netloc {

/// Counter-based seed derivation (SplitMix64 over master ^ stream).
/// Used to split a master seed into independent per-snapshot streams so
/// that parallel execution order cannot change the randomness.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic generator with portable distributions. The standard
/// library's distributions are implementation-defined, which would break
/// the bit-identical reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x853c49e6748fea9bULL) {}

  std::uint64_t next_u64() {
    // xorshift* variant seeded through SplitMix
    std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Zero-mean von Mises sample with concentration kappa
  /// (Best-Fisher rejection sampler).
  double von_mises(double kappa) {
    if (kappa < 1e-8) return uniform(-M_PI, M_PI);
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
      const double u1 = uniform();
      const double u2 = uniform();
      const double z = std::cos(M_PI * u1);
      const double f = (1.0 + r * z) / (r + z);
      const double c = kappa * (r - f);
      if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
        const double u3 = uniform();
        return (u3 < 0.5 ? -1.0 : 1.0) * std::acos(f);
      }
    }
  }

 private:
  std::uint64_t s_;
};

}  // namespace netloc

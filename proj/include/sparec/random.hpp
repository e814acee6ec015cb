#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace sparec {

/// Deterministic PRNG for experiments. All randomness in the library is keyed
/// by (seed, stream index) so parallel and serial sweeps produce identical
/// numbers. Transforms are hand-rolled so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  /// Independent stream derived from (seed, index).
  static Rng keyed(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed);
    r.state_ ^= 0xbf58476d1ce4e5b9ull * (index + 1);
    r.next();
    r.next();
    return r;
  }

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> normal_complex() {
    double re = normal();
    double im = normal();
    return {re, im};
  }

  std::vector<std::complex<double>> normal_complex_vector(std::size_t n) {
    std::vector<std::complex<double>> v(n);
    for (auto& z : v) z = normal_complex();
    return v;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace sparec

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ccn {

// Every stochastic routine in the library draws from this wrapper around
// std::mt19937_64, so all results are reproducible from one 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  // Uniform on [-1,1] with the band (-0.05,0.05) removed; keeps sampled
  // coefficients away from accidental near-degeneracy.
  double coeff() {
    for (;;) {
      double u = uniform(-1.0, 1.0);
      if (std::abs(u) >= 0.05) return u;
    }
  }

  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ccn

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "wax/types.hpp"

namespace wax {

// Deterministic Gaussian source.  Draws raw 64-bit words from mt19937_64 and
// applies Box-Muller directly, so streams are reproducible across standard
// library implementations (std::normal_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // in (0, 1], never 0
    const std::uint64_t bits = eng_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // CN(0,1): unit-variance circularly symmetric complex Gaussian.
  Cplx cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Cplx(re * kInvSqrt2, im * kInvSqrt2);
  }

  Mat cgaussian_matrix(int rows, int cols) {
    Mat out(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) out(i, j) = cgaussian();
    return out;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stable per-task seed derivation (seed streams for parallel loops).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace wax

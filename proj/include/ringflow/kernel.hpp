#pragma once

// The charge-transfer kernel
//
//   K_mn = (alpha / pi) (m + n) sinc(alpha (m^2 - n^2)),   alpha = hbar T / (4 mu R^2),
//
// in reduced units hbar = mu = R = 1: E_m = m^2 / 2, the measurement window is
// T = 4 alpha, currents are in units of hbar / (mu R^2) and transfers are
// dimensionless.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ringflow/coefficients.hpp"
#include "ringflow/eigensolve.hpp"

namespace ringflow {

class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument("alpha must be positive and finite, got " + std::to_string(value));
    }
  }
  double value() const noexcept { return value_; }
  double window() const noexcept { return 4.0 * value_; }  // T in reduced units

 private:
  double value_;
};

constexpr double mode_energy(std::size_t m) noexcept {
  const auto mm = static_cast<double>(m);
  return 0.5 * mm * mm;
}

/// sin(z)/z with the removable singularity filled in; 1 - z^2/6 below 1e-8.
inline double sinc(double z) noexcept {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

class KernelMatrix {
 public:
  KernelMatrix(Alpha alpha, std::size_t n_max) : alpha_(alpha), n_max_(n_max), k_(n_max + 1) {
    const double a = alpha.value();
    for (std::size_t m = 0; m <= n_max; ++m) {
      k_(m, m) = a / std::numbers::pi * 2.0 * static_cast<double>(m);
      for (std::size_t n = m + 1; n <= n_max; ++n) {
        const auto mm = static_cast<double>(m), nn = static_cast<double>(n);
        const double v = a / std::numbers::pi * (mm + nn) * sinc(a * (mm * mm - nn * nn));
        k_(m, n) = v;
        k_(n, m) = v;
      }
    }
  }

  Alpha alpha() const noexcept { return alpha_; }
  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t modes() const noexcept { return n_max_ + 1; }
  double operator()(std::size_t m, std::size_t n) const noexcept { return k_(m, n); }
  const SymmetricMatrix& matrix() const noexcept { return k_; }

 private:
  Alpha alpha_;
  std::size_t n_max_;
  SymmetricMatrix k_;
};

inline KernelMatrix build_kernel(Alpha alpha, std::size_t n_max) { return {alpha, n_max}; }

/// (K c)_{mk} = sum_n K_mn c_nk: the block-diagonal two-particle kernel applied
/// without forming the (N+1)^2 x (N+1)^2 matrix. The result carries no tag.
inline CoefficientMatrix block_kernel_apply(const KernelMatrix& k, const CoefficientMatrix& c) {
  if (k.modes() != c.modes()) {
    throw std::invalid_argument("block_kernel_apply: kernel has " + std::to_string(k.modes()) +
                                " modes, coefficients have " + std::to_string(c.modes()));
  }
  return {multiply(k.matrix().entries(), c.values), SymmetryTag::none};
}

}  // namespace ringflow

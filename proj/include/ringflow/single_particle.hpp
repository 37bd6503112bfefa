#pragma once

// One particle on the ring: the truncated backflow bound lambda_ring^(N)(alpha)
// as the smallest eigenvalue of K, and the time-domain observables that
// cross-check the quadratic form.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ringflow/coefficients.hpp"
#include "ringflow/eigensolve.hpp"
#include "ringflow/kernel.hpp"
#include "ringflow/quadrature.hpp"

namespace ringflow {

struct SingleBound {
  Alpha alpha;
  std::size_t n_max;
  double lambda_ring;
  CoefficientVector minimizer;
  double residual;
};

inline SingleBound lambda_ring(Alpha alpha, std::size_t n_max, const SolverOptions& opt = {}) {
  if (n_max < 1) throw std::invalid_argument("lambda_ring: n_max must be at least 1");
  const auto k = build_kernel(alpha, n_max);
  auto pair = smallest_eigenpair(k.matrix(), opt);
  return {alpha, n_max, pair.value, CoefficientVector(std::move(pair.vector)), pair.residual};
}

/// Delta_1 = c^T K c.
inline double delta1_quadratic(const CoefficientVector& c, const KernelMatrix& k) {
  if (c.values.size() != k.modes()) {
    throw std::invalid_argument("delta1_quadratic: state has " + std::to_string(c.values.size()) +
                                " modes, kernel has " + std::to_string(k.modes()));
  }
  std::vector<double> kc(k.modes());
  k.matrix().apply(c.values, kc);
  return dot(c.values, kc);
}

/// Probability current j(theta, t) from the double mode sum
/// (1/2) sum_{mn} (m+n) c_m c_n psi_m^* psi_n e^{i (E_m - E_n) t}.
/// The imaginary part cancels pairwise; a residue above 1e-12 is a logic error.
inline double current_j(const CoefficientVector& c, double theta, double t) {
  const std::size_t d = c.values.size();
  double re = 0.0, im = 0.0;
  for (std::size_t m = 0; m < d; ++m) {
    if (c.values[m] == 0.0) continue;
    for (std::size_t n = 0; n < d; ++n) {
      const double w = static_cast<double>(m + n) * c.values[m] * c.values[n];
      if (w == 0.0) continue;
      const double phase = (static_cast<double>(n) - static_cast<double>(m)) * theta +
                           (mode_energy(m) - mode_energy(n)) * t;
      re += w * std::cos(phase);
      im += w * std::sin(phase);
    }
  }
  const double norm = 1.0 / (4.0 * std::numbers::pi);
  if (std::abs(im * norm) > 1e-12) {
    throw std::logic_error("current_j: imaginary part " + std::to_string(im * norm) + " did not cancel");
  }
  return re * norm;
}

/// Delta_1 by Gauss-Legendre integration of j(0, t) over [-T/2, T/2], T = 4 alpha.
inline double delta1_quadrature(const CoefficientVector& c, Alpha alpha, std::size_t quad_points = 256) {
  if (quad_points < 64) throw std::invalid_argument("delta1_quadrature: need at least 64 points");
  const auto rule = gauss_legendre(quad_points);
  const double half = 0.5 * alpha.window();
  return integrate([&](double t) { return current_j(c, 0.0, t); }, -half, half, rule);
}

}  // namespace ringflow

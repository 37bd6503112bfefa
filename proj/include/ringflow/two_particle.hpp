#pragma once

// Two identical particles on the ring. States are real coefficient matrices
// c_{mk} (see coefficients.hpp). With the exchange symmetry imposed, the
// particle-number current and density reduce to sums over the one-body matrix
// G_mn = sum_k c_mk c_nk:
//
//   J(theta, t)   = (1/2pi) sum_mn (m+n) G_mn cos((n-m) theta + (E_m - E_n) t)
//   rho(theta, t) = (1/pi)  sum_mn        G_mn cos((n-m) theta + (E_m - E_n) t)
//
// and the charge transfer through theta = 0 over [-T/2, T/2] is the quadratic
// form Delta_2 = 2 sum_{mnk} c_mk K_mn c_nk.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringflow/coefficients.hpp"
#include "ringflow/kernel.hpp"
#include "ringflow/quadrature.hpp"

namespace ringflow {

inline double delta2_quadratic(const CoefficientMatrix& c, const KernelMatrix& k) {
  const auto kc = block_kernel_apply(k, c);  // throws on mismatch
  return 2.0 * dot(c.values.flat(), kc.values.flat());
}

/// Evaluates J and rho for one state; caches the one-body matrix so grid
/// evaluation costs O(N^2) per point.
class PairObservables {
 public:
  explicit PairObservables(const CoefficientMatrix& c) : modes_(c.modes()), g_(c.modes(), c.modes()) {
    if (c.tag == SymmetryTag::none) {
      throw std::invalid_argument("pair observables need a bosonic or fermionic state");
    }
    for (std::size_t m = 0; m < modes_; ++m)
      for (std::size_t n = m; n < modes_; ++n) {
        const double v = dot(c.values.row(m), c.values.row(n));
        g_(m, n) = v;
        g_(n, m) = v;
      }
  }

  double current(double theta, double t) const { return sum(theta, t, true) / (2.0 * std::numbers::pi); }
  double density(double theta, double t) const { return sum(theta, t, false) / std::numbers::pi; }

 private:
  double sum(double theta, double t, bool weighted) const {
    double s = 0.0;
    for (std::size_t m = 0; m < modes_; ++m) {
      for (std::size_t n = 0; n < modes_; ++n) {
        const double g = g_(m, n);
        if (g == 0.0) continue;
        const double phase = (static_cast<double>(n) - static_cast<double>(m)) * theta +
                             (mode_energy(m) - mode_energy(n)) * t;
        const double w = weighted ? static_cast<double>(m + n) : 1.0;
        s += w * g * std::cos(phase);
      }
    }
    return s;
  }

  std::size_t modes_;
  Matrix g_;
};

/// Particle-number current J(theta, t) in units hbar / (mu R^2).
inline double current_J(const CoefficientMatrix& c, double theta, double t) {
  return PairObservables(c).current(theta, t);
}

/// Particle-number density rho(theta, t); integrates to 2 over the ring.
inline double density_rho(const CoefficientMatrix& c, double theta, double t) {
  return PairObservables(c).density(theta, t);
}

/// Max over the grid of |d rho/dt + dJ/dtheta| with central differences of step h.
inline double continuity_check(const CoefficientMatrix& c, std::span<const double> thetas,
                               std::span<const double> times, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("continuity_check: step must be positive");
  const PairObservables obs(c);
  double worst = 0.0;
  for (double th : thetas) {
    for (double t : times) {
      const double drho = (obs.density(th, t + h) - obs.density(th, t - h)) / (2.0 * h);
      const double dj = (obs.current(th + h, t) - obs.current(th - h, t)) / (2.0 * h);
      worst = std::max(worst, std::abs(drho + dj));
    }
  }
  return worst;
}

/// Delta_2 by Gauss-Legendre integration of J(0, t) over [-T/2, T/2].
inline double delta2_quadrature(const CoefficientMatrix& c, Alpha alpha, std::size_t quad_points = 256) {
  if (quad_points < 64) throw std::invalid_argument("delta2_quadrature: need at least 64 points");
  const PairObservables obs(c);
  const auto rule = gauss_legendre(quad_points);
  const double half = 0.5 * alpha.window();
  return integrate([&](double t) { return obs.current(0.0, t); }, -half, half, rule);
}

}  // namespace ringflow

#pragma once

// Two identical bosons. The bosonic minimum of Delta_2 is attained by the
// product of the single-particle minimizer with itself, so
// Q_B^(N)(alpha) = 2 lambda_ring^(N)(alpha). The symmetric-sector eigenproblem
// is never solved here; tests solve it independently at small N.

#include <algorithm>
#include <cmath>

#include "ringflow/single_particle.hpp"
#include "ringflow/two_particle.hpp"

namespace ringflow {

struct BosonResult {
  Alpha alpha;
  std::size_t n_max;
  double q_b;
  CoefficientMatrix state;  // tag boson, c_mk = c~_m c~_k
  double residual;          // of the single-particle eigenpair
};

inline BosonResult boson_bound(Alpha alpha, std::size_t n_max, const SolverOptions& opt = {}) {
  auto single = lambda_ring(alpha, n_max, opt);
  return {alpha, n_max, 2.0 * single.lambda_ring, product_state(single.minimizer), single.residual};
}

/// Normalization, exact symmetry, rank one and the Delta_2 identity.
///
/// Rank one is tested through the 2x2 minors that contain the largest entry
/// c_pq: a matrix with c_pq != 0 has rank one iff c_mk c_pq - c_mq c_pk = 0 for
/// every (m, k), which keeps the test O(N^2).
inline bool boson_state_check(const BosonResult& r) {
  const auto& c = r.state;
  if (c.tag != SymmetryTag::boson || c.n_max != r.n_max) return false;
  if (std::abs(c.norm_squared() - 1.0) > 1e-12) return false;
  if (!has_exchange_symmetry(c)) return false;

  std::size_t p = 0, q = 0;
  for (std::size_t m = 0; m < c.modes(); ++m)
    for (std::size_t k = 0; k < c.modes(); ++k)
      if (std::abs(c(m, k)) > std::abs(c(p, q))) p = m, q = k;
  for (std::size_t m = 0; m < c.modes(); ++m)
    for (std::size_t k = 0; k < c.modes(); ++k)
      if (std::abs(c(m, k) * c(p, q) - c(m, q) * c(p, k)) > 1e-10) return false;

  const auto k = build_kernel(r.alpha, r.n_max);
  return std::abs(delta2_quadratic(c, k) - r.q_b) <= 1e-11;
}

}  // namespace ringflow

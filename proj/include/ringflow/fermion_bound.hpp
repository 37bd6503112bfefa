#pragma once

// Two identical fermions. The independent coefficients
//   u = (c_10, c_20, ..., c_N0, c_21, ..., c_N1, ..., c_{N,N-1})
// embed into the full antisymmetric coefficient vector as c = M u, where M has
// one column per pair (m, k), m > k, with +1 at flat(m, k) and -1 at flat(k, m).
// M^T M = 2I, so Delta_2 = 2 u^T M^T K^ M u under 2 u^T u = 1 is minimized by
// the smallest eigenvalue of M^T K^ M, which is Q_F^(N)(alpha) itself.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringflow/eigensolve.hpp"
#include "ringflow/kernel.hpp"
#include "ringflow/two_particle.hpp"

namespace ringflow {

class NoAntisymmetricStates : public std::invalid_argument {
 public:
  NoAntisymmetricStates()
      : std::invalid_argument("no antisymmetric two-particle states exist for n_max = 0") {}
};

struct ModePair {
  std::size_t m;  // m > k
  std::size_t k;
  friend bool operator==(const ModePair&, const ModePair&) = default;
};

class Antisymmetrizer {
 public:
  explicit Antisymmetrizer(std::size_t n_max) : n_max_(n_max) {
    if (n_max == 0) throw NoAntisymmetricStates();
    pairs_.reserve(n_max * (n_max + 1) / 2);
    for (std::size_t k = 0; k < n_max; ++k)
      for (std::size_t m = k + 1; m <= n_max; ++m) pairs_.push_back({m, k});
  }

  std::size_t n_max() const noexcept { return n_max_; }
  std::size_t modes() const noexcept { return n_max_ + 1; }
  std::size_t rows() const noexcept { return modes() * modes(); }
  std::size_t cols() const noexcept { return pairs_.size(); }
  const std::vector<ModePair>& pairs() const noexcept { return pairs_; }

  std::size_t plus_row(std::size_t j) const noexcept { return pairs_[j].m + pairs_[j].k * modes(); }
  std::size_t minus_row(std::size_t j) const noexcept { return pairs_[j].k + pairs_[j].m * modes(); }

  /// c = M u as a coefficient matrix (not rescaled).
  CoefficientMatrix embed(std::span<const double> u) const {
    if (u.size() != cols()) {
      throw std::invalid_argument("Antisymmetrizer::embed: expected " + std::to_string(cols()) +
                                  " coefficients, got " + std::to_string(u.size()));
    }
    Matrix c(modes(), modes());
    for (std::size_t j = 0; j < cols(); ++j) {
      c(pairs_[j].m, pairs_[j].k) = u[j];
      c(pairs_[j].k, pairs_[j].m) = -u[j];
    }
    return {std::move(c), SymmetryTag::fermion};
  }

  /// M^T c for a coefficient matrix c.
  std::vector<double> project(const Matrix& c) const {
    if (c.rows() != modes() || c.cols() != modes()) {
      throw std::invalid_argument("Antisymmetrizer::project: dimension mismatch");
    }
    std::vector<double> u(cols());
    for (std::size_t j = 0; j < cols(); ++j) u[j] = c(pairs_[j].m, pairs_[j].k) - c(pairs_[j].k, pairs_[j].m);
    return u;
  }

  /// M^T M in exact integer arithmetic over the sparse columns.
  std::vector<std::int64_t> gram() const {
    const std::size_t n = cols();
    std::vector<std::int64_t> g(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        std::int64_t s = 0;
        const std::size_t ri[2] = {plus_row(i), minus_row(i)};
        const std::size_t rj[2] = {plus_row(j), minus_row(j)};
        const std::int64_t vi[2] = {1, -1};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            if (ri[a] == rj[b]) s += vi[a] * vi[b];
        g[i * n + j] = s;
      }
    }
    return g;
  }

  /// Dense (N+1)^2 x N(N+1)/2 form; for tests and small displays.
  Matrix dense() const {
    Matrix d(rows(), cols());
    for (std::size_t j = 0; j < cols(); ++j) {
      d(plus_row(j), j) = 1.0;
      d(minus_row(j), j) = -1.0;
    }
    return d;
  }

 private:
  std::size_t n_max_;
  std::vector<ModePair> pairs_;
};

inline Antisymmetrizer build_antisymmetrizer(std::size_t n_max) { return Antisymmetrizer(n_max); }

namespace detail {
inline void require_match(const Antisymmetrizer& m, const KernelMatrix& k, const char* who) {
  if (m.n_max() != k.n_max()) {
    throw std::invalid_argument(std::string(who) + ": antisymmetrizer has n_max " +
                                std::to_string(m.n_max()) + ", kernel has " + std::to_string(k.n_max()));
  }
}
}  // namespace detail

/// M^T K^ M assembled entry by entry from
///   A_{(m,k),(n,l)} = d_kl K_mn + d_mn K_kl - d_kn K_ml - d_ml K_kn.
inline SymmetricMatrix reduced_matrix(const Antisymmetrizer& m, const KernelMatrix& k) {
  detail::require_match(m, k, "reduced_matrix");
  const auto& p = m.pairs();
  const std::size_t n = p.size();
  SymmetricMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto [mi, ki] = p[i];
      const auto [nj, lj] = p[j];
      double v = 0.0;
      if (ki == lj) v += k(mi, nj);
      if (mi == nj) v += k(ki, lj);
      if (ki == nj) v -= k(mi, lj);
      if (mi == lj) v -= k(ki, nj);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

/// The same matrix built column by column through the block-diagonal kernel:
/// column j is M^T K^ (M e_j).
inline SymmetricMatrix reduced_matrix_by_products(const Antisymmetrizer& m, const KernelMatrix& k) {
  detail::require_match(m, k, "reduced_matrix_by_products");
  const std::size_t n = m.cols();
  Matrix a(n, n);
  std::vector<double> unit(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const auto kc = block_kernel_apply(k, m.embed(unit));
    const auto col = m.project(kc.values);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    unit[j] = 0.0;
  }
  return SymmetricMatrix(std::move(a));
}

/// u -> M^T K^ M u without assembling anything larger than K.
class ReducedOperator {
 public:
  ReducedOperator(const Antisymmetrizer& m, const KernelMatrix& k) : m_(&m), k_(&k) {
    detail::require_match(m, k, "ReducedOperator");
    // ||M^T K^ M||_F^2 = (N+1-2) ||K||_F^2 + (tr K)^2
    const double modes = static_cast<double>(k.modes());
    double tr = 0.0;
    for (std::size_t i = 0; i < k.modes(); ++i) tr += k(i, i);
    const double fk = k.matrix().frobenius_norm();
    frobenius_ = std::sqrt((modes - 2.0) * fk * fk + tr * tr);
  }

  std::size_t dim() const noexcept { return m_->cols(); }
  double frobenius_norm() const noexcept { return frobenius_; }

  void apply(std::span<const double> u, std::span<double> out) const {
    const auto kc = block_kernel_apply(*k_, m_->embed(u));
    const auto& p = m_->pairs();
    for (std::size_t j = 0; j < p.size(); ++j) out[j] = kc.values(p[j].m, p[j].k) - kc.values(p[j].k, p[j].m);
  }

 private:
  const Antisymmetrizer* m_;
  const KernelMatrix* k_;
  double frobenius_;
};

struct ReducedVector {
  std::vector<double> values;  // 2 u^T u = 1
};

struct FermionResult {
  Alpha alpha;
  std::size_t n_max;
  double q_f;
  ReducedVector reduced_minimizer;
  CoefficientMatrix full_state;  // tag fermion, unit norm
  double residual;
  std::size_t matvecs;  // 0 when solved densely
};

inline FermionResult fermion_bound(Alpha alpha, std::size_t n_max, const SolverOptions& opt = {}) {
  const auto m = build_antisymmetrizer(n_max);
  const auto k = build_kernel(alpha, n_max);
  EigenPair pair = m.cols() <= opt.dense_limit ? smallest_eigenpair(reduced_matrix(m, k), opt)
                                               : smallest_eigenpair(ReducedOperator(m, k), opt);
  // Solver returns |u| = 1; rescale so that 2 u^T u = 1 and sum c^2 = 1.
  scale(1.0 / std::numbers::sqrt2, pair.vector);
  auto state = m.embed(pair.vector);
  return {alpha, n_max, pair.value, ReducedVector{std::move(pair.vector)}, std::move(state),
          pair.residual, pair.matvecs};
}

/// Antisymmetry, zero diagonal, normalization and Delta_2(full_state) == q_f.
inline bool fermion_state_check(const FermionResult& r) {
  const auto& c = r.full_state;
  if (c.tag != SymmetryTag::fermion || c.n_max != r.n_max) return false;
  if (!has_exchange_symmetry(c)) return false;
  if (std::abs(c.norm_squared() - 1.0) > 1e-12) return false;
  if (std::abs(2.0 * dot(r.reduced_minimizer.values, r.reduced_minimizer.values) - 1.0) > 1e-12) return false;
  const auto k = build_kernel(r.alpha, r.n_max);
  return std::abs(delta2_quadratic(c, k) - r.q_f) <= 1e-10;
}

}  // namespace ringflow

#pragma once

// Thick-restart Lanczos for the smallest eigenpair of a symmetric operator.
// Included from eigensolve.hpp; not meant to be used on its own.
//
// Each cycle extends the basis to `krylov_dim` vectors with two passes of
// classical Gram-Schmidt against every stored vector, solves the projected
// problem densely, and restarts from the `kept_ritz` lowest Ritz vectors plus
// the last Lanczos vector. The projected matrix is always rebuilt from explicit
// inner products, so the arrowhead block that appears after a restart needs no
// special handling.

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace ringflow {

namespace detail {

inline void orthogonalize_against(const Matrix& basis, std::size_t count, std::span<double> w,
                                  std::span<double> coeffs) {
  for (std::size_t i = 0; i < count; ++i) coeffs[i] = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < count; ++i) {
      const double c = dot(basis.row(i), w);
      coeffs[i] += c;
      axpy(-c, basis.row(i), w);
    }
  }
}

inline void fill_random(std::mt19937_64& rng, std::span<double> v) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& x : v) x = gauss(rng);
}

}  // namespace detail

template <SymmetricOperator Op>
EigenPair lanczos_smallest(const Op& a, const SolverOptions& opt) {
  const std::size_t n = a.dim();
  const std::size_t m = std::min(n, std::max<std::size_t>(opt.krylov_dim, 8));
  const std::size_t keep = std::max<std::size_t>(1, std::min(opt.kept_ritz, m / 2));
  const std::size_t cap = opt.max_matvecs ? opt.max_matvecs : 50 * n;
  const double anorm = std::max(static_cast<double>(a.frobenius_norm()), 1e-300);
  const double target = opt.tol * anorm;
  const double breakdown = 64 * std::numeric_limits<double>::epsilon() * anorm;

  std::mt19937_64 rng(opt.seed);
  Matrix basis(m + 1, n);
  Matrix proj(m, m);
  std::vector<double> w(n), coeffs(m + 1), ritz(n), aritz(n);

  detail::fill_random(rng, basis.row(0));
  scale(1.0 / norm2(basis.row(0)), basis.row(0));

  std::size_t locked = 0;  // Ritz vectors carried over from the last restart
  std::size_t matvecs = 0;
  double best = std::numeric_limits<double>::infinity();

  for (;;) {
    std::size_t built = m;  // basis vectors with a complete projected column
    bool exhausted = false;
    double tail_beta = 0.0;
    for (std::size_t j = locked; j < m; ++j) {
      a.apply(basis.row(j), w);
      ++matvecs;
      detail::orthogonalize_against(basis, j + 1, w, coeffs);
      for (std::size_t i = 0; i <= j; ++i) {
        proj(i, j) = coeffs[i];
        proj(j, i) = coeffs[i];
      }
      double beta = norm2(w);
      if (beta <= breakdown) {
        if (j + 1 == n) {
          built = j + 1;
          exhausted = true;
          tail_beta = 0.0;
          break;
        }
        // Invariant subspace: continue from a fresh direction with zero coupling.
        detail::fill_random(rng, w);
        detail::orthogonalize_against(basis, j + 1, w, coeffs);
        beta = 0.0;
        scale(1.0 / norm2(w), w);
      } else {
        scale(1.0 / beta, w);
      }
      std::copy(w.begin(), w.end(), basis.row(j + 1).begin());
      tail_beta = beta;
      if (j + 1 < m) {
        // The coupling is recomputed from the next column's projection; seed it
        // here so a zero-coupling restart stays zero.
        proj(j + 1, j) = proj(j, j + 1) = beta;
      }
    }

    Matrix h(built, built);
    for (std::size_t i = 0; i < built; ++i)
      for (std::size_t j = 0; j < built; ++j) h(i, j) = proj(i, j);
    const auto spec = tridiag::symmetric_eigen(h);

    const double estimate = std::abs(tail_beta * spec.vectors(built - 1, 0));
    if (estimate <= target || exhausted) {
      std::fill(ritz.begin(), ritz.end(), 0.0);
      for (std::size_t l = 0; l < built; ++l) axpy(spec.vectors(l, 0), basis.row(l), ritz);
      scale(1.0 / norm2(ritz), ritz);
      a.apply(ritz, aritz);
      ++matvecs;
      const double value = dot(ritz, aritz);
      axpy(-value, ritz, aritz);
      const double residual = norm2(aritz);
      best = std::min(best, residual);
      if (residual <= target || exhausted) {
        detail::normalize_sign(ritz);
        EigenPair out{value, ritz, residual, matvecs};
        if (residual > target) {
          throw NonConvergenceError("lanczos: residual " + std::to_string(residual) +
                                        " above target after exhausting the space",
                                    residual);
        }
        return out;
      }
    } else {
      best = std::min(best, estimate);
    }

    if (matvecs >= cap) {
      throw NonConvergenceError("lanczos: no convergence after " + std::to_string(matvecs) +
                                    " matrix-vector products (best residual " +
                                    std::to_string(best) + ")",
                                best);
    }

    // Restart: rotate the basis onto the lowest `keep` Ritz vectors and append
    // the last Lanczos vector.
    const std::size_t k = std::min(keep, built - 1);
    Matrix rotated(k, n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < built; ++l) axpy(spec.vectors(l, i), basis.row(l), rotated.row(i));
    for (std::size_t i = 0; i < k; ++i)
      std::copy(rotated.row(i).begin(), rotated.row(i).end(), basis.row(i).begin());
    auto last = basis.row(built);
    std::copy(last.begin(), last.end(), basis.row(k).begin());

    proj = Matrix(m, m);
    for (std::size_t i = 0; i < k; ++i) proj(i, i) = spec.values[i];
    locked = k;
  }
}

}  // namespace ringflow

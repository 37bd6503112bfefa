#pragma once

// Smallest eigenpair of a real symmetric operator.
//
// Dense matrices up to `dense_limit` go through Householder tridiagonalization,
// implicit-shift QL for the spectrum and inverse iteration for the single
// eigenvector that is needed. Larger problems, and anything that is only
// available as a matrix-vector product, go through thick-restart Lanczos with
// full reorthogonalization (lanczos.hpp). Every returned pair carries its
// explicit residual ||A v - lambda v||.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringflow/dense.hpp"
#include "ringflow/tridiagonal.hpp"

namespace ringflow {

class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t dim) : entries_(dim, dim) {}
  explicit SymmetricMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
      throw std::invalid_argument("SymmetricMatrix: matrix is not square");
    }
  }

  std::size_t dim() const noexcept { return entries_.rows(); }
  double& operator()(std::size_t i, std::size_t j) noexcept { return entries_(i, j); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  const Matrix& entries() const noexcept { return entries_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < dim(); ++i) y[i] = dot(entries_.row(i), x);
  }
  double frobenius_norm() const noexcept { return ringflow::frobenius_norm(entries_); }

  // Largest |a_ij - a_ji| relative to max |a_ij|.
  double asymmetry() const noexcept {
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        scale = std::max(scale, std::abs(entries_(i, j)));
        if (j > i) worst = std::max(worst, std::abs(entries_(i, j) - entries_(j, i)));
      }
    }
    return scale == 0.0 ? 0.0 : worst / scale;
  }

 private:
  Matrix entries_;
};

/// Anything that can apply a real symmetric matrix to a vector.
template <class Op>
concept SymmetricOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
  { op.dim() } -> std::convertible_to<std::size_t>;
  { op.frobenius_norm() } -> std::convertible_to<double>;
  op.apply(x, y);
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
  std::size_t matvecs = 0;  // 0 on the dense path
};

struct SolverOptions {
  double tol = 1e-10;             // residual target relative to ||A||_F
  std::uint64_t seed = 0;         // Lanczos start vector
  std::size_t dense_limit = 512;  // dims above this use Lanczos
  std::size_t max_matvecs = 0;    // 0 means 50 * dim
  std::size_t krylov_dim = 96;
  std::size_t kept_ritz = 32;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

template <SymmetricOperator Op>
double eigen_residual(const Op& a, const EigenPair& p) {
  if (p.vector.size() != a.dim()) {
    throw std::invalid_argument("eigen_residual: vector length " + std::to_string(p.vector.size()) +
                                " does not match operator dimension " + std::to_string(a.dim()));
  }
  std::vector<double> av(a.dim());
  a.apply(p.vector, av);
  axpy(-p.value, p.vector, av);
  return norm2(av);
}

namespace detail {

// Makes the largest-magnitude entry positive so eigenvector dumps are reproducible.
inline void normalize_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (!v.empty() && v[best] < 0) scale(-1.0, v);
}

inline EigenPair dense_smallest(const SymmetricMatrix& a) {
  auto red = tridiag::householder_reduce(a.entries());
  std::vector<double> values = red.diag;
  tridiag::implicit_ql(values, red.offdiag, nullptr);
  const double lambda = values.front();

  auto y = tridiag::inverse_iteration(red.diag, red.offdiag, lambda);
  tridiag::apply_q(red, y);
  scale(1.0 / norm2(y), y);
  EigenPair out{lambda, std::move(y), 0.0, 0};
  return out;
}

}  // namespace detail

}  // namespace ringflow

#include "ringflow/lanczos.hpp"

namespace ringflow {

/// Algebraically smallest eigenvalue and a unit eigenvector of `a`.
///
/// Throws std::invalid_argument when `a` is not symmetric to 1e-12 relative or
/// tol is not positive, and NonConvergenceError when the residual target
/// `tol * ||A||_F` is not met within the iteration cap.
inline EigenPair smallest_eigenpair(const SymmetricMatrix& a, const SolverOptions& opt = {}) {
  if (a.dim() == 0) throw std::invalid_argument("smallest_eigenpair: empty matrix");
  if (!(opt.tol > 0)) throw std::invalid_argument("smallest_eigenpair: tol must be positive");
  if (a.asymmetry() > 1e-12) {
    throw std::invalid_argument("smallest_eigenpair: matrix is not symmetric");
  }
  const double target = opt.tol * std::max(a.frobenius_norm(), 1e-300);
  EigenPair p;
  if (a.dim() <= opt.dense_limit) {
    p = detail::dense_smallest(a);
  } else {
    return lanczos_smallest(a, opt);
  }
  detail::normalize_sign(p.vector);
  p.residual = eigen_residual(a, p);
  if (p.residual > target) {
    throw NonConvergenceError("smallest_eigenpair: dense residual " + std::to_string(p.residual) +
                                  " above target " + std::to_string(target),
                              p.residual);
  }
  return p;
}

/// Matrix-free variant; always Lanczos.
template <SymmetricOperator Op>
  requires(!std::same_as<Op, SymmetricMatrix>)
EigenPair smallest_eigenpair(const Op& a, const SolverOptions& opt = {}) {
  if (a.dim() == 0) throw std::invalid_argument("smallest_eigenpair: empty operator");
  if (!(opt.tol > 0)) throw std::invalid_argument("smallest_eigenpair: tol must be positive");
  return lanczos_smallest(a, opt);
}

}  // namespace ringflow

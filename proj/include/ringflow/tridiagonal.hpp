#pragma once

// Householder reduction of a dense symmetric matrix to tridiagonal form and the
// implicit-shift QL iteration on the result. Used directly by the dense
// smallest-eigenpair path and, with eigenvector accumulation, for the small
// projected matrices inside the Lanczos solver.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "ringflow/dense.hpp"

namespace ringflow::tridiag {

// A = Q T Q^T with Q = H_0 H_1 ... H_{n-3}, H_k = I - beta_k v_k v_k^T acting on
// indices k+1..n-1.
struct Reduction {
  std::vector<double> diag;
  std::vector<double> offdiag;  // offdiag[i] couples i and i+1; size n-1 (empty for n=1)
  Matrix reflectors;            // row k holds v_k in columns k+1..n-1
  std::vector<double> betas;
};

inline Reduction householder_reduce(Matrix a) {
  const std::size_t n = a.rows();
  Reduction out;
  out.diag.assign(n, 0.0);
  out.offdiag.assign(n > 0 ? n - 1 : 0, 0.0);
  out.betas.assign(n, 0.0);
  std::vector<double> p(n), w(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    auto x = a.row(k).subspan(k + 1);
    const double sigma = norm2(x);
    if (sigma == 0.0) {
      out.offdiag[k] = 0.0;
      continue;
    }
    // v = x + sign(x0)*|x| e1, so H x = -sign(x0)*|x| e1
    const double alpha = x[0] >= 0.0 ? -sigma : sigma;
    x[0] -= alpha;
    const double vtv = dot(x, x);
    const double beta = 2.0 / vtv;
    out.betas[k] = beta;
    out.offdiag[k] = alpha;

    const std::size_t m = n - k - 1;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = beta * dot(a.row(k + 1 + i).subspan(k + 1), x);
    }
    const double half = 0.5 * beta * dot(std::span<const double>(p.data(), m), x);
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - half * x[i];
    for (std::size_t i = 0; i < m; ++i) {
      auto r = a.row(k + 1 + i).subspan(k + 1);
      const double vi = x[i], wi = w[i];
      for (std::size_t j = 0; j < m; ++j) r[j] -= vi * w[j] + wi * x[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) out.diag[i] = a(i, i);
  if (n >= 2) out.offdiag[n - 2] = a(n - 2, n - 1);
  out.reflectors = std::move(a);
  return out;
}

// z <- Q z
inline void apply_q(const Reduction& r, std::span<double> z) {
  const std::size_t n = r.diag.size();
  for (std::size_t kk = n >= 2 ? n - 2 : 0; kk-- > 0;) {
    const double beta = r.betas[kk];
    if (beta == 0.0) continue;
    auto v = r.reflectors.row(kk).subspan(kk + 1);
    auto tail = z.subspan(kk + 1);
    axpy(-beta * dot(v, tail), v, tail);
  }
}

inline Matrix explicit_q(const Reduction& r) {
  const std::size_t n = r.diag.size();
  Matrix q(n, n);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    apply_q(r, col);
    for (std::size_t i = 0; i < n; ++i) q(i, j) = col[i];
  }
  return q;
}

// Implicit QL on (d, e). On return d holds the eigenvalues in ascending order.
// When vectors is non-null it must hold Q on entry (n x n, columns are basis
// vectors); on return column j is the eigenvector for d[j].
inline void implicit_ql(std::vector<double>& d, std::vector<double> offdiag, Matrix* vectors,
                        int max_sweeps_per_value = 60) {
  const std::size_t n = d.size();
  if (n == 0) return;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = offdiag[i];

  const double eps = std::numeric_limits<double>::epsilon();
  double shift_total = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int sweeps = 0;
      do {
        if (++sweeps > max_sweeps_per_value) {
          throw std::runtime_error("implicit_ql: no convergence");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift_total += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          if (vectors) {
            for (std::size_t k = 0; k < n; ++k) {
              double& vk1 = (*vectors)(k, ii + 1);
              double& vk0 = (*vectors)(k, ii);
              const double t = vk1;
              vk1 = s * vk0 + c * t;
              vk0 = c * vk0 - s * t;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0.0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = d[order[i]];
  d = std::move(sorted);
  if (vectors) {
    Matrix v(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) v(k, j) = (*vectors)(k, order[j]);
    *vectors = std::move(v);
  }
}

// Inverse iteration on the tridiagonal (d, e) for an eigenvector at the
// (already accurate) eigenvalue shift. Gaussian elimination with partial
// pivoting; zero pivots are replaced by a tiny multiple of the matrix scale.
inline std::vector<double> inverse_iteration(std::span<const double> d, std::span<const double> e,
                                             double shift, int iterations = 3) {
  const std::size_t n = d.size();
  std::vector<double> x(n, 1.0);
  if (n == 1) return x;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::abs(d[i]) + (i + 1 < n ? std::abs(e[i]) : 0.0) +
                                (i > 0 ? std::abs(e[i - 1]) : 0.0));
  }
  if (scale == 0.0) scale = 1.0;
  const double tiny = std::numeric_limits<double>::epsilon() * scale;

  // U has diagonal u0 and two superdiagonals u1, u2; L multipliers and pivots.
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), mult(n, 0.0);
  std::vector<char> swapped(n, 0);
  {
    double cur_d = d[0] - shift;
    double cur_u1 = e[0];
    double cur_u2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double below = e[i];
      const double next_d = d[i + 1] - shift;
      const double next_u1 = i + 2 < n ? e[i + 1] : 0.0;
      if (std::abs(cur_d) >= std::abs(below)) {
        const double piv = cur_d == 0.0 ? tiny : cur_d;
        const double l = below / piv;
        u0[i] = piv;
        u1[i] = cur_u1;
        u2[i] = cur_u2;
        mult[i] = l;
        cur_d = next_d - l * cur_u1;
        cur_u1 = next_u1 - l * cur_u2;
        cur_u2 = 0.0;
      } else {
        const double l = cur_d / below;
        swapped[i] = 1;
        u0[i] = below;
        u1[i] = next_d;
        u2[i] = next_u1;
        mult[i] = l;
        cur_d = cur_u1 - l * next_d;
        cur_u1 = cur_u2 - l * next_u1;
        cur_u2 = 0.0;
      }
    }
    u0[n - 1] = cur_d == 0.0 ? tiny : cur_d;
  }

  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= mult[i] * x[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      if (ii + 1 < n) s -= u1[ii] * x[ii + 1];
      if (ii + 2 < n) s -= u2[ii] * x[ii + 2];
      double piv = u0[ii];
      if (std::abs(piv) < tiny) piv = piv < 0 ? -tiny : tiny;
      x[ii] = s / piv;
    }
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
  }
  return x;
}

}  // namespace ringflow::tridiag

namespace ringflow::tridiag {

struct FullSpectrum {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

// All eigenpairs of a small dense symmetric matrix.
inline FullSpectrum symmetric_eigen(const Matrix& a) {
  auto red = householder_reduce(a);
  FullSpectrum out{red.diag, explicit_q(red)};
  implicit_ql(out.values, red.offdiag, &out.vectors);
  return out;
}

}  // namespace ringflow::tridiag

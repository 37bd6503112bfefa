#pragma once

// Expansion coefficients of one- and two-particle ring states over the
// non-negative angular-momentum modes m = 0..n_max.
//
// Two-particle coefficients c_{mk} are stored as an (n_max+1) x (n_max+1)
// matrix with the first particle's mode as the row index. The flattened form
// used by the fermion embedding runs the first index fastest:
// flat(m, k) = m + k (n_max + 1), i.e. c = (c_00, c_10, ..., c_N0, c_01, ...).

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringflow/dense.hpp"

namespace ringflow {

enum class SymmetryTag { boson, fermion, none };

/// +1, -1 or 0 (unconstrained).
constexpr int sigma(SymmetryTag tag) noexcept {
  switch (tag) {
    case SymmetryTag::boson: return 1;
    case SymmetryTag::fermion: return -1;
    case SymmetryTag::none: return 0;
  }
  return 0;
}

inline SymmetryTag tag_from_sigma(int s) {
  if (s == 1) return SymmetryTag::boson;
  if (s == -1) return SymmetryTag::fermion;
  if (s == 0) return SymmetryTag::none;
  throw std::invalid_argument("sigma must be +1, -1 or 0, got " + std::to_string(s));
}

struct CoefficientVector {
  std::size_t n_max = 0;
  std::vector<double> values;  // c_0..c_N

  CoefficientVector() = default;
  explicit CoefficientVector(std::vector<double> v) : n_max(v.empty() ? 0 : v.size() - 1), values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("CoefficientVector: no modes");
  }

  static CoefficientVector basis(std::size_t n_max, std::size_t m) {
    std::vector<double> v(n_max + 1, 0.0);
    v.at(m) = 1.0;
    return CoefficientVector(std::move(v));
  }

  double norm_squared() const noexcept { return dot(values, values); }
};

struct CoefficientMatrix {
  std::size_t n_max = 0;
  Matrix values;  // values(m, k) = c_{mk}
  SymmetryTag tag = SymmetryTag::none;

  CoefficientMatrix() = default;
  CoefficientMatrix(Matrix v, SymmetryTag t) : values(std::move(v)), tag(t) {
    if (values.rows() == 0 || values.rows() != values.cols()) {
      throw std::invalid_argument("CoefficientMatrix: coefficients must form a non-empty square matrix");
    }
    n_max = values.rows() - 1;
  }

  std::size_t modes() const noexcept { return n_max + 1; }
  double operator()(std::size_t m, std::size_t k) const noexcept { return values(m, k); }
  double norm_squared() const noexcept { return dot(values.flat(), values.flat()); }

  std::vector<double> flatten() const {
    const std::size_t d = modes();
    std::vector<double> flat(d * d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t m = 0; m < d; ++m) flat[m + k * d] = values(m, k);
    return flat;
  }

  static CoefficientMatrix from_flat(std::span<const double> flat, SymmetryTag tag) {
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    if (d == 0 || d * d != flat.size()) {
      throw std::invalid_argument("CoefficientMatrix::from_flat: length " + std::to_string(flat.size()) +
                                  " is not a perfect square");
    }
    Matrix v(d, d);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t m = 0; m < d; ++m) v(m, k) = flat[m + k * d];
    return {std::move(v), tag};
  }
};

/// Exact exchange symmetry for the tag (and zero diagonal for fermions).
inline bool has_exchange_symmetry(const CoefficientMatrix& c) {
  const int s = sigma(c.tag);
  if (s == 0) return true;
  for (std::size_t m = 0; m < c.modes(); ++m) {
    if (s < 0 && c(m, m) != 0.0) return false;
    for (std::size_t k = m + 1; k < c.modes(); ++k)
      if (c(k, m) != s * c(m, k)) return false;
  }
  return true;
}

/// Throws std::invalid_argument unless `c` is a normalized state obeying its tag.
inline void require_state(const CoefficientMatrix& c, double norm_tol = 1e-12) {
  if (std::abs(c.norm_squared() - 1.0) > norm_tol) {
    throw std::invalid_argument("coefficient matrix is not normalized (sum c^2 = " +
                                std::to_string(c.norm_squared()) + ")");
  }
  if (!has_exchange_symmetry(c)) {
    throw std::invalid_argument("coefficient matrix violates its exchange symmetry");
  }
}

/// Imposes c_{km} = sigma c_{mk} by averaging and zeroes the fermionic
/// diagonal. Each symmetric pair is written once so the symmetry holds bit for bit.
inline void impose_exchange_symmetry(Matrix& raw, SymmetryTag tag) {
  const std::size_t d = raw.rows();
  const int s = sigma(tag);
  if (s == 0) return;
  for (std::size_t m = 0; m < d; ++m) {
    if (s < 0) raw(m, m) = 0.0;
    for (std::size_t k = m + 1; k < d; ++k) {
      const double v = 0.5 * (raw(m, k) + s * raw(k, m));
      raw(m, k) = v;
      raw(k, m) = s * v;
    }
  }
}

inline CoefficientMatrix symmetrize_and_normalize(Matrix raw, SymmetryTag tag) {
  impose_exchange_symmetry(raw, tag);
  const double nrm = norm2(raw.flat());
  if (nrm == 0.0) throw std::invalid_argument("symmetrize_and_normalize: zero state");
  // Same divisor everywhere keeps c_km == sigma c_mk exact.
  for (double& v : raw.flat()) v /= nrm;
  return {std::move(raw), tag};
}

/// Normal entries, sigma-symmetrized, normalized. Reproducible for a given engine state.
inline CoefficientMatrix random_state(std::size_t n_max, SymmetryTag tag, std::mt19937_64& rng) {
  if (tag == SymmetryTag::fermion && n_max < 1) {
    throw std::invalid_argument("random_state: no antisymmetric state with a single mode");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix raw(n_max + 1, n_max + 1);
  for (double& v : raw.flat()) v = gauss(rng);
  return symmetrize_and_normalize(std::move(raw), tag);
}

inline CoefficientVector random_vector(std::size_t n_max, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(n_max + 1);
  for (double& x : v) x = gauss(rng);
  scale(1.0 / norm2(v), v);
  return CoefficientVector(std::move(v));
}

/// c_{mk} = a_m a_k (unit norm if a is), tagged bosonic.
inline CoefficientMatrix product_state(const CoefficientVector& a) {
  const std::size_t d = a.values.size();
  Matrix v(d, d);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t k = 0; k < d; ++k) v(m, k) = a.values[m] * a.values[k];
  return {std::move(v), SymmetryTag::boson};
}

}  // namespace ringflow

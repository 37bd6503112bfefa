#pragma once

// Complex two-particle coefficients c = a + i b never lower Delta_2 below the
// real minimum: Delta_2(c) = Delta_2(a) + Delta_2(b) with |a|^2 + |b|^2 = 1, and
// each real part is bounded by the real minimum times its weight. This header
// checks that statement on random states; the production path stays real.

#include <complex>
#include <cstdint>
#include <random>

#include "ringflow/boson_bound.hpp"
#include "ringflow/fermion_bound.hpp"

namespace ringflow {

struct ComplexState {
  Matrix re;
  Matrix im;
  SymmetryTag tag = SymmetryTag::none;
};

enum class ComplexMix { mixed, real_only, imaginary_only };

inline ComplexState random_complex_state(std::size_t n_max, SymmetryTag tag, std::mt19937_64& rng,
                                         ComplexMix mix = ComplexMix::mixed) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexState c{Matrix(n_max + 1, n_max + 1), Matrix(n_max + 1, n_max + 1), tag};
  if (mix != ComplexMix::imaginary_only)
    for (double& v : c.re.flat()) v = gauss(rng);
  if (mix != ComplexMix::real_only)
    for (double& v : c.im.flat()) v = gauss(rng);
  impose_exchange_symmetry(c.re, tag);
  impose_exchange_symmetry(c.im, tag);
  const double nrm = std::sqrt(dot(c.re.flat(), c.re.flat()) + dot(c.im.flat(), c.im.flat()));
  for (double& v : c.re.flat()) v /= nrm;
  for (double& v : c.im.flat()) v /= nrm;
  return c;
}

/// 2 sum_{mnk} conj(c_mk) K_mn c_nk in complex arithmetic.
inline std::complex<double> complex_delta2(const ComplexState& c, const KernelMatrix& k) {
  const std::size_t d = k.modes();
  std::complex<double> s = 0.0;
  for (std::size_t kk = 0; kk < d; ++kk)
    for (std::size_t m = 0; m < d; ++m) {
      const std::complex<double> cm(c.re(m, kk), c.im(m, kk));
      for (std::size_t n = 0; n < d; ++n) s += std::conj(cm) * k(m, n) * std::complex<double>(c.re(n, kk), c.im(n, kk));
    }
  return 2.0 * s;
}

/// 2 sum_{mnk} x_mk K_mn x_nk for an unnormalized real matrix x.
inline double real_form(const Matrix& x, const KernelMatrix& k) {
  return 2.0 * dot(x.flat(), multiply(k.matrix().entries(), x).flat());
}

/// Minimum of Delta_2 over real normalized states of the given symmetry.
inline double real_minimum(Alpha alpha, std::size_t n_max, SymmetryTag tag, const SolverOptions& opt = {}) {
  if (tag == SymmetryTag::fermion) return fermion_bound(alpha, n_max, opt).q_f;
  return boson_bound(alpha, n_max, opt).q_b;  // the unconstrained minimum is the bosonic one
}

struct ComplexCheckReport {
  bool passed = true;
  std::size_t trials = 0;
  double real_minimum = 0.0;
  double max_imaginary = 0.0;    // |Im Delta_2|
  double max_split_error = 0.0;  // |Re Delta_2 - (form(a) + form(b))|
  double min_margin = 0.0;       // min Re Delta_2 - real_minimum
};

inline ComplexCheckReport appendix_a_check(std::size_t trials, std::size_t n_max, Alpha alpha, SymmetryTag tag,
                                           std::uint64_t seed = 0, ComplexMix mix = ComplexMix::mixed,
                                           const SolverOptions& opt = {}) {
  if (trials == 0) throw std::invalid_argument("appendix_a_check: need at least one trial");
  const auto k = build_kernel(alpha, n_max);
  ComplexCheckReport rep;
  rep.trials = trials;
  rep.real_minimum = real_minimum(alpha, n_max, tag, opt);
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto c = random_complex_state(n_max, tag, rng, mix);
    const auto z = complex_delta2(c, k);
    const double split = real_form(c.re, k) + real_form(c.im, k);
    rep.max_imaginary = std::max(rep.max_imaginary, std::abs(z.imag()));
    rep.max_split_error = std::max(rep.max_split_error, std::abs(z.real() - split));
    rep.min_margin = std::min(rep.min_margin, z.real() - rep.real_minimum);
  }
  rep.passed = rep.max_imaginary <= 1e-12 && rep.max_split_error <= 1e-12 && rep.min_margin >= -1e-10;
  return rep;
}

}  // namespace ringflow

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ringflow/two_particle.hpp"

using namespace ringflow;
using Catch::Matchers::WithinAbs;

namespace {

oracle::Wave2 wave(const CoefficientMatrix& c) {
  oracle::Wave2 w;
  w.c.assign(c.modes(), std::vector<double>(c.modes()));
  for (std::size_t m = 0; m < c.modes(); ++m)
    for (std::size_t k = 0; k < c.modes(); ++k) w.c[m][k] = c(m, k);
  return w;
}

CoefficientMatrix basis_pair(std::size_t n, std::size_t m1, std::size_t m2, SymmetryTag tag) {
  Matrix raw(n + 1, n + 1);
  raw(m1, m2) = 1.0;
  return symmetrize_and_normalize(raw, tag);
}

}  // namespace

TEST_CASE("random states obey their symmetry exactly") {
  std::mt19937_64 rng(30);
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
    const auto c = random_state(6, tag, rng);
    CHECK(has_exchange_symmetry(c));
    CHECK_THAT(c.norm_squared(), WithinAbs(1.0, 1e-14));
    CHECK_NOTHROW(require_state(c));
  }
  CHECK_THROWS_AS(random_state(0, SymmetryTag::fermion, rng), std::invalid_argument);
  CHECK_THROWS_AS(tag_from_sigma(2), std::invalid_argument);
}

TEST_CASE("delta2_quadratic") {
  const Alpha a(0.33);
  const auto k = build_kernel(a, 5);
  CHECK(delta2_quadratic(basis_pair(5, 0, 0, SymmetryTag::boson), k) == 0.0);
  std::mt19937_64 rng(31);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + t % 6;
    const auto kk = build_kernel(a, n);
    const auto c = random_state(n, t % 2 ? SymmetryTag::boson : SymmetryTag::fermion, rng);
    double naive = 0.0;
    for (std::size_t m = 0; m <= n; ++m)
      for (std::size_t l = 0; l <= n; ++l)
        for (std::size_t q = 0; q <= n; ++q) naive += c(m, q) * kk(m, l) * c(l, q);
    CHECK_THAT(delta2_quadratic(c, kk), WithinAbs(2.0 * naive, 1e-13));
  }
}

TEST_CASE("basis-pair current and density") {
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion})
    for (std::size_t m1 = 0; m1 <= 3; ++m1)
      for (std::size_t m2 = 0; m2 <= 3; ++m2) {
        if (tag == SymmetryTag::fermion && m1 == m2) continue;
        const auto c = basis_pair(3, m1, m2, tag);
        for (double th : {0.0, 2.0})
          for (double t : {0.0, 1.5}) {
            CHECK_THAT(current_J(c, th, t), WithinAbs((m1 + m2) / (2.0 * std::numbers::pi), 1e-14));
            CHECK_THAT(density_rho(c, th, t), WithinAbs(1.0 / std::numbers::pi, 1e-14));
          }
      }
  CHECK_THROWS_AS(PairObservables(CoefficientMatrix(Matrix(2, 2), SymmetryTag::none)), std::invalid_argument);
}

TEST_CASE("current and density match wavefunction quadrature over the partner coordinate") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 24; ++trial) {
    const auto tag = trial % 2 ? SymmetryTag::boson : SymmetryTag::fermion;
    const auto c = random_state(1 + trial % 5, tag, rng);
    const auto w = wave(c);
    for (double th : {0.0, 0.8, 4.4})
      for (double t : {0.0, 0.37, 2.9}) {
        const auto [j, rho] = w.current_density(th, t);
        CHECK_THAT(current_J(c, th, t), WithinAbs(j, 1e-8));
        CHECK_THAT(density_rho(c, th, t), WithinAbs(rho, 1e-8));
      }
  }
}

TEST_CASE("observables are unchanged under the exchange c -> sigma c^T") {
  std::mt19937_64 rng(33);
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
    const auto c = random_state(4, tag, rng);
    Matrix swapped(5, 5);
    for (std::size_t m = 0; m < 5; ++m)
      for (std::size_t k = 0; k < 5; ++k) swapped(m, k) = sigma(tag) * c(k, m);
    const CoefficientMatrix d(swapped, tag);
    for (double th : {0.3, 2.2}) {
      CHECK_THAT(current_J(d, th, 0.4), WithinAbs(current_J(c, th, 0.4), 1e-15));
      CHECK_THAT(density_rho(d, th, 0.4), WithinAbs(density_rho(c, th, 0.4), 1e-15));
    }
  }
}

TEST_CASE("current at theta = 0, t = 0 is the plain series") {
  // every phase vanishes, leaving sum (m+n) G_mn / 2pi
  std::mt19937_64 rng(34);
  const auto c = random_state(4, SymmetryTag::boson, rng);
  double s = 0.0;
  for (std::size_t m = 0; m <= 4; ++m)
    for (std::size_t n = 0; n <= 4; ++n)
      for (std::size_t k = 0; k <= 4; ++k) s += (m + n) * c(m, k) * c(n, k);
  CHECK_THAT(current_J(c, 0.0, 0.0), WithinAbs(s / (2.0 * std::numbers::pi), 1e-14));
}

TEST_CASE("density integrates to two particles") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_state(1 + trial % 8, trial % 2 ? SymmetryTag::boson : SymmetryTag::fermion, rng);
    const PairObservables obs(c);
    const int pts = 256;
    double s = 0.0;
    for (int i = 0; i < pts; ++i) s += obs.density(2.0 * std::numbers::pi * i / pts, 0.1 * trial);
    CHECK_THAT(s * 2.0 * std::numbers::pi / pts, WithinAbs(2.0, 1e-10));
  }
}

TEST_CASE("continuity equation") {
  const std::vector<double> thetas{0.0, 1.0, 2.5, 4.0, 5.5};
  const std::vector<double> times{0.0, 0.4, 1.3};
  CHECK(continuity_check(basis_pair(4, 2, 3, SymmetryTag::boson), thetas, times, 1e-3) < 1e-10);

  std::mt19937_64 rng(36);
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
    const auto c = random_state(5, tag, rng);
    const double d1 = continuity_check(c, thetas, times, 1e-2);
    const double d2 = continuity_check(c, thetas, times, 5e-3);
    CHECK_THAT(d1 / d2, WithinAbs(4.0, 0.2));
    CHECK(continuity_check(c, thetas, times, 1e-3) < 1e-4);
  }
}

TEST_CASE("delta2 quadrature") {
  const Alpha a(0.7);
  CHECK_THAT(delta2_quadrature(basis_pair(4, 1, 3, SymmetryTag::fermion), a),
             WithinAbs(2.0 * 0.7 * 4 / std::numbers::pi, 1e-12));
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const Alpha al(0.05 + 0.04 * trial);
    const auto c = random_state(n, trial % 2 ? SymmetryTag::boson : SymmetryTag::fermion, rng);
    CHECK_THAT(delta2_quadrature(c, al), WithinAbs(delta2_quadratic(c, build_kernel(al, n)), 1e-8));
  }
  // independent Simpson integration of the wavefunction current
  const auto c = random_state(3, SymmetryTag::boson, rng);
  const auto w = wave(c);
  const double ref = oracle::simpson([&](double t) { return w.current_density(0.0, t).first; }, -1.4, 1.4, 2000);
  CHECK_THAT(delta2_quadrature(c, a), WithinAbs(ref, 1e-9));
}

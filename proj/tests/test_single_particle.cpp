#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ringflow/single_particle.hpp"

using namespace ringflow;
using Catch::Matchers::WithinAbs;

TEST_CASE("two-mode closed form") {
  for (double a : {0.01, 0.2, 0.5, 1.0, 2.2, 3.0}) {
    const double s = std::sin(a) / a;
    const double expect = a / std::numbers::pi * (1.0 - std::sqrt(1.0 + s * s));
    CHECK_THAT(lambda_ring(Alpha(a), 1).lambda_ring, WithinAbs(expect, 1e-15));
  }
  CHECK_THAT(lambda_ring(Alpha(std::numbers::pi), 1).lambda_ring, WithinAbs(0.0, 1e-15));
}

TEST_CASE("lambda_ring matches the Jacobi oracle on the long-double kernel") {
  for (double a : {0.1, 0.7, 1.16}) {
    const auto ev = oracle::jacobi_eigenvalues(oracle::kernel(a, 25));
    CHECK_THAT(lambda_ring(Alpha(a), 25).lambda_ring, WithinAbs(static_cast<double>(ev.front()), 1e-13));
  }
  CHECK_THROWS_AS(lambda_ring(Alpha(0.5), 0), std::invalid_argument);
}

TEST_CASE("lambda_ring is non-increasing in N") {
  for (double a : {0.05, 0.4, 1.16, 2.5}) {
    double prev = 1.0;
    for (std::size_t n = 1; n <= 60; ++n) {
      const double v = lambda_ring(Alpha(a), n).lambda_ring;
      CHECK(v <= prev + 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("delta1_quadratic") {
  const Alpha a(0.45);
  const auto k = build_kernel(a, 6);
  CHECK(delta1_quadratic(CoefficientVector::basis(6, 0), k) == 0.0);
  for (std::size_t m = 1; m <= 6; ++m)
    CHECK_THAT(delta1_quadratic(CoefficientVector::basis(6, m), k), WithinAbs(2.0 * m * 0.45 / std::numbers::pi, 1e-15));
  const auto r = lambda_ring(a, 6);
  CHECK_THAT(delta1_quadratic(r.minimizer, k), WithinAbs(r.lambda_ring, 1e-12));
  CHECK_THROWS_AS(delta1_quadratic(CoefficientVector::basis(3, 0), k), std::invalid_argument);
}

TEST_CASE("current_j") {
  for (std::size_t m = 0; m <= 4; ++m)
    for (double th : {0.0, 1.1, 5.0})
      for (double t : {0.0, 0.3, 7.0})
        CHECK_THAT(current_j(CoefficientVector::basis(4, m), th, t), WithinAbs(m / (2.0 * std::numbers::pi), 1e-15));

  const CoefficientVector half({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  CHECK_THAT(current_j(half, 0.0, 0.0), WithinAbs(1.0 / (2.0 * std::numbers::pi), 1e-15));

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_vector(1 + trial % 8, rng);
    const oracle::Wave1 psi{c.values};
    for (double th : {0.0, 0.9, 3.3})
      for (double t : {0.0, 0.21, 1.7}) CHECK_THAT(current_j(c, th, t), WithinAbs(psi.current(th, t), 1e-13));
  }
}

TEST_CASE("delta1 quadrature") {
  const Alpha a(0.6);
  CHECK_THAT(delta1_quadrature(CoefficientVector::basis(3, 0), a), WithinAbs(0.0, 1e-15));
  CHECK_THAT(delta1_quadrature(CoefficientVector::basis(3, 1), a), WithinAbs(2.0 * 0.6 / std::numbers::pi, 1e-13));

  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Alpha al(0.05 + 0.05 * trial);
    const auto c = random_vector(n, rng);
    CHECK_THAT(delta1_quadrature(c, al), WithinAbs(delta1_quadratic(c, build_kernel(al, n)), 1e-8));
  }
  // independent check: Simpson integration of the wavefunction current over the window
  const auto c = random_vector(5, rng);
  const oracle::Wave1 psi{c.values};
  const double simpson = oracle::simpson([&](double t) { return psi.current(0.0, t); }, -1.2, 1.2, 4000);
  CHECK_THAT(delta1_quadrature(c, a), WithinAbs(simpson, 1e-10));
  CHECK_THROWS_AS(delta1_quadrature(c, a, 8), std::invalid_argument);
}

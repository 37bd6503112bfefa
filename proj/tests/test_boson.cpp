#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ringflow/boson_bound.hpp"
#include "ringflow/two_particle.hpp"

using namespace ringflow;
using Catch::Matchers::WithinAbs;

namespace {

// Minimum of Delta_2 over the symmetric sector, from an orthonormal basis of
// symmetric pair states and the full two-particle form 2 (K x I).
long double symmetric_sector_minimum(double alpha, int n) {
  const auto k = oracle::kernel(alpha, n);
  std::vector<std::vector<std::pair<int, int>>> basis;  // each entry: list of (m, k) with equal weight
  for (int m = 0; m <= n; ++m)
    for (int q = m; q <= n; ++q) basis.push_back(m == q ? std::vector<std::pair<int, int>>{{m, m}}
                                                      : std::vector<std::pair<int, int>>{{m, q}, {q, m}});
  const std::size_t d = basis.size();
  oracle::Dense a(d, std::vector<long double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      long double s = 0.0L;
      for (auto [m, q] : basis[i])
        for (auto [l, r] : basis[j])
          if (q == r) s += k[m][l];
      a[i][j] = 2.0L * s / std::sqrt(static_cast<long double>(basis[i].size() * basis[j].size()));
    }
  return oracle::jacobi_eigenvalues(a).front();
}

}  // namespace

TEST_CASE("Q_B equals twice lambda_ring and the symmetric-sector minimum") {
  for (int n = 1; n <= 6; ++n)
    for (double a : {0.15, 0.6, 1.16}) {
      const auto r = boson_bound(Alpha(a), n);
      CHECK(r.q_b == 2.0 * lambda_ring(Alpha(a), n).lambda_ring);
      CHECK_THAT(r.q_b, WithinAbs(static_cast<double>(symmetric_sector_minimum(a, n)), 1e-13));
    }
  CHECK_THAT(boson_bound(Alpha(std::numbers::pi), 1).q_b, WithinAbs(0.0, 1e-15));
}

TEST_CASE("minimizing product state") {
  for (std::size_t n : {1, 4, 20, 80})
    for (double a : {0.2, 1.16, 2.8}) {
      const auto r = boson_bound(Alpha(a), n);
      CHECK(boson_state_check(r));
      CHECK_THAT(delta2_quadratic(r.state, build_kernel(Alpha(a), n)), WithinAbs(r.q_b, 1e-11));
    }
}

TEST_CASE("state check rejects damaged states") {
  auto r = boson_bound(Alpha(0.9), 6);
  auto bad = r;
  bad.state.values(2, 3) += 1e-3;
  bad.state.values(3, 2) += 1e-3;
  CHECK_FALSE(boson_state_check(bad));
  bad = r;
  bad.q_b += 1e-9;
  CHECK_FALSE(boson_state_check(bad));
}

TEST_CASE("random symmetric states never beat Q_B") {
  std::mt19937_64 rng(40);
  const Alpha a(1.16);
  const auto k = build_kernel(a, 7);
  const double qb = boson_bound(a, 7).q_b;
  for (int t = 0; t < 100; ++t) CHECK(delta2_quadratic(random_state(7, SymmetryTag::boson, rng), k) > qb);
}

TEST_CASE("Q_B delta2 quadrature of the minimizing state") {
  const Alpha a(1.1);
  const auto r = boson_bound(a, 12);
  CHECK_THAT(delta2_quadrature(r.state, a), WithinAbs(r.q_b, 1e-8));
}

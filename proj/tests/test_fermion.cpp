#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ringflow/boson_bound.hpp"
#include "ringflow/complex_states.hpp"
#include "ringflow/fermion_bound.hpp"
#include "ringflow/two_particle.hpp"

using namespace ringflow;
using Catch::Matchers::WithinAbs;

namespace {

// Dense M^T K^ M in long double with K^ the block-diagonal K x I on flat(m, k) = m + k (N+1).
oracle::Dense dense_reduced(double alpha, std::size_t n) {
  const auto k = oracle::kernel(alpha, static_cast<int>(n));
  const std::size_t d = n + 1, big = d * d;
  oracle::Dense khat(big, std::vector<long double>(big));
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t q = 0; q < d; ++q)
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t r = 0; r < d; ++r) {
          khat[m + q * d][l + r * d] = q == r ? k[m][l] : 0.0L;
        }
  const Matrix mm = build_antisymmetrizer(n).dense();
  const std::size_t cols = mm.cols();
  oracle::Dense out(cols, std::vector<long double>(cols));
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      long double s = 0.0L;
      for (std::size_t a = 0; a < big; ++a) {
        if (mm(a, i) == 0.0) continue;
        for (std::size_t b = 0; b < big; ++b) s += mm(a, i) * khat[a][b] * mm(b, j);
      }
      out[i][j] = s;
    }
  return out;
}

}  // namespace

TEST_CASE("antisymmetrizer layout") {
  SECTION("N = 1") {
    const auto m = build_antisymmetrizer(1).dense();
    REQUIRE(m.rows() == 4);
    REQUIRE(m.cols() == 1);
    CHECK(m(0, 0) == 0);
    CHECK(m(1, 0) == 1);
    CHECK(m(2, 0) == -1);
    CHECK(m(3, 0) == 0);
  }
  SECTION("N = 2 matches the printed 9 x 3 matrix") {
    const double expect[9][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, 0, 0},
                                 {0, 0, 1}, {0, -1, 0}, {0, 0, -1}, {0, 0, 0}};
    const auto m = build_antisymmetrizer(2).dense();
    REQUIRE(m.rows() == 9);
    REQUIRE(m.cols() == 3);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == expect[i][j]);
  }
  SECTION("pair ordering") {
    const auto m = build_antisymmetrizer(3);
    const std::vector<std::pair<std::size_t, std::size_t>> order{{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}};
    REQUIRE(m.pairs().size() == order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      CHECK(m.pairs()[i].m == order[i].first);
      CHECK(m.pairs()[i].k == order[i].second);
    }
  }
  CHECK_THROWS_AS(build_antisymmetrizer(0), NoAntisymmetricStates);
}

TEST_CASE("M^T M = 2I exactly") {
  for (std::size_t n = 1; n <= 70; n += (n < 12 ? 1 : 29)) {
    const auto m = build_antisymmetrizer(n);
    const auto g = m.gram();
    const std::size_t d = m.cols();
    REQUIRE(d == n * (n + 1) / 2);
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) ok = ok && g[i * d + j] == (i == j ? 2 : 0);
    CHECK(ok);
  }
}

TEST_CASE("embed and project") {
  std::mt19937_64 rng(50);
  std::normal_distribution<double> g;
  const auto m = build_antisymmetrizer(5);
  std::vector<double> u(m.cols());
  for (double& v : u) v = g(rng);
  const auto c = m.embed(u);
  CHECK(has_exchange_symmetry(c));
  const auto back = m.project(c.values);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK_THAT(back[i], WithinAbs(2.0 * u[i], 1e-15));
}

TEST_CASE("reduced matrix") {
  SECTION("N = 1 is 2 alpha / pi") {
    const auto a = reduced_matrix(build_antisymmetrizer(1), build_kernel(Alpha(0.8), 1));
    REQUIRE(a.dim() == 1);
    CHECK_THAT(a(0, 0), WithinAbs(2 * 0.8 / std::numbers::pi, 1e-16));
  }
  SECTION("index expansion and product path agree with dense assembly for N <= 5") {
    for (std::size_t n = 1; n <= 5; ++n)
      for (double al : {0.4, 0.13, 2.1}) {
        const auto m = build_antisymmetrizer(n);
        const auto k = build_kernel(Alpha(al), n);
        const auto fast = reduced_matrix(m, k), slow = reduced_matrix_by_products(m, k);
        const auto ref = dense_reduced(al, n);
        for (std::size_t i = 0; i < fast.dim(); ++i)
          for (std::size_t j = 0; j < fast.dim(); ++j) {
            CHECK_THAT(fast(i, j), WithinAbs(static_cast<double>(ref[i][j]), 1e-13));
            CHECK_THAT(slow(i, j), WithinAbs(static_cast<double>(ref[i][j]), 1e-13));
          }
      }
  }
  SECTION("matrix-free operator matches the assembled matrix") {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> g;
    const auto m = build_antisymmetrizer(9);
    const auto k = build_kernel(Alpha(0.39), 9);
    const auto a = reduced_matrix(m, k);
    const ReducedOperator op(m, k);
    std::vector<double> x(a.dim()), y1(a.dim()), y2(a.dim());
    for (double& v : x) v = g(rng);
    a.apply(x, y1);
    op.apply(x, y2);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK_THAT(y2[i], WithinAbs(y1[i], 1e-13));
    CHECK_THAT(op.frobenius_norm(), WithinAbs(a.frobenius_norm(), 1e-12));
  }
  CHECK_THROWS_AS(reduced_matrix(build_antisymmetrizer(3), build_kernel(Alpha(0.4), 4)), std::invalid_argument);
}

TEST_CASE("Q_F equals the sum of the two lowest kernel eigenvalues") {
  // On antisymmetric c, Delta_2 = c^T (K x I + I x K) c, whose antisymmetric eigenvectors
  // are v_i ^ v_j with eigenvalue k_i + k_j, i < j.
  for (std::size_t n : {1, 2, 6, 15, 31})
    for (double a : {0.05, 0.39, 0.9}) {
      const auto ev = oracle::jacobi_eigenvalues(oracle::kernel(a, static_cast<int>(n)));
      CHECK_THAT(fermion_bound(Alpha(a), n).q_f, WithinAbs(static_cast<double>(ev[0] + ev[1]), 1e-12));
    }
}

TEST_CASE("dense and iterative fermion paths agree") {
  SolverOptions iterative;
  iterative.dense_limit = 0;
  for (std::size_t n : {12, 25})
    for (double a : {0.02, 0.39}) {
      const auto d = fermion_bound(Alpha(a), n);
      const auto l = fermion_bound(Alpha(a), n, iterative);
      CHECK(l.matvecs > 0);
      CHECK_THAT(l.q_f, WithinAbs(d.q_f, 1e-10));
      CHECK(fermion_state_check(l));
    }
}

TEST_CASE("fermion closed form and state checks") {
  for (double a : {0.05, 0.5, 1.0, 3.0}) CHECK_THAT(fermion_bound(Alpha(a), 1).q_f, WithinAbs(2 * a / std::numbers::pi, 1e-14));
  CHECK_THAT(fermion_bound(Alpha(0.5), 1).q_f, WithinAbs(1.0 / std::numbers::pi, 1e-15));

  const auto r = fermion_bound(Alpha(0.39), 10);
  CHECK(fermion_state_check(r));
  const auto k = build_kernel(Alpha(0.39), 10);
  CHECK_THAT(delta2_quadratic(r.full_state, k), WithinAbs(r.q_f, 1e-10));
  // leaving the fermionic sector changes Delta_2
  Matrix sym = r.full_state.values;
  for (std::size_t m = 0; m < sym.rows(); ++m)
    for (std::size_t q = 0; q < m; ++q) sym(q, m) = sym(m, q);
  CHECK(std::abs(delta2_quadratic(CoefficientMatrix(sym, SymmetryTag::boson), k) - r.q_f) > 1e-6);
  auto bad = r;
  bad.q_f -= 1e-8;
  CHECK_FALSE(fermion_state_check(bad));

  std::mt19937_64 rng(52);
  for (int t = 0; t < 100; ++t) CHECK(delta2_quadratic(random_state(10, SymmetryTag::fermion, rng), k) >= r.q_f - 1e-10);
}

TEST_CASE("statistics ordering and monotonicity in N") {
  for (double a : {0.1, 0.39, 0.7, 1.2}) {
    double pb = 1e9, pf = 1e9;
    for (std::size_t n = 1; n <= 20; ++n) {
      const double qb = boson_bound(Alpha(a), n).q_b, qf = fermion_bound(Alpha(a), n).q_f;
      CHECK(qf >= qb - 1e-12);
      CHECK(qb <= pb + 1e-12);
      CHECK(qf <= pf + 1e-12);
      pb = qb;
      pf = qf;
    }
  }
}

TEST_CASE("complex coefficients never beat the real minimum") {
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
    const auto rep = appendix_a_check(500, 5, Alpha(0.39), tag, 3);
    CHECK(rep.passed);
    CHECK(rep.max_imaginary <= 1e-12);
    CHECK(rep.min_margin >= -1e-10);
  }
  SECTION("purely real states have no imaginary-part form") {
    std::mt19937_64 rng(53);
    const auto k = build_kernel(Alpha(0.39), 5);
    const auto c = random_complex_state(5, SymmetryTag::boson, rng, ComplexMix::real_only);
    CHECK(real_form(c.im, k) == 0.0);
    CHECK_THAT(complex_delta2(c, k).real(), WithinAbs(real_form(c.re, k), 1e-14));
  }
  SECTION("purely imaginary states reduce to the form on the imaginary part") {
    std::mt19937_64 rng(54);
    const auto k = build_kernel(Alpha(0.39), 5);
    const auto c = random_complex_state(5, SymmetryTag::fermion, rng, ComplexMix::imaginary_only);
    CHECK_THAT(complex_delta2(c, k).real(), WithinAbs(real_form(c.im, k), 1e-14));
    CHECK(appendix_a_check(50, 5, Alpha(0.39), SymmetryTag::fermion, 1, ComplexMix::imaginary_only).passed);
  }
  CHECK_THROWS_AS(appendix_a_check(0, 5, Alpha(0.39), SymmetryTag::boson), std::invalid_argument);
}

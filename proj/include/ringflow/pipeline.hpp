#pragma once

// End-to-end runs shared by the command-line tool and the acceptance suite:
// `reproduce` computes every headline number plus the four figure tables, and
// `run_verification` replays the invariant suites. Output is a pure function
// of the configuration (thread count excluded), so equal configs give
// byte-identical artifacts.

#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringflow/complex_states.hpp"
#include "ringflow/figures.hpp"
#include "ringflow/version.hpp"

namespace ringflow {

using json = nlohmann::ordered_json;

inline json scan_config_json(const ScanConfig& s) {
  return {{"alpha_min", s.lo}, {"alpha_max", s.hi}, {"step", s.step}, {"refine_tol", s.refine_tol}};
}

inline json solver_json(const SolverOptions& o) {
  return {{"tol", o.tol}, {"seed", o.seed}, {"dense_limit", o.dense_limit}, {"krylov_dim", o.krylov_dim},
          {"kept_ritz", o.kept_ritz}, {"max_matvecs", o.max_matvecs}};
}

inline json metadata(const std::string& command, json config, std::uint64_t seed) {
  return {{"tool", "ringflow"}, {"version", version}, {"command", command}, {"seed", seed}, {"config", std::move(config)}};
}

inline std::string with_metadata(const json& meta, const std::string& csv) {
  return "# " + meta.dump() + "\n" + csv;
}

struct ReproduceConfig {
  bool quick = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  SolverOptions solver;
  std::size_t single_n = 400;
  ScanConfig single_scan{0.01, 3.0, 0.005, 1e-6};
  std::size_t fermion_lo = 20;
  std::size_t fermion_hi = 70;
  ScanConfig fermion_scan{0.01, 1.0, 0.005, 1e-6};
  std::vector<std::size_t> fig1a_ns{1, 2, 3, 10};
  std::vector<std::size_t> fig1b_ns{10, 20, 30, 40, 50};
  ScanConfig fig1a_grid{0.01, 1.0, 0.005, 1e-6};
  ScanConfig fig1b_grid{0.01, 0.55, 0.0025, 1e-6};

  static ReproduceConfig defaults(bool quick) {
    ReproduceConfig c;
    c.quick = quick;
    if (quick) {
      c.single_n = 30;
      c.fermion_hi = 30;
      c.fig1b_ns = {10, 20, 30};
    }
    return c;
  }

  json to_json() const {
    return {{"quick", quick},
            {"single_n", single_n},
            {"single_scan", scan_config_json(single_scan)},
            {"fermion_n_range", {fermion_lo, fermion_hi}},
            {"fermion_scan", scan_config_json(fermion_scan)},
            {"fig1a_ns", fig1a_ns},
            {"fig1b_ns", fig1b_ns},
            {"fig1a_grid", scan_config_json(fig1a_grid)},
            {"fig1b_grid", scan_config_json(fig1b_grid)},
            {"solver", solver_json(solver)}};
  }
};

struct Artifact {
  std::string name;
  std::string content;
};

struct ReproduceResult {
  json summary;
  std::vector<Artifact> files;  // fig1a.csv, fig1b.csv, fig2a.csv, fig2b.csv, summary.json
};

inline json fit_json(const ExtrapolationFit& f) {
  return {{"intercept", f.intercept},
          {"coefficients", {f.coefficients[0], f.coefficients[1], f.coefficients[2]}},
          {"rms_residual", f.rms_residual},
          {"points", f.points.size()}};
}

inline ReproduceResult reproduce(ReproduceConfig cfg, const std::function<void(const std::string&)>& progress = {}) {
  auto note = [&](const std::string& s) {
    if (progress) progress(s);
  };
  SolverOptions opt = cfg.solver;
  opt.seed = cfg.seed;
  cfg.solver = opt;
  for (ScanConfig* s : {&cfg.single_scan, &cfg.fermion_scan, &cfg.fig1a_grid, &cfg.fig1b_grid}) s->threads = cfg.threads;
  const json meta = metadata("reproduce", cfg.to_json(), cfg.seed);

  note("single-particle scan at N = " + std::to_string(cfg.single_n));
  const auto single = alpha_scan(single_bound_fn(opt), cfg.single_n, cfg.single_scan);
  const auto boson = boson_bound(Alpha(single.alpha_star), cfg.single_n, opt);

  note("fermion sweep N = " + std::to_string(cfg.fermion_lo) + ".." + std::to_string(cfg.fermion_hi));
  const auto sweep = fermion_sweep(cfg.fermion_lo, cfg.fermion_hi, cfg.fermion_scan, opt);

  note("figure 1 curves");
  const std::string fig1a = fig1_csv(cfg.fig1a_ns, cfg.fig1a_grid, opt);
  const std::string fig1b = fig1_csv(cfg.fig1b_ns, cfg.fig1b_grid, opt);

  json per_n = json::array();
  for (const auto& s : sweep.scans)
    per_n.push_back({{"n", s.n_max}, {"q_f", s.q_min}, {"alpha_star", s.alpha_star}, {"evaluations", s.evaluations}});

  ReproduceResult out;
  out.summary = {{"metadata", meta},
                 {"c_ring", -single.q_min},
                 {"alpha_ring", single.alpha_star},
                 {"single_n", cfg.single_n},
                 {"q_b", boson.q_b},
                 {"q_b_state_check", boson_state_check(boson)},
                 {"q_f", sweep.q_f.intercept},
                 {"alpha_star", sweep.alpha_star.intercept},
                 {"q_f_fit", fit_json(sweep.q_f)},
                 {"alpha_star_fit", fit_json(sweep.alpha_star)},
                 {"fermion_per_n", per_n}};
  out.files.push_back({"fig1a.csv", with_metadata(meta, fig1a)});
  out.files.push_back({"fig1b.csv", with_metadata(meta, fig1b)});
  out.files.push_back({"fig2a.csv", with_metadata(meta, fig2_csv(FigureId::fig2a, sweep))});
  out.files.push_back({"fig2b.csv", with_metadata(meta, fig2_csv(FigureId::fig2b, sweep))});
  out.files.push_back({"summary.json", out.summary.dump(2) + "\n"});
  return out;
}

// ---------------------------------------------------------------------------
// Property suites behind `verify`.

struct SuiteOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

struct VerifyConfig {
  bool quick = false;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

namespace verify_detail {

inline std::string num(double x) { return format_double(x); }

inline SuiteOutcome gram_identity(const VerifyConfig& cfg) {
  const std::size_t top = cfg.quick ? 30 : 70;
  for (std::size_t n = 1; n <= top; ++n) {
    const auto m = build_antisymmetrizer(n);
    const auto g = m.gram();
    const std::size_t d = m.cols();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (g[i * d + j] != (i == j ? 2 : 0)) {
          return {"antisymmetrizer M^T M = 2I", false, "violated at N = " + std::to_string(n)};
        }
  }
  return {"antisymmetrizer M^T M = 2I", true, "exact for N = 1.." + std::to_string(top)};
}

inline SuiteOutcome reduced_paths(const VerifyConfig&) {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 5; ++n)
    for (double a : {0.1, 0.4, 0.9}) {
      const auto m = build_antisymmetrizer(n);
      const auto k = build_kernel(Alpha(a), n);
      const auto fast = reduced_matrix(m, k), slow = reduced_matrix_by_products(m, k);
      for (std::size_t i = 0; i < fast.dim(); ++i)
        for (std::size_t j = 0; j < fast.dim(); ++j) worst = std::max(worst, std::abs(fast(i, j) - slow(i, j)));
    }
  return {"reduced matrix index expansion equals M^T K^ M", worst <= 1e-13, "max deviation " + num(worst)};
}

inline SuiteOutcome quadrature_delta1(const VerifyConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 1);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 10;
    const Alpha a(0.1 + 0.03 * t);
    const auto c = random_vector(n, rng);
    worst = std::max(worst, std::abs(delta1_quadrature(c, a) - delta1_quadratic(c, build_kernel(a, n))));
  }
  return {"Delta_1 quadrature equals quadratic form", worst <= 1e-8, "max deviation " + num(worst)};
}

inline SuiteOutcome quadrature_delta2(const VerifyConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 2);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 8;
    const Alpha a(0.1 + 0.03 * t);
    const auto c = random_state(n, t % 2 ? SymmetryTag::fermion : SymmetryTag::boson, rng);
    worst = std::max(worst, std::abs(delta2_quadrature(c, a) - delta2_quadratic(c, build_kernel(a, n))));
  }
  return {"Delta_2 quadrature equals quadratic form", worst <= 1e-8, "max deviation " + num(worst)};
}

inline SuiteOutcome density_integral(const VerifyConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 3);
  double worst = 0.0;
  const std::size_t pts = 1024;
  for (int t = 0; t < 50; ++t) {
    const auto c = random_state(1 + t % 8, t % 2 ? SymmetryTag::fermion : SymmetryTag::boson, rng);
    const PairObservables obs(c);
    const double time = 0.37 * t;
    double s = 0.0;
    for (std::size_t i = 0; i < pts; ++i) s += obs.density(2.0 * std::numbers::pi * i / pts, time);
    worst = std::max(worst, std::abs(s * 2.0 * std::numbers::pi / pts - 2.0));
  }
  return {"density integrates to 2", worst <= 1e-10, "max deviation " + num(worst)};
}

inline SuiteOutcome continuity_order(const VerifyConfig& cfg) {
  std::mt19937_64 rng(cfg.seed + 4);
  const auto c = random_state(4, SymmetryTag::boson, rng);
  std::vector<double> thetas, times;
  for (int i = 0; i < 8; ++i) thetas.push_back(0.7 * i);
  for (int i = 0; i < 8; ++i) times.push_back(0.3 * i);
  const double coarse = continuity_check(c, thetas, times, 1e-2);
  const double fine = continuity_check(c, thetas, times, 5e-3);
  const double ratio = coarse / fine;
  return {"continuity defect is second order in h", std::abs(ratio - 4.0) <= 0.2,
          "defect ratio " + num(ratio) + " (h = 1e-2 -> 5e-3)"};
}

inline SuiteOutcome basis_current(const VerifyConfig&) {
  double worst = 0.0;
  for (std::size_t m1 = 0; m1 <= 4; ++m1)
    for (std::size_t m2 = 0; m2 <= 4; ++m2)
      for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
        if (tag == SymmetryTag::fermion && m1 == m2) continue;
        Matrix raw(5, 5);
        raw(m1, m2) = 1.0;
        const auto c = symmetrize_and_normalize(raw, tag);
        const PairObservables obs(c);
        const double expect = static_cast<double>(m1 + m2) / (2.0 * std::numbers::pi);
        for (double th : {0.0, 1.3, 4.0})
          for (double t : {0.0, 0.8, 2.5}) worst = std::max(worst, std::abs(obs.current(th, t) - expect));
      }
  return {"basis-state current equals (m1+m2)/2pi", worst <= 1e-12, "max deviation " + num(worst)};
}

inline SuiteOutcome complex_states(const VerifyConfig& cfg) {
  std::string detail;
  bool ok = true;
  for (auto tag : {SymmetryTag::boson, SymmetryTag::fermion}) {
    const auto rep = appendix_a_check(500, 5, Alpha(0.4), tag, cfg.seed + 5, ComplexMix::mixed, cfg.solver);
    ok = ok && rep.passed;
    if (!detail.empty()) detail += ", ";
    detail += std::string(tag == SymmetryTag::boson ? "boson" : "fermion") + " margin " + num(rep.min_margin);
  }
  return {"complex coefficients never beat the real minimum", ok, detail};
}

inline SuiteOutcome bound_identities(const VerifyConfig& cfg) {
  bool ok = true;
  double worst_b = 0.0, worst_f = 0.0;
  for (std::size_t n : {1, 2, 5, 12, 25})
    for (double a : {0.2, 0.39, 0.8, 1.16}) {
      const auto b = boson_bound(Alpha(a), n, cfg.solver);
      const auto f = fermion_bound(Alpha(a), n, cfg.solver);
      const auto k = build_kernel(Alpha(a), n);
      worst_b = std::max(worst_b, std::abs(delta2_quadratic(b.state, k) - b.q_b));
      worst_f = std::max(worst_f, std::abs(delta2_quadratic(f.full_state, k) - f.q_f));
      ok = ok && boson_state_check(b) && fermion_state_check(f);
    }
  ok = ok && worst_b <= 1e-11 && worst_f <= 1e-10;
  return {"Delta_2 of minimizing states reproduces Q_B and Q_F", ok,
          "boson " + num(worst_b) + ", fermion " + num(worst_f)};
}

inline SuiteOutcome ordering_and_monotonicity(const VerifyConfig& cfg) {
  bool ok = true;
  std::string detail = "all hold";
  for (double a : {0.1, 0.3, 0.39, 0.6, 1.0}) {
    double prev_b = std::numeric_limits<double>::infinity(), prev_f = prev_b;
    for (std::size_t n = 1; n <= (cfg.quick ? 16 : 32); ++n) {
      const double qb = boson_bound(Alpha(a), n, cfg.solver).q_b;
      const double qf = fermion_bound(Alpha(a), n, cfg.solver).q_f;
      if (qf < qb - 1e-12 || qb > prev_b + 1e-12 || qf > prev_f + 1e-12) {
        ok = false;
        detail = "violated at alpha = " + num(a) + ", N = " + std::to_string(n);
      }
      prev_b = qb;
      prev_f = qf;
    }
  }
  return {"Q_F >= Q_B and both non-increasing in N", ok, detail};
}

inline SuiteOutcome two_mode_fermion(const VerifyConfig& cfg) {
  double worst = 0.0;
  for (double a : {0.05, 0.3, 0.5, 1.7, 3.0}) {
    worst = std::max(worst, std::abs(fermion_bound(Alpha(a), 1, cfg.solver).q_f - 2.0 * a / std::numbers::pi));
  }
  return {"N = 1 fermion bound equals 2 alpha / pi", worst <= 1e-14, "max deviation " + num(worst)};
}

}  // namespace verify_detail

inline std::vector<SuiteOutcome> run_verification(const VerifyConfig& cfg) {
  using namespace verify_detail;
  std::vector<SuiteOutcome> out;
  for (auto suite : {gram_identity, reduced_paths, quadrature_delta1, quadrature_delta2, density_integral,
                     continuity_order, basis_current, complex_states, bound_identities, ordering_and_monotonicity,
                     two_mode_fermion}) {
    try {
      out.push_back(suite(cfg));
    } catch (const std::exception& e) {
      out.push_back({"suite raised", false, e.what()});
    }
  }
  return out;
}

}  // namespace ringflow

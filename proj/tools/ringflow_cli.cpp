// ringflow command-line tool.
//
// Exit status: 0 success, 1 numerical failure (diagnostic JSON on stderr),
// 2 flag errors (message and usage on stderr).

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ringflow/ringflow.hpp"

namespace {

using ringflow::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Global {
  unsigned threads = ringflow::default_threads();
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::size_t dense_limit = 512;
  std::string format = "table";
  std::string output;

  ringflow::SolverOptions solver() const {
    ringflow::SolverOptions o;
    o.tol = tol;
    o.seed = seed;
    o.dense_limit = dense_limit;
    return o;
  }
};

// Interval and range flags are given as A:B.
std::pair<std::string, std::string> split_colon(const std::string& s, const char* flag) {
  const auto pos = s.find(':');
  if (pos == std::string::npos || s.find(':', pos + 1) != std::string::npos) {
    throw UsageError(std::string(flag) + " expects A:B, got '" + s + "'");
  }
  return {s.substr(0, pos), s.substr(pos + 1)};
}

double parse_double(const std::string& s, const char* flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string(flag) + ": '" + s + "' is not a number");
}

std::size_t parse_size(const std::string& s, const char* flag) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError(std::string(flag) + ": '" + s + "' is not a non-negative integer");
  }
  return std::stoull(s);
}

ringflow::Alpha checked_alpha(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw UsageError("--alpha must be positive and finite");
  return ringflow::Alpha(a);
}

struct ScanFlags {
  std::string interval;
  double step = 0.005;
  double refine_tol = 1e-6;
  CLI::Option* flag = nullptr;  // set when --scan may appear without a value

  bool requested() const { return !interval.empty() || (flag != nullptr && flag->count() > 0); }

  ringflow::ScanConfig config(double lo, double hi, unsigned threads) const {
    ringflow::ScanConfig c{lo, hi, step, refine_tol, threads};
    if (!interval.empty()) {
      auto [a, b] = split_colon(interval, "--scan");
      c.lo = parse_double(a, "--scan");
      c.hi = parse_double(b, "--scan");
    }
    if (!(c.lo > 0.0) || !(c.hi > c.lo)) throw UsageError("--scan needs 0 < LO < HI");
    if (!(c.step > 0.0)) throw UsageError("--step must be positive");
    if (!(c.refine_tol > 0.0)) throw UsageError("--refine-tol must be positive");
    return c;
  }
};

void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--step", f.step, "Coarse alpha step")->capture_default_str();
  cmd->add_option("--refine-tol", f.refine_tol, "Golden-section tolerance in alpha")->capture_default_str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open --output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double x) { return ringflow::format_double(x); }

void emit_json(const Global& g, json body) {
  Output out(g.output);
  out.stream() << body.dump(2) << '\n';
}

void emit_csv(const Global& g, const json& meta, const std::string& csv) {
  Output out(g.output);
  out.stream() << ringflow::with_metadata(meta, csv);
}

void emit_table(const Global& g, const std::vector<std::pair<std::string, std::string>>& rows) {
  Output out(g.output);
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& r : rows) out.stream() << std::left << std::setw(static_cast<int>(w) + 2) << r.first << r.second << '\n';
}

json solver_echo(const Global& g) { return ringflow::solver_json(g.solver()); }

json state_json(const ringflow::CoefficientMatrix& c) {
  std::vector<double> row_major(c.values.flat().begin(), c.values.flat().end());
  return {{"n_max", c.n_max}, {"sigma", ringflow::sigma(c.tag)}, {"coefficients", row_major}};
}

void write_state(const std::string& path, const json& meta, const ringflow::CoefficientMatrix& c) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open --dump-state file '" + path + "'");
  json body = state_json(c);
  body["metadata"] = meta;
  f << body.dump(2) << '\n';
}

ringflow::CoefficientMatrix read_state(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open --state file '" + path + "'");
  const json j = json::parse(f);
  const auto n_max = j.at("n_max").get<std::size_t>();
  const auto tag = ringflow::tag_from_sigma(j.at("sigma").get<int>());
  const std::size_t d = n_max + 1;
  ringflow::Matrix m(d, d);
  const auto& coeffs = j.at("coefficients");
  std::vector<double> flat;
  for (const auto& v : coeffs) {
    if (v.is_array()) {
      for (const auto& x : v) flat.push_back(x.get<double>());
    } else {
      flat.push_back(v.get<double>());
    }
  }
  if (flat.size() != d * d) {
    throw std::invalid_argument("state file: expected " + std::to_string(d * d) + " coefficients, got " +
                                std::to_string(flat.size()));
  }
  std::copy(flat.begin(), flat.end(), m.flat().begin());
  ringflow::CoefficientMatrix c(std::move(m), tag);
  ringflow::require_state(c, 1e-10);
  return c;
}

// ---------------------------------------------------------------------------

struct KernelFlags {
  double alpha = 0.0;
  std::size_t n = 0;
};

int run_kernel(const Global& g, const KernelFlags& f) {
  const auto k = ringflow::build_kernel(checked_alpha(f.alpha), f.n);
  const json meta = ringflow::metadata("kernel dump", {{"alpha", f.alpha}, {"n", f.n}}, g.seed);
  if (g.format == "json") {
    std::vector<std::vector<double>> rows(k.modes(), std::vector<double>(k.modes()));
    for (std::size_t m = 0; m < k.modes(); ++m)
      for (std::size_t n = 0; n < k.modes(); ++n) rows[m][n] = k(m, n);
    emit_json(g, {{"metadata", meta}, {"alpha", f.alpha}, {"n", f.n}, {"kernel", rows}});
    return 0;
  }
  std::string csv = "m,n,value\n";
  for (std::size_t m = 0; m < k.modes(); ++m)
    for (std::size_t n = 0; n < k.modes(); ++n)
      csv += std::to_string(m) + ',' + std::to_string(n) + ',' + fmt(k(m, n)) + '\n';
  emit_csv(g, meta, csv);
  return 0;
}

enum class Kind { single, boson, fermion };

const char* value_key(Kind k) {
  switch (k) {
    case Kind::single: return "lambda";
    case Kind::boson: return "q_b";
    case Kind::fermion: return "q_f";
  }
  return "";
}

const char* command_name(Kind k) {
  switch (k) {
    case Kind::single: return "single";
    case Kind::boson: return "boson";
    case Kind::fermion: return "fermion";
  }
  return "";
}

struct BoundFlags {
  std::optional<double> alpha;
  std::optional<std::size_t> n;
  ScanFlags scan;
  std::string n_range;
  bool extrapolate = false;
  std::string dump_state;
};

ringflow::BoundFunction bound_fn(Kind k, const ringflow::SolverOptions& opt) {
  switch (k) {
    case Kind::single: return ringflow::single_bound_fn(opt);
    case Kind::boson: return ringflow::boson_bound_fn(opt);
    case Kind::fermion: return ringflow::fermion_bound_fn(opt);
  }
  return {};
}

json scan_json(const ringflow::ScanResult& s, bool with_grid) {
  json j = {{"n", s.n_max},
            {"alpha_star", s.alpha_star},
            {"q_min", s.q_min},
            {"refinement_tolerance", s.refinement_tolerance},
            {"evaluations", s.evaluations}};
  if (with_grid) {
    json grid = json::array();
    for (const auto& p : s.grid) grid.push_back({p.alpha, p.value});
    j["grid"] = grid;
  }
  return j;
}

int run_single_alpha(const Global& g, Kind kind, const BoundFlags& f, json config) {
  const auto a = checked_alpha(*f.alpha);
  const std::size_t n = *f.n;
  const auto opt = g.solver();
  const json meta = ringflow::metadata(command_name(kind), std::move(config), g.seed);
  double value = 0.0, residual = 0.0;
  std::optional<ringflow::CoefficientMatrix> state;
  switch (kind) {
    case Kind::single: {
      const auto r = ringflow::lambda_ring(a, n, opt);
      value = r.lambda_ring;
      residual = r.residual;
      break;
    }
    case Kind::boson: {
      auto r = ringflow::boson_bound(a, n, opt);
      value = r.q_b;
      residual = r.residual;
      state = std::move(r.state);
      break;
    }
    case Kind::fermion: {
      auto r = ringflow::fermion_bound(a, n, opt);
      value = r.q_f;
      residual = r.residual;
      state = std::move(r.full_state);
      break;
    }
  }
  if (!f.dump_state.empty()) write_state(f.dump_state, meta, *state);

  if (g.format == "json") {
    emit_json(g, {{"metadata", meta}, {"alpha", a.value()}, {"n", n}, {value_key(kind), value}, {"residual", residual}});
  } else if (g.format == "csv") {
    emit_csv(g, meta,
             std::string("alpha,n,") + value_key(kind) + ",residual\n" + fmt(a.value()) + ',' + std::to_string(n) +
                 ',' + fmt(value) + ',' + fmt(residual) + '\n');
  } else {
    emit_table(g, {{"alpha", fmt(a.value())}, {"n", std::to_string(n)}, {value_key(kind), fmt(value)},
                   {"residual", fmt(residual)}});
  }
  return 0;
}

int run_scan(const Global& g, Kind kind, const BoundFlags& f, json config) {
  const double hi_default = kind == Kind::fermion ? 1.0 : 3.0;
  const auto cfg = f.scan.config(0.01, hi_default, g.threads);
  config["scan"] = ringflow::scan_config_json(cfg);
  const json meta = ringflow::metadata(command_name(kind), std::move(config), g.seed);
  const auto r = ringflow::alpha_scan(bound_fn(kind, g.solver()), *f.n, cfg);
  if (g.format == "json") {
    json body = scan_json(r, true);
    body["metadata"] = meta;
    emit_json(g, body);
  } else if (g.format == "csv") {
    std::string csv = std::string("n,alpha,") + value_key(kind) + '\n';
    for (const auto& p : r.grid) csv += std::to_string(r.n_max) + ',' + fmt(p.alpha) + ',' + fmt(p.value) + '\n';
    emit_csv(g, meta, csv);
  } else {
    emit_table(g, {{"n", std::to_string(r.n_max)},
                   {"alpha_star", fmt(r.alpha_star)},
                   {std::string(value_key(kind)) + "_min", fmt(r.q_min)},
                   {"refinement_tolerance", fmt(r.refinement_tolerance)},
                   {"evaluations", std::to_string(r.evaluations)}});
  }
  return 0;
}

int run_fermion_range(const Global& g, const BoundFlags& f, json config) {
  auto [a, b] = split_colon(f.n_range, "--n-range");
  const std::size_t lo = parse_size(a, "--n-range"), hi = parse_size(b, "--n-range");
  if (lo < 1 || hi < lo) throw UsageError("--n-range needs 1 <= A <= B");
  const auto opt = g.solver();

  if (f.alpha) {
    if (f.extrapolate) throw UsageError("--extrapolate needs a scan, not a fixed --alpha");
    const auto alpha = checked_alpha(*f.alpha);
    const json meta = ringflow::metadata("fermion", std::move(config), g.seed);
    const auto values = ringflow::parallel_map<double>(hi - lo + 1, g.threads, [&](std::size_t i) {
      return ringflow::fermion_bound(alpha, lo + i, opt).q_f;
    });
    if (g.format == "json") {
      json rows = json::array();
      for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({{"n", lo + i}, {"q_f", values[i]}});
      emit_json(g, {{"metadata", meta}, {"alpha", alpha.value()}, {"results", rows}});
    } else {
      std::string csv = "n,alpha,q_f\n";
      for (std::size_t i = 0; i < values.size(); ++i)
        csv += std::to_string(lo + i) + ',' + fmt(alpha.value()) + ',' + fmt(values[i]) + '\n';
      emit_csv(g, meta, csv);
    }
    return 0;
  }

  const auto cfg = f.scan.config(0.01, 1.0, g.threads);
  config["scan"] = ringflow::scan_config_json(cfg);
  const json meta = ringflow::metadata("fermion", std::move(config), g.seed);
  if (f.extrapolate) {
    if (lo < 2) throw UsageError("--extrapolate needs A >= 2");
    if (hi - lo + 1 < 3) throw UsageError("--extrapolate needs at least 3 values of N");
    const auto sweep = ringflow::fermion_sweep(lo, hi, cfg, opt);
    if (g.format == "json") {
      json scans = json::array();
      for (const auto& s : sweep.scans) scans.push_back(scan_json(s, false));
      emit_json(g, {{"metadata", meta},
                    {"q_f", sweep.q_f.intercept},
                    {"alpha_star", sweep.alpha_star.intercept},
                    {"q_f_fit", ringflow::fit_json(sweep.q_f)},
                    {"alpha_star_fit", ringflow::fit_json(sweep.alpha_star)},
                    {"scans", scans}});
    } else if (g.format == "csv") {
      std::string csv = "n,inv_n,q_f,alpha_star\n";
      for (const auto& s : sweep.scans)
        csv += std::to_string(s.n_max) + ',' + fmt(1.0 / static_cast<double>(s.n_max)) + ',' + fmt(s.q_min) + ',' +
               fmt(s.alpha_star) + '\n';
      csv += "-1,0," + fmt(sweep.q_f.intercept) + ',' + fmt(sweep.alpha_star.intercept) + '\n';
      emit_csv(g, meta, csv);
    } else {
      std::vector<std::pair<std::string, std::string>> rows;
      for (const auto& s : sweep.scans)
        rows.push_back({"N = " + std::to_string(s.n_max), "q_f " + fmt(s.q_min) + "  alpha_star " + fmt(s.alpha_star)});
      rows.push_back({"Q_F (1/N -> 0)", fmt(sweep.q_f.intercept)});
      rows.push_back({"alpha_* (1/N -> 0)", fmt(sweep.alpha_star.intercept)});
      rows.push_back({"fit rms (Q_F, alpha_*)", fmt(sweep.q_f.rms_residual) + ", " + fmt(sweep.alpha_star.rms_residual)});
      emit_table(g, rows);
    }
    return 0;
  }

  std::vector<ringflow::ScanResult> scans;
  const auto fn = ringflow::fermion_bound_fn(opt);
  for (std::size_t n = lo; n <= hi; ++n) scans.push_back(ringflow::alpha_scan(fn, n, cfg));
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& s : scans) arr.push_back(scan_json(s, false));
    emit_json(g, {{"metadata", meta}, {"scans", arr}});
  } else {
    std::string csv = "n,alpha_star,q_f\n";
    for (const auto& s : scans) csv += std::to_string(s.n_max) + ',' + fmt(s.alpha_star) + ',' + fmt(s.q_min) + '\n';
    emit_csv(g, meta, csv);
  }
  return 0;
}

int run_bound(const Global& g, Kind kind, const BoundFlags& f) {
  json config = {{"solver", solver_echo(g)}};
  if (f.alpha) config["alpha"] = *f.alpha;
  if (f.n) config["n"] = *f.n;
  if (!f.n_range.empty()) {
    config["n_range"] = f.n_range;
    config["extrapolate"] = f.extrapolate;
    return run_fermion_range(g, f, std::move(config));
  }
  if (f.extrapolate) throw UsageError("--extrapolate requires --n-range");
  if (!f.n) throw UsageError("--n is required");
  if (kind != Kind::fermion && *f.n < 1) throw UsageError("--n must be at least 1");
  if (f.alpha.has_value() == f.scan.requested()) throw UsageError("give exactly one of --alpha and --scan");
  if (f.alpha) return run_single_alpha(g, kind, f, std::move(config));
  if (!f.dump_state.empty()) throw UsageError("--dump-state needs --alpha");
  return run_scan(g, kind, f, std::move(config));
}

struct ObservableFlags {
  std::string state;
  std::size_t theta_points = 64;
  double t_min = 0.0;
  double t_max = 1.0;
  std::size_t t_points = 11;
};

int run_observables(const Global& g, const ObservableFlags& f) {
  if (f.theta_points < 1 || f.t_points < 1) throw UsageError("grid sizes must be positive");
  if (f.t_points > 1 && !(f.t_max > f.t_min)) throw UsageError("--t-max must exceed --t-min");
  const auto c = read_state(f.state);
  const ringflow::PairObservables obs(c);
  const json meta = ringflow::metadata("observables",
                                       {{"state", std::filesystem::path(f.state).filename().string()},
                                        {"n_max", c.n_max},
                                        {"sigma", ringflow::sigma(c.tag)},
                                        {"theta_points", f.theta_points},
                                        {"t_min", f.t_min},
                                        {"t_max", f.t_max},
                                        {"t_points", f.t_points}},
                                       g.seed);
  std::string csv = "theta,t,J,rho\n";
  json rows = json::array();
  for (std::size_t it = 0; it < f.t_points; ++it) {
    const double t =
        f.t_points == 1 ? f.t_min : f.t_min + (f.t_max - f.t_min) * static_cast<double>(it) / double(f.t_points - 1);
    for (std::size_t ih = 0; ih < f.theta_points; ++ih) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(ih) / static_cast<double>(f.theta_points);
      const double jv = obs.current(th, t), rho = obs.density(th, t);
      csv += fmt(th) + ',' + fmt(t) + ',' + fmt(jv) + ',' + fmt(rho) + '\n';
      if (g.format == "json") rows.push_back({th, t, jv, rho});
    }
  }
  if (g.format == "json") {
    emit_json(g, {{"metadata", meta}, {"columns", {"theta", "t", "J", "rho"}}, {"rows", rows}});
  } else {
    emit_csv(g, meta, csv);
  }
  return 0;
}

struct FigureFlags {
  std::string id;
  std::vector<std::size_t> ns;
  ScanFlags scan;
  std::string n_range = "20:70";
  std::size_t fit_samples = 101;
};

int run_figures(const Global& g, const FigureFlags& f) {
  ringflow::FigureId id;
  try {
    id = ringflow::parse_figure_id(f.id);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ringflow::FigureConfig cfg;
  cfg.solver = g.solver();
  cfg.ns = f.ns;
  cfg.fit_samples = f.fit_samples;
  const bool fig1 = id == ringflow::FigureId::fig1a || id == ringflow::FigureId::fig1b;
  const double hi = id == ringflow::FigureId::fig1b ? 0.55 : 1.0;
  ScanFlags scan = f.scan;
  if (id == ringflow::FigureId::fig1b && scan.step == 0.005) scan.step = 0.0025;
  cfg.scan = scan.config(0.01, hi, g.threads);
  auto [a, b] = split_colon(f.n_range, "--n-range");
  cfg.n_lo = parse_size(a, "--n-range");
  cfg.n_hi = parse_size(b, "--n-range");
  if (!fig1 && (cfg.n_lo < 2 || cfg.n_hi < cfg.n_lo + 2)) throw UsageError("--n-range needs 2 <= A and B >= A + 2");
  json config = {{"figure", f.id}, {"scan", ringflow::scan_config_json(cfg.scan)}, {"solver", solver_echo(g)}};
  if (fig1) {
    config["ns"] = cfg.ns.empty() ? ringflow::default_curves(id) : cfg.ns;
  } else {
    config["n_range"] = {cfg.n_lo, cfg.n_hi};
    config["fit_samples"] = cfg.fit_samples;
  }
  emit_csv(g, ringflow::metadata("figures", std::move(config), g.seed), ringflow::emit_figure_data(id, cfg));
  return 0;
}

int run_verify(const Global& g, bool quick) {
  ringflow::VerifyConfig cfg;
  cfg.quick = quick;
  cfg.seed = g.seed;
  cfg.solver = g.solver();
  const auto results = ringflow::run_verification(cfg);
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : results) arr.push_back({{"suite", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    emit_json(g, {{"metadata", ringflow::metadata("verify", {{"quick", quick}, {"solver", solver_echo(g)}}, g.seed)},
                  {"passed", all},
                  {"suites", arr}});
  } else {
    Output out(g.output);
    for (const auto& r : results)
      out.stream() << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    out.stream() << (all ? "all suites passed" : "some suites FAILED") << '\n';
  }
  return all ? 0 : 1;
}

int run_reproduce(const Global& g, bool quick, const std::string& dir) {
  auto cfg = ringflow::ReproduceConfig::defaults(quick);
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.solver = g.solver();
  std::filesystem::create_directories(dir);
  const auto result = ringflow::reproduce(cfg, [](const std::string& s) { std::cerr << "[reproduce] " << s << '\n'; });
  for (const auto& file : result.files) {
    std::ofstream f(std::filesystem::path(dir) / file.name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + file.name + " in " + dir);
    f << file.content;
  }
  const auto& s = result.summary;
  if (g.format == "json") {
    emit_json(g, s);
  } else {
    emit_table(g, {{"c_ring", fmt(s["c_ring"].get<double>())},
                   {"alpha_ring", fmt(s["alpha_ring"].get<double>())},
                   {"Q_B", fmt(s["q_b"].get<double>())},
                   {"Q_F", fmt(s["q_f"].get<double>())},
                   {"alpha_*", fmt(s["alpha_star"].get<double>())},
                   {"output", dir}});
  }
  return 0;
}

int numerical_failure(const std::exception& e) {
  json d = {{"error", "numerical_failure"}, {"message", e.what()}};
  if (const auto* nc = dynamic_cast<const ringflow::NonConvergenceError*>(&e)) d["best_residual"] = nc->best_residual();
  if (const auto* se = dynamic_cast<const ringflow::ScanError*>(&e)) d["alpha"] = se->alpha();
  std::cerr << d.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum backflow bounds for one and two particles on a ring"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(ringflow::version));

  Global g;
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 4096u));
  app.add_option("--seed", g.seed, "Seed for the iterative solver and random states")->capture_default_str();
  app.add_option("--tol", g.tol, "Eigen-residual tolerance relative to ||A||_F")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--dense-limit", g.dense_limit, "Largest dimension solved densely")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--output", g.output, "Write to this file instead of standard output");

  auto* kernel = app.add_subcommand("kernel", "Kernel matrix utilities");
  kernel->require_subcommand(1);
  KernelFlags kf;
  auto* dump = kernel->add_subcommand("dump", "Print K as CSV rows m,n,value");
  dump->add_option("--alpha", kf.alpha, "alpha = T/4")->required();
  dump->add_option("--n", kf.n, "Highest mode N")->required();

  BoundFlags single_f, boson_f, fermion_f;
  auto add_bound = [&](const char* name, const char* help, BoundFlags& f, double hi) {
    auto* cmd = app.add_subcommand(name, help);
    auto* a = cmd->add_option("--alpha", f.alpha, "Evaluate at one alpha");
    cmd->add_option("--n", f.n, "Highest mode N");
    auto* s = cmd->add_option("--scan", f.scan.interval,
                              "Minimize over alpha in LO:HI (default 0.01:" + ringflow::format_double(hi) + ")");
    s->expected(0, 1);
    f.scan.flag = s;
    a->excludes(s);
    add_scan_flags(cmd, f.scan);
    return cmd;
  };
  auto* single = add_bound("single", "Single-particle bound lambda_ring", single_f, 3.0);
  auto* boson = add_bound("boson", "Two-boson bound Q_B", boson_f, 3.0);
  boson->add_option("--dump-state", boson_f.dump_state, "Write the minimizing state as JSON");
  auto* fermion = add_bound("fermion", "Two-fermion bound Q_F", fermion_f, 1.0);
  fermion->add_option("--dump-state", fermion_f.dump_state, "Write the minimizing state as JSON");
  auto* range = fermion->add_option("--n-range", fermion_f.n_range, "Sweep N over A:B");
  fermion->add_flag("--extrapolate", fermion_f.extrapolate, "Quadratic fits in 1/N over the sweep")->needs(range);

  ObservableFlags of;
  auto* observables = app.add_subcommand("observables", "Current and density of a two-particle state");
  observables->add_option("--state", of.state, "State JSON: n_max, sigma, row-major coefficients")
      ->required()
      ->check(CLI::ExistingFile);
  observables->add_option("--theta-points", of.theta_points, "Uniform theta grid on [0, 2pi)")->capture_default_str();
  observables->add_option("--t-min", of.t_min)->capture_default_str();
  observables->add_option("--t-max", of.t_max)->capture_default_str();
  observables->add_option("--t-points", of.t_points)->capture_default_str();

  FigureFlags ff;
  auto* figures = app.add_subcommand("figures", "Figure data as CSV");
  figures->add_option("id", ff.id, "fig1a, fig1b, fig2a or fig2b")->required();
  figures->add_option("--n-list", ff.ns, "Curves for fig1 (default 1,2,3,10 or 10..50)")->delimiter(',');
  figures->add_option("--scan", ff.scan.interval, "Alpha interval LO:HI");
  figures->add_option("--n-range", ff.n_range, "N sweep for fig2")->capture_default_str();
  figures->add_option("--fit-samples", ff.fit_samples, "Fit-curve rows in fig2")->capture_default_str();
  add_scan_flags(figures, ff.scan);

  bool verify_quick = false;
  auto* verify = app.add_subcommand("verify", "Run the invariant and property suites");
  verify->add_flag("--quick", verify_quick, "Smaller sizes");

  bool repro_quick = false;
  std::string repro_dir = "reproduce_out";
  auto* reproduce = app.add_subcommand("reproduce", "Compute c_ring, Q_B, Q_F, alpha_* and the figure tables");
  reproduce->add_flag("--quick", repro_quick, "Desk scale (N <= 30)");
  reproduce->add_option("--output-dir", repro_dir, "Directory for CSV and JSON artifacts")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (dump->parsed()) return run_kernel(g, kf);
    if (single->parsed()) return run_bound(g, Kind::single, single_f);
    if (boson->parsed()) return run_bound(g, Kind::boson, boson_f);
    if (fermion->parsed()) return run_bound(g, Kind::fermion, fermion_f);
    if (observables->parsed()) return run_observables(g, of);
    if (figures->parsed()) return run_figures(g, ff);
    if (verify->parsed()) return run_verify(g, verify_quick);
    if (reproduce->parsed()) return run_reproduce(g, repro_quick, repro_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    return numerical_failure(e);
  }
  return 2;
}

#pragma once

// CSV emitters for the figure data. Schemas (headers are fixed):
//   fig1a, fig1b: n,alpha,min_lambda
//   fig2a:        n,inv_n,q_f
//   fig2b:        n,inv_n,alpha_star
// Fit rows in fig2 carry n = -1 and sample the fitted quadratic from
// inv_n = 0 (the extrapolated limit) up to the largest data abscissa.
// Floats use 17 significant digits, '.' decimal separator and '\n' endings.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ringflow/scan.hpp"

namespace ringflow {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

enum class FigureId { fig1a, fig1b, fig2a, fig2b };

inline FigureId parse_figure_id(std::string_view s) {
  if (s == "fig1a") return FigureId::fig1a;
  if (s == "fig1b") return FigureId::fig1b;
  if (s == "fig2a") return FigureId::fig2a;
  if (s == "fig2b") return FigureId::fig2b;
  throw std::invalid_argument("invalid figure id '" + std::string(s) + "' (expected fig1a, fig1b, fig2a or fig2b)");
}

inline std::string_view figure_name(FigureId id) {
  switch (id) {
    case FigureId::fig1a: return "fig1a";
    case FigureId::fig1b: return "fig1b";
    case FigureId::fig2a: return "fig2a";
    case FigureId::fig2b: return "fig2b";
  }
  return "";
}

inline std::string_view figure_header(FigureId id) {
  switch (id) {
    case FigureId::fig1a:
    case FigureId::fig1b: return "n,alpha,min_lambda";
    case FigureId::fig2a: return "n,inv_n,q_f";
    case FigureId::fig2b: return "n,inv_n,alpha_star";
  }
  return "";
}

struct FigureConfig {
  std::vector<std::size_t> ns;  // fig1 curves; empty means the defaults for the figure
  ScanConfig scan;              // fig1: the alpha grid; fig2: the per-N scan
  std::size_t n_lo = 20;        // fig2 sweep
  std::size_t n_hi = 70;
  std::size_t fit_samples = 101;
  SolverOptions solver;
};

inline std::vector<std::size_t> default_curves(FigureId id) {
  if (id == FigureId::fig1a) return {1, 2, 3, 10};
  return {10, 20, 30, 40, 50};
}

/// Rows of min lambda(alpha) of the reduced fermion matrix on the scan grid.
inline std::string fig1_csv(const std::vector<std::size_t>& ns, const ScanConfig& grid, const SolverOptions& opt) {
  const auto alphas = alpha_grid(grid);
  std::string out = "n,alpha,min_lambda\n";
  for (std::size_t n : ns) {
    const auto values = parallel_map<double>(alphas.size(), grid.threads, [&](std::size_t i) {
      return fermion_bound(Alpha(alphas[i]), n, opt).q_f;
    });
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      out += std::to_string(n) + ',' + format_double(alphas[i]) + ',' + format_double(values[i]) + '\n';
    }
  }
  return out;
}

/// fig2a / fig2b rows from a finished sweep.
inline std::string fig2_csv(FigureId id, const SweepResult& sweep, std::size_t fit_samples = 101) {
  if (id != FigureId::fig2a && id != FigureId::fig2b) throw std::invalid_argument("fig2_csv: not a fig2 id");
  const bool q = id == FigureId::fig2a;
  std::string out(figure_header(id));
  out += '\n';
  double x_max = 0.0;
  for (const auto& s : sweep.scans) {
    const double x = 1.0 / static_cast<double>(s.n_max);
    x_max = std::max(x_max, x);
    out += std::to_string(s.n_max) + ',' + format_double(x) + ',' + format_double(q ? s.q_min : s.alpha_star) + '\n';
  }
  const auto& fit = q ? sweep.q_f : sweep.alpha_star;
  for (std::size_t i = 0; i < fit_samples; ++i) {
    const double x = fit_samples > 1 ? x_max * static_cast<double>(i) / static_cast<double>(fit_samples - 1) : 0.0;
    out += "-1," + format_double(x) + ',' + format_double(fit(x)) + '\n';
  }
  return out;
}

inline std::string emit_figure_data(FigureId id, const FigureConfig& cfg) {
  switch (id) {
    case FigureId::fig1a:
    case FigureId::fig1b: return fig1_csv(cfg.ns.empty() ? default_curves(id) : cfg.ns, cfg.scan, cfg.solver);
    case FigureId::fig2a:
    case FigureId::fig2b: return fig2_csv(id, fermion_sweep(cfg.n_lo, cfg.n_hi, cfg.scan, cfg.solver), cfg.fit_samples);
  }
  throw std::invalid_argument("invalid figure id");
}

}  // namespace ringflow

#pragma once

// Global minimization over alpha, least-squares extrapolation in 1/N and the
// fermionic N-sweep built from them.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringflow/boson_bound.hpp"
#include "ringflow/fermion_bound.hpp"
#include "ringflow/parallel.hpp"
#include "ringflow/single_particle.hpp"

namespace ringflow {

using BoundFunction = std::function<double(Alpha, std::size_t)>;

struct ScanConfig {
  double lo = 0.01;
  double hi = 1.0;
  double step = 0.005;
  double refine_tol = 1e-6;
  unsigned threads = 1;
};

struct GridPoint {
  double alpha;
  double value;
};

struct ScanResult {
  std::size_t n_max = 0;
  std::vector<GridPoint> grid;
  double alpha_star = 0.0;
  double q_min = 0.0;
  double refinement_tolerance = 0.0;
  std::size_t evaluations = 0;
};

class ScanError : public std::runtime_error {
 public:
  ScanError(double alpha, const std::string& cause)
      : std::runtime_error("bound evaluation failed at alpha = " + std::to_string(alpha) + ": " + cause),
        alpha_(alpha) {}
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// lo, lo + step, ... up to hi (inclusive within a rounding slack).
inline std::vector<double> alpha_grid(const ScanConfig& cfg) {
  if (!(cfg.lo > 0.0) || !(cfg.hi > cfg.lo) || !(cfg.step > 0.0)) {
    throw std::invalid_argument("alpha grid needs 0 < lo < hi and step > 0");
  }
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor((cfg.hi - cfg.lo) / cfg.step + 1e-9)) + 1;
  g.reserve(count);
  for (std::size_t i = 0; i < count; ++i) g.push_back(cfg.lo + static_cast<double>(i) * cfg.step);
  return g;
}

struct GoldenResult {
  double x;
  double fx;
  std::size_t evaluations;
};

/// Golden-section search on [a, b]; stops once the bracket is narrower than
/// tol / 2 and returns the best point evaluated.
template <class F>
GoldenResult golden_section(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  GoldenResult best{fc <= fd ? c : d, std::min(fc, fd), 2};
  while (b - a > 0.5 * tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc < best.fx) best = {c, fc, best.evaluations};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd < best.fx) best = {d, fd, best.evaluations};
    }
    ++best.evaluations;
  }
  return best;
}

/// Coarse grid, then golden-section refinement of every grid-local minimum
/// inside its neighbouring grid cells; the global best wins.
inline ScanResult alpha_scan(const BoundFunction& bound_fn, std::size_t n_max, const ScanConfig& cfg) {
  const auto alphas = alpha_grid(cfg);
  auto eval = [&](double a) {
    try {
      return bound_fn(Alpha(a), n_max);
    } catch (const std::exception& e) {
      throw ScanError(a, e.what());
    }
  };

  ScanResult out;
  out.n_max = n_max;
  out.refinement_tolerance = cfg.refine_tol;
  const auto values = parallel_map<double>(alphas.size(), cfg.threads, [&](std::size_t i) { return eval(alphas[i]); });
  out.grid.reserve(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) out.grid.push_back({alphas[i], values[i]});
  out.evaluations = alphas.size();

  std::vector<std::size_t> candidates;
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || values[i] <= values[i - 1];
    const bool right_ok = i + 1 == n || values[i] <= values[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }

  const auto refined = parallel_map<GoldenResult>(candidates.size(), cfg.threads, [&](std::size_t c) {
    const std::size_t i = candidates[c];
    const double a = alphas[i == 0 ? 0 : i - 1];
    const double b = alphas[i + 1 == n ? n - 1 : i + 1];
    return golden_section(eval, a, b, cfg.refine_tol);
  });

  std::size_t best_grid = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (values[i] < values[best_grid]) best_grid = i;
  out.alpha_star = alphas[best_grid];
  out.q_min = values[best_grid];
  for (const auto& r : refined) {
    out.evaluations += r.evaluations;
    if (r.fx < out.q_min) {
      out.q_min = r.fx;
      out.alpha_star = r.x;
    }
  }
  return out;
}

struct ExtrapolationFit {
  std::vector<std::pair<double, double>> points;
  std::array<double, 3> coefficients{};  // value ~ c0 + c1 x + c2 x^2
  double intercept = 0.0;
  double rms_residual = 0.0;

  double operator()(double x) const noexcept {
    return coefficients[0] + x * (coefficients[1] + x * coefficients[2]);
  }
};

/// Unweighted least-squares quadratic. The abscissae are centred and scaled
/// before a Householder QR of the 3-column design matrix.
inline ExtrapolationFit polyfit_quadratic(std::vector<std::pair<double, double>> points) {
  std::vector<double> xs;
  for (const auto& p : points) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() < 3) {
    throw std::invalid_argument("polyfit_quadratic: need at least 3 distinct abscissae");
  }

  const std::size_t n = points.size();
  double mean = 0.0;
  for (const auto& p : points) mean += p.first;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : points) spread = std::max(spread, std::abs(p.first - mean));

  Matrix a(n, 3);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (points[i].first - mean) / spread;
    a(i, 0) = 1.0;
    a(i, 1) = s;
    a(i, 2) = s * s;
    y[i] = points[i].second;
  }
  // Householder QR, applying each reflector to y as we go.
  std::array<double, 3> rdiag{};
  for (std::size_t col = 0; col < 3; ++col) {
    double nrm = 0.0;
    for (std::size_t i = col; i < n; ++i) nrm = std::hypot(nrm, a(i, col));
    if (a(col, col) > 0) nrm = -nrm;
    std::vector<double> v(n, 0.0);
    for (std::size_t i = col; i < n; ++i) v[i] = a(i, col);
    v[col] -= nrm;
    const double vtv = dot(v, v);
    if (vtv > 0) {
      for (std::size_t j = col; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t i = col; i < n; ++i) s += v[i] * a(i, j);
        s *= 2.0 / vtv;
        for (std::size_t i = col; i < n; ++i) a(i, j) -= s * v[i];
      }
      double s = 0.0;
      for (std::size_t i = col; i < n; ++i) s += v[i] * y[i];
      s *= 2.0 / vtv;
      for (std::size_t i = col; i < n; ++i) y[i] -= s * v[i];
    }
    rdiag[col] = a(col, col);
  }
  std::array<double, 3> b{};
  for (std::size_t ii = 3; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < 3; ++j) s -= a(ii, j) * b[j];
    b[ii] = s / rdiag[ii];
  }

  // Back to powers of the raw abscissa.
  const double u = mean, h = spread;
  ExtrapolationFit fit;
  fit.coefficients = {b[0] - b[1] * u / h + b[2] * u * u / (h * h), b[1] / h - 2.0 * b[2] * u / (h * h),
                      b[2] / (h * h)};
  fit.intercept = fit.coefficients[0];
  double ss = 0.0;
  for (const auto& p : points) {
    const double s = (p.first - mean) / spread;
    const double r = p.second - (b[0] + s * (b[1] + s * b[2]));
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.points = std::move(points);
  return fit;
}

inline BoundFunction single_bound_fn(const SolverOptions& opt = {}) {
  return [opt](Alpha a, std::size_t n) { return lambda_ring(a, n, opt).lambda_ring; };
}
inline BoundFunction boson_bound_fn(const SolverOptions& opt = {}) {
  return [opt](Alpha a, std::size_t n) { return boson_bound(a, n, opt).q_b; };
}
inline BoundFunction fermion_bound_fn(const SolverOptions& opt = {}) {
  return [opt](Alpha a, std::size_t n) { return fermion_bound(a, n, opt).q_f; };
}

struct SweepResult {
  std::vector<ScanResult> scans;  // ascending N
  ExtrapolationFit q_f;
  ExtrapolationFit alpha_star;
};

/// alpha_scan of the fermion bound for every N in [n_lo, n_hi] and quadratic
/// fits of Q_F^(N) and alpha_*^(N) against 1/N.
inline SweepResult fermion_sweep(std::size_t n_lo, std::size_t n_hi, const ScanConfig& cfg,
                                 const SolverOptions& opt = {}) {
  if (n_lo < 2 || n_hi < n_lo) throw std::invalid_argument("fermion_sweep: need 2 <= n_lo <= n_hi");
  if (n_hi - n_lo + 1 < 3) throw std::invalid_argument("fermion_sweep: need at least 3 values of N to fit");
  SweepResult out;
  const auto fn = fermion_bound_fn(opt);
  std::vector<std::pair<double, double>> qs, as;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    out.scans.push_back(alpha_scan(fn, n, cfg));
    const double x = 1.0 / static_cast<double>(n);
    qs.emplace_back(x, out.scans.back().q_min);
    as.emplace_back(x, out.scans.back().alpha_star);
  }
  out.q_f = polyfit_quadratic(std::move(qs));
  out.alpha_star = polyfit_quadratic(std::move(as));
  return out;
}

}  // namespace ringflow

// Convergence studies over mesh refinement: run the discrete fractional
// operator against the analytic eigenpair oracle across an h-sequence and
// fit the log-log error slope.
#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclap/fracop.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

struct ConvergenceRow {
  double h = 0.0;
  double dt = 0.0;
  long n_t = 0;
  double l2_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // h strictly decreasing
  double fitted_slope = 0.0;
  bool monotone = true;  // errors decreasing across rows
};

/// Ordinary least squares slope of log(err) against log(h).
inline double fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("fit_slope: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, err] : points) {
    if (!(h > 0.0) || !(err > 0.0))
      throw std::invalid_argument("fit_slope: values must be positive");
    const double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace detail {

inline void finalize_report(ConvergenceReport& report) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : report.rows) pts.emplace_back(row.h, row.l2_error);
  report.fitted_slope = fit_slope(pts);
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].l2_error >= report.rows[i - 1].l2_error)
      report.monotone = false;
}

}  // namespace detail

/// 1D study on (a, b): the operator is applied to the normalized m-th
/// eigenfunction and compared against lambda^s * phi. lambda_min for the
/// N_t rule is filled in from the analytic spectrum when cfg uses formula
/// mode with lambda_min == 0.
inline ConvergenceReport convergence_study_1d(
    double a, double b, int m, double s, FracConfig cfg,
    const std::vector<int>& n_cells_list) {
  if (n_cells_list.size() < 2)
    throw std::invalid_argument("convergence_study_1d: need >= 2 resolutions");
  cfg.s = s;
  if (cfg.nt_mode.kind == NtMode::Kind::Formula && cfg.nt_mode.lambda_min <= 0.0)
    cfg.nt_mode.lambda_min = lambda_min_1d(cfg.bc, b - a);
  const EigenPair pair = [&] {
    EigenPair p = eig_1d(cfg.bc, b - a, m);
    if (a != 0.0) {
      // shift from (0, L) to (a, b)
      ScalarFn phi = p.phi;
      p.phi = [phi, a](double x, double y) { return phi(x - a, y); };
    }
    return p;
  }();
  const ScalarFn exact = exact_fractional(pair, s);

  ConvergenceReport report;
  for (int n_cells : n_cells_list) {
    const Mesh mesh = generate_interval(a, b, n_cells);
    const FeSpace sp = make_space(mesh, cfg.bc);
    const ApplyResult result = apply_fractional_detailed(sp, pair.phi, cfg);
    report.rows.push_back({mesh.h_max, result.dt, result.n_t,
                           l2_norm_error(sp, result.values, exact)});
  }
  detail::finalize_report(report);
  return report;
}

/// Unit-square study against the tensor eigenpair (m, l).
inline ConvergenceReport convergence_study_square(
    int m, int l, double s, FracConfig cfg,
    const std::vector<int>& refinement_list) {
  if (refinement_list.size() < 2)
    throw std::invalid_argument(
        "convergence_study_square: need >= 2 resolutions");
  cfg.s = s;
  if (cfg.nt_mode.kind == NtMode::Kind::Formula && cfg.nt_mode.lambda_min <= 0.0)
    cfg.nt_mode.lambda_min = lambda_min_square(cfg.bc);
  const EigenPair pair = eig_2d_square(cfg.bc, m, l);
  const ScalarFn exact = exact_fractional(pair, s);
  const std::vector<Point> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

  ConvergenceReport report;
  for (int refinements : refinement_list) {
    const Mesh mesh = generate_convex_polygon(square, refinements);
    const FeSpace sp = make_space(mesh, cfg.bc);
    const ApplyResult result = apply_fractional_detailed(sp, pair.phi, cfg);
    report.rows.push_back({mesh.h_max, result.dt, result.n_t,
                           l2_norm_error(sp, result.values, exact)});
  }
  detail::finalize_report(report);
  return report;
}

/// CSV rendering: header, one row per resolution, trailing slope summary.
inline std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "h,dt,n_t,l2_error\n";
  for (const auto& row : report.rows)
    out << row.h << ',' << row.dt << ',' << row.n_t << ',' << row.l2_error
        << '\n';
  out << "# slope=" << report.fitted_slope << '\n';
  return out.str();
}

}  // namespace fraclap

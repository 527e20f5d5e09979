#pragma once

#include "hyrelax/execution.hpp"
#include "hyrelax/metric.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyrelax {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (log10 x, log10 y). Points with nonpositive or
/// non-finite coordinates are skipped; fewer than 3 usable points throws.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

enum class SweepAxis { H, Eps, Delta };

struct SweepPoint {
  double h = 0.0;
  double eps = 0.0;
  double delta = 0.0;
};

struct SweepRow {
  double h = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double error = 0.0;
  double slope_running = 0.0;  // NaN until two rows are available
  double wall_time_s = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::H;
  std::vector<SweepRow> rows;
  LogLogFit fit;

  std::vector<double> errors() const;
  bool strictly_decreasing() const;
  void write_csv(std::ostream& os) const;
  std::string fit_json() const;
};

/// Worker count: HYBRID_RELAX_THREADS when set, else hardware concurrency.
unsigned sweep_threads();

/// Evaluates `error` at every point (concurrently), keeps grid order and fits
/// the error against the chosen axis.
SweepResult run_sweep(const std::vector<SweepPoint>& points, const std::function<double(const SweepPoint&)>& error,
                      SweepAxis axis, unsigned threads = 0);

enum class ErrorKind { Analytic, Filippov, SelfReference, RestNorm };

struct ConvergenceSpec {
  HybridSystem system;
  ModeIndex mode0 = 0;
  Vec x0;
  InputSignal input = InputSignal::none();
  double T = 1.0;
  SchemeKind scheme = SchemeKind::RK4;
  TransitionFunction transition;
  std::vector<SweepPoint> grid;
  SweepAxis axis = SweepAxis::H;
  ErrorKind kind = ErrorKind::RestNorm;

  /// Adaptive reference integrator instead of fixed steps (h is ignored).
  bool adaptive = false;
  ReferenceOptions reference;

  /// Closed-form solution for ErrorKind::Analytic.
  std::function<HybridPoint(double)> exact;
  /// Window start for RestNorm (sup of |x|_inf over [rest_from, T]).
  double rest_from = 0.0;
  /// Time grid for trajectory comparisons.
  TimeGrid grid_kind = TimeGrid::Union;
  unsigned threads = 0;
};

SweepResult convergence_sweep(const ConvergenceSpec& spec);

struct SensitivitySpec {
  HybridSystem system;
  ModeIndex mode0 = 0;
  Vec x0;
  Vec direction;
  std::vector<double> deltas;
  InputSignal input = InputSignal::none();
  double T = 1.0;
  double h = 1e-4;
  double eps = 1e-3;
  SchemeKind scheme = SchemeKind::Euler;
  TransitionFunction transition;
  unsigned threads = 0;
};

/// Rows carry error = rho^eps(x^delta, x^delta_linearized) per delta, with
/// every run kept on the initial chart.
SweepResult sensitivity_sweep(const SensitivitySpec& spec);

}  // namespace hyrelax

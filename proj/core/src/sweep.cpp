#include "hyrelax/sweep.hpp"

#include "hyrelax/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace hyrelax {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("fit_loglog: size mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    }
  }
  if (lx.size() < 3) throw DomainError("fewer than 3 usable grid points for the log-log fit");
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_loglog: degenerate abscissae");
  LogLogFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

std::vector<double> SweepResult::errors() const {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.error);
  return out;
}

bool SweepResult::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].error < rows[i - 1].error)) return false;
  return true;
}

void SweepResult::write_csv(std::ostream& os) const {
  os << "h,eps,delta,error,slope_running,wall_time_s\n";
  for (const auto& r : rows) {
    os << format_double(r.h) << ',' << format_double(r.eps) << ',' << format_double(r.delta) << ','
       << format_double(r.error) << ',';
    if (std::isfinite(r.slope_running)) os << format_double(r.slope_running);
    os << ',' << format_double(r.wall_time_s) << '\n';
  }
}

std::string SweepResult::fit_json() const {
  std::ostringstream os;
  os << "{\"slope\": " << format_double(fit.slope) << ", \"intercept\": " << format_double(fit.intercept)
     << ", \"r2\": " << format_double(fit.r2) << "}";
  return os.str();
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("HYBRID_RELAX_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

double axis_value(const SweepRow& r, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::H: return r.h;
    case SweepAxis::Eps: return r.eps;
    case SweepAxis::Delta: return r.delta;
  }
  return r.h;
}

void finish(SweepResult& res) {
  std::vector<double> xs, ys;
  for (auto& r : res.rows) {
    xs.push_back(axis_value(r, res.axis));
    ys.push_back(r.error);
    r.slope_running = std::numeric_limits<double>::quiet_NaN();
    if (xs.size() >= 2) {
      const std::size_t k = xs.size();
      if (xs[k - 1] > 0 && xs[k - 2] > 0 && ys[k - 1] > 0 && ys[k - 2] > 0 && xs[k - 1] != xs[k - 2])
        r.slope_running = std::log10(ys[k - 1] / ys[k - 2]) / std::log10(xs[k - 1] / xs[k - 2]);
    }
  }
  res.fit = fit_loglog(xs, ys);
}

}  // namespace

SweepResult run_sweep(const std::vector<SweepPoint>& points, const std::function<double(const SweepPoint&)>& error,
                      SweepAxis axis, unsigned threads) {
  SweepResult res;
  res.axis = axis;
  res.rows.resize(points.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads ? threads : sweep_threads(),
                                                           static_cast<unsigned>(points.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const double err = error(points[i]);
        const auto t1 = std::chrono::steady_clock::now();
        SweepRow& r = res.rows[i];
        r.h = points[i].h;
        r.eps = points[i].eps;
        r.delta = points[i].delta;
        r.error = err;
        r.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  finish(res);
  return res;
}

namespace {

Trajectory run_point(const ConvergenceSpec& spec, const RelaxedSystem& rs, const SweepPoint& p) {
  if (spec.adaptive) return simulate_relaxed_reference(rs, spec.x0, spec.mode0, spec.input, spec.T, spec.reference);
  return simulate_augmented(rs, {spec.scheme, p.h}, spec.x0, spec.mode0, spec.input, spec.T);
}

}  // namespace

SweepResult convergence_sweep(const ConvergenceSpec& spec) {
  if (spec.grid.empty()) throw ConfigError("empty sweep grid");
  std::optional<Trajectory> filippov_ref;
  if (spec.kind == ErrorKind::Filippov) {
    FilippovOptions fo;
    fo.tol = spec.reference.tol;
    fo.max_step = spec.reference.max_step;
    filippov_ref = simulate_filippov(FilippovSystem(spec.system), spec.x0, spec.mode0, spec.input, spec.T, fo);
  }
  std::optional<Trajectory> self_ref;
  std::size_t finest = 0;
  if (spec.kind == ErrorKind::SelfReference) {
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
      const auto& a = spec.grid[i];
      const auto& b = spec.grid[finest];
      if (a.h < b.h || (a.h == b.h && a.eps < b.eps)) finest = i;
    }
  }
  if (spec.kind == ErrorKind::Analytic && !spec.exact) throw ConfigError("analytic error kind needs a closed form");

  auto error = [&](const SweepPoint& p) -> double {
    RelaxedSystem rs(spec.system, {p.eps, spec.transition});
    const Trajectory tr = run_point(spec, rs, p);
    QuotientMetric metric(rs.geometry());
    DistanceOptions dopt;
    dopt.grid = spec.grid_kind;
    switch (spec.kind) {
      case ErrorKind::RestNorm:
        return sup_norm_after(tr, spec.rest_from);
      case ErrorKind::Analytic: {
        double sup = 0.0;
        for (const auto& s : tr.samples) sup = std::max(sup, metric.distance({s.mode, s.x}, spec.exact(s.t)));
        return sup;
      }
      case ErrorKind::Filippov:
        return trajectory_distance(metric, tr, *filippov_ref, dopt);
      case ErrorKind::SelfReference: {
        const SweepPoint& f = spec.grid[finest];
        RelaxedSystem rf(spec.system, {f.eps, spec.transition});
        const Trajectory ref = run_point(spec, rf, f);
        return trajectory_distance(metric, tr, ref, dopt);
      }
    }
    return 0.0;
  };
  return run_sweep(spec.grid, error, spec.axis, spec.threads);
}

SweepResult sensitivity_sweep(const SensitivitySpec& spec) {
  if (spec.deltas.empty()) throw ConfigError("empty perturbation grid");
  RelaxedSystem rs(spec.system, {spec.eps, spec.transition});
  const IntegratorScheme scheme{spec.scheme, spec.h};
  DiscreteOptions dopt;
  dopt.apply_resets = false;
  const Trajectory nominal = simulate_augmented(rs, scheme, spec.x0, spec.mode0, spec.input, spec.T, dopt);
  if (nominal.termination != Termination::HorizonReached)
    throw DomainError("nominal trajectory terminated early (" + termination_name(nominal.termination) + ")");
  QuotientMetric metric(rs.geometry());
  std::vector<SweepPoint> points;
  for (double d : spec.deltas) points.push_back({spec.h, spec.eps, d});
  auto error = [&](const SweepPoint& p) {
    const Vec dx0 = p.delta * spec.direction;
    const Trajectory pert = simulate_augmented(rs, scheme, spec.x0 + dx0, spec.mode0, spec.input, spec.T, dopt);
    const VariationalResult lin = variational_flow(rs, scheme, nominal, dx0, spec.input);
    DistanceOptions o;
    o.grid = TimeGrid::First;
    return trajectory_distance(metric, pert, lin.linearized, o);
  };
  return run_sweep(points, error, SweepAxis::Delta, spec.threads);
}

}  // namespace hyrelax

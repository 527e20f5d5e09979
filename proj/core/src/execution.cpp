#include "hyrelax/execution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace hyrelax {

namespace {

constexpr double kGuardTol = 1e-12;
constexpr int kMaxBisections = 200;

void check_start(const HybridSystem& sys, const Vec& x0, ModeIndex j0, const InputSignal& u, double T) {
  if (j0 >= sys.modes.size()) throw DomainError("initial mode index out of range");
  if (x0.size() != static_cast<Eigen::Index>(sys.state_dim)) throw DomainError("initial state has wrong dimension");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("horizon T must be positive and finite");
  if (!sys.mode(j0).domain.contains(x0, 1e-9))
    throw DomainError("initial state " + format_vec(x0) + " is not in the domain of mode " +
                      std::to_string(sys.mode(j0).id));
  if (u.dim() != sys.input_dim) throw ConfigError("input signal dimension differs from input_dim");
  for (const auto& v : u.values())
    if (!sys.input_box.contains(v, 1e-12)) throw ConfigError("input value " + format_vec(v) + " is outside the input box");
}

Vec join(const Vec& x, const Vec& z) {
  Vec xz(x.size() + z.size());
  xz << x, z;
  return xz;
}

bool z_exceeded(const RelaxedGeometry& geo, ModeIndex j, const Vec& z) {
  for (EdgeIndex e : geo.outgoing(j)) {
    const EdgeGeometry& g = geo.edge(e);
    if (g.aux_dim() == 0) continue;
    if (geo.aux_slice(e, z).lpNorm<Eigen::Infinity>() > g.z_bound * (1.0 + 1e-9) + 1e-12) return true;
  }
  return false;
}

Trajectory run_fixed_step(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Vec& x0, ModeIndex j0,
                          const InputSignal& u, double T, const DiscreteOptions& opt) {
  const HybridSystem& sys = rs.system();
  const RelaxedGeometry& geo = rs.geometry();
  check_start(sys, x0, j0, u, T);
  if (!(scheme.h > 0.0)) throw ConfigError("step size h must be positive");
  const double ratio = T / scheme.h;
  const auto N = static_cast<long long>(std::llround(ratio));
  if (N < 1 || std::abs(ratio - static_cast<double>(N)) > 1e-6 * std::max(1.0, ratio))
    throw ConfigError("horizon T must be an integer multiple of h");
  const std::size_t stride = std::max<std::size_t>(1, opt.sample_stride);
  const auto n = x0.size();

  Trajectory traj;
  ModeIndex j = j0;
  Vec x = x0;
  Vec z = Vec::Zero(static_cast<Eigen::Index>(geo.aux_dim(j)));
  traj.samples.push_back({0.0, j, x, geo.membership(j, x, z), z});

  for (long long k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) * scheme.h;
    const double tn = static_cast<double>(k + 1) * scheme.h;
    const Vec uk = u.at(t);
    const ModeIndex jj = j;
    const StateField F = [&](const Vec& v) { return rs.state_field(jj, v, uk, false); };
    const Vec gamma = integrator_step(scheme.kind, F, join(x, z), scheme.h);
    if (!gamma.allFinite()) throw NumericError("non-finite state after step at t = " + format_double(t));
    const Vec gx = gamma.head(n);
    const Vec gz = gamma.tail(gamma.size() - n);
    const Region r = geo.membership(j, gx, gz);
    const bool keep = ((k + 1) % static_cast<long long>(stride) == 0) || k + 1 == N;

    if (r.kind == RegionKind::Outside) {
      // Last in-domain point on the interpolating segment.
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < kMaxBisections && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec xm = (1.0 - mid) * x + mid * gx;
        const Vec zm = (1.0 - mid) * z + mid * gz;
        (geo.membership(j, xm, zm).kind == RegionKind::Outside ? hi : lo) = mid;
      }
      const Vec xl = (1.0 - lo) * x + lo * gx;
      const Vec zl = (1.0 - lo) * z + lo * gz;
      const double tl = t + lo * scheme.h;
      if (tl > traj.samples.back().t) traj.samples.push_back({tl, j, xl, geo.membership(j, xl, zl), zl});
      traj.termination = Termination::LeftDomain;
      traj.termination_time = tl;
      return traj;
    }

    if (r.kind == RegionKind::Projected && opt.apply_resets) {
      const EdgeIndex e = r.edge;
      const ModeIndex jt = sys.edge(e).target;
      const Vec post = geo.reset(e, gx, gz);
      const Vec pz = Vec::Zero(static_cast<Eigen::Index>(geo.aux_dim(jt)));
      const Region pr = geo.membership(jt, post, pz);
      if (pr.kind == RegionKind::Outside)
        throw GeometryError("relaxed reset of edge " + std::to_string(sys.edge(e).id) + " maps " + format_vec(gx) +
                            " outside the extended domain of the target");
      Event ev;
      ev.t = tn;
      ev.edge = e;
      ev.from = j;
      ev.to = jt;
      ev.pre_x = gx;
      ev.pre_z = gz;
      ev.pre_region = r;
      ev.post_x = post;
      ev.post_z = pz;
      ev.sample = traj.samples.size();
      traj.events.push_back(std::move(ev));
      traj.samples.push_back({tn, jt, post, pr, pz});
      j = jt;
      x = post;
      z = pz;
      continue;
    }

    x = gx;
    z = gz;
    const bool over = z_exceeded(geo, j, z);
    if (keep || over) traj.samples.push_back({tn, j, x, r, z});
    if (over) {
      traj.termination = Termination::ZBoundExceeded;
      traj.termination_time = tn;
      return traj;
    }
  }
  traj.termination = Termination::HorizonReached;
  traj.termination_time = traj.samples.back().t;
  return traj;
}

}  // namespace

Trajectory simulate_discrete(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Vec& x0, ModeIndex j0,
                             const InputSignal& u, double T, const DiscreteOptions& opt) {
  if (rs.geometry().has_rank_deficient_edge())
    throw GeometryError("system has a rank-deficient edge; use simulate_augmented");
  return run_fixed_step(rs, scheme, x0, j0, u, T, opt);
}

Trajectory simulate_augmented(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Vec& x0, ModeIndex j0,
                              const InputSignal& u, double T, const DiscreteOptions& opt) {
  return run_fixed_step(rs, scheme, x0, j0, u, T, opt);
}

Trajectory simulate_relaxed_reference(const RelaxedSystem& rs, const Vec& x0, ModeIndex j0, const InputSignal& u,
                                      double T, const ReferenceOptions& opt) {
  const HybridSystem& sys = rs.system();
  const RelaxedGeometry& geo = rs.geometry();
  check_start(sys, x0, j0, u, T);
  if (!(opt.tol > 0.0)) throw ConfigError("reference tolerance must be positive");
  const auto n = x0.size();

  Trajectory traj;
  ModeIndex j = j0;
  Vec x = x0;
  Vec z = Vec::Zero(static_cast<Eigen::Index>(geo.aux_dim(j)));
  traj.samples.push_back({0.0, j, x, geo.membership(j, x, z), z});

  // Edge whose relaxed guard x has reached: projected points and strip points
  // on the far side of the relaxed guard.
  auto crossed = [&](ModeIndex m, const Vec& xx, const Vec& zz) -> std::optional<EdgeIndex> {
    if (!opt.apply_resets) return std::nullopt;
    const Region r = geo.membership(m, xx, zz);
    if (r.kind == RegionKind::Projected) return r.edge;
    if (r.kind == RegionKind::Strip && relaxed_guard_value(sys.edge(r.edge), geo.eps(), xx) >= 0.0) return r.edge;
    return std::nullopt;
  };
  auto in_chart = [&](ModeIndex m, const Vec& xx, const Vec& zz) {
    if (geo.membership(m, xx, zz).kind == RegionKind::Outside) return false;
    return !crossed(m, xx, zz);
  };

  double t = 0.0;
  double h_try = std::min(opt.max_step, T / 100.0);
  std::size_t n_events = 0;
  while (T - t > 1e-12 * std::max(1.0, T)) {
    double h = std::min({h_try, opt.max_step, T - t});
    const double tb = u.next_breakpoint(t);
    if (tb - t < h && tb - t > 1e-14 * std::max(1.0, t)) h = tb - t;
    const Vec ut = u.at(t);
    const ModeIndex jj = j;
    const StateField F = [&](const Vec& v) { return rs.state_field(jj, v, ut, false); };
    const Vec xz = join(x, z);
    const Dopri5Step st = dopri5_step(F, xz, h);
    const double err = dopri5_error_norm(xz, st.y, st.error, opt.tol);
    if (!(err <= 1.0)) {
      h_try = h * std::max(0.1, 0.9 * std::pow(std::max(err, 1e-300), -0.2));
      if (!std::isfinite(err)) h_try = 0.1 * h;
      if (h_try < 1e-15 * std::max(1.0, t))
        throw NumericError("step size underflow at t = " + format_double(t) + ", x = " + format_vec(x));
      continue;
    }
    const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    Vec y = st.y;
    double tn = (T - (t + h) <= 1e-12 * std::max(1.0, T)) ? T : t + h;

    if (!in_chart(j, y.head(n), y.tail(y.size() - n))) {
      // Localize the first exit from the chart along the step.
      double lo = 0.0, hi = 1.0;
      Vec y_hi = y;
      for (int it = 0; it < kMaxBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec ym = dopri5_step(F, xz, mid * h).y;
        if (in_chart(j, ym.head(n), ym.tail(ym.size() - n))) {
          lo = mid;
        } else {
          hi = mid;
          y_hi = ym;
        }
        const Vec xh = y_hi.head(n);
        bool tight = (hi - lo) * h <= 1e-15 * std::max(1.0, t);
        for (EdgeIndex e : geo.outgoing(j)) {
          const double gv = relaxed_guard_value(sys.edge(e), geo.eps(), xh);
          if (gv >= 0.0 && gv <= kGuardTol * (1.0 + xh.norm())) tight = true;
        }
        if (tight) break;
      }
      const Vec xh = y_hi.head(n);
      const Vec zh = y_hi.tail(y_hi.size() - n);
      const double tc = t + hi * h;
      if (const auto hit = crossed(j, xh, zh)) {
        const EdgeIndex e = *hit;
        const Region r = Region::projected(e);
        const ModeIndex jt = sys.edge(e).target;
        const Vec post = geo.reset(e, xh, zh);
        const Vec pz = Vec::Zero(static_cast<Eigen::Index>(geo.aux_dim(jt)));
        const Region pr = geo.membership(jt, post, pz);
        if (pr.kind == RegionKind::Outside)
          throw GeometryError("relaxed reset of edge " + std::to_string(sys.edge(e).id) +
                              " leaves the target's extended domain");
        if (++n_events > opt.event_budget) throw NumericError("event budget exhausted at t = " + format_double(tc));
        Event ev{tc, e, j, jt, xh, zh, r, post, pz, traj.samples.size()};
        traj.events.push_back(std::move(ev));
        traj.samples.push_back({tc, jt, post, pr, pz});
        j = jt;
        x = post;
        z = pz;
        t = tc;
        continue;
      }
      const Vec yl = dopri5_step(F, xz, lo * h).y;
      const double tl = t + lo * h;
      if (tl > traj.samples.back().t)
        traj.samples.push_back({tl, j, yl.head(n), geo.membership(j, yl.head(n), yl.tail(yl.size() - n)),
                                yl.tail(yl.size() - n)});
      traj.termination = Termination::LeftDomain;
      traj.termination_time = tl;
      return traj;
    }

    x = y.head(n);
    z = y.tail(y.size() - n);
    t = tn;
    h_try = h * grow;
    traj.samples.push_back({t, j, x, geo.membership(j, x, z), z});
    if (z_exceeded(geo, j, z)) {
      traj.termination = Termination::ZBoundExceeded;
      traj.termination_time = t;
      return traj;
    }
  }
  traj.termination = Termination::HorizonReached;
  traj.termination_time = traj.samples.back().t;
  return traj;
}

namespace {

struct Contact {
  bool found = false;
  EdgeIndex edge = 0;
};

// Outgoing edge whose guard facet contains x (within tolerance).
Contact guard_contact(const RelaxedGeometry& geo, ModeIndex j, const Vec& x, double tol) {
  const HybridSystem& sys = geo.system();
  for (EdgeIndex e : geo.outgoing(j)) {
    const Edge& edge = sys.edge(e);
    if (std::abs(guard_value(edge, x)) <= tol &&
        sys.mode(j).domain.contains(project_to_guard_plane(edge, x), 1e-9))
      return {true, e};
  }
  return {};
}

}  // namespace

Trajectory simulate_filippov(const FilippovSystem& fs, const Vec& x0, ModeIndex j0, const InputSignal& u, double T,
                             const FilippovOptions& opt) {
  const HybridSystem& sys = fs.system();
  const RelaxedGeometry& geo = fs.geometry();
  check_start(sys, x0, j0, u, T);

  Trajectory traj;
  ModeIndex j = j0;
  Vec x = x0;
  std::optional<EdgeIndex> sliding;
  double t = 0.0;
  double h_try = std::min(opt.max_step, T / 100.0);
  std::size_t n_events = 0;
  std::size_t zeno_run = 0;
  double last_event_t = -1.0;

  auto contact_tol = [](const Vec& v) { return 1e-9 * (1.0 + v.norm()); };

  // Decide what happens at a guard contact: slide, cross (returns true), or throw.
  auto resolve_contact = [&](EdgeIndex e, Vec xc, double tc) {
    const Edge& edge = sys.edge(e);
    xc = project_to_guard_plane(edge, xc);
    const Vec ut = u.at(tc);
    const RegionClass rc = fs.classify_region(e, xc, ut);
    if (rc.a1 < 0.0 && std::abs(rc.a1) > 1e-12) {
      sliding.reset();
      if (traj.samples.back().t < tc) traj.samples.push_back({tc, j, xc, Region::interior(), Vec()});
      return xc;  // moving back into the interior
    }
    if (rc.tag == RegionTag::Crossing && rc.a1 > 0.0) {
      const Vec post = edge.reset(xc);
      if (++n_events > opt.event_budget) throw NumericError("event budget exhausted at t = " + format_double(tc));
      zeno_run = (tc - last_event_t < 1e-12) ? zeno_run + 1 : 0;
      last_event_t = tc;
      if (zeno_run >= opt.zeno_limit)
        throw FilippovUndefined("Zeno accumulation of transitions near t = " + format_double(tc) + ", x = " +
                                format_vec(xc));
      Event ev{tc, e, j, edge.target, xc, Vec(), Region::strip(e), post, Vec(), traj.samples.size()};
      traj.events.push_back(std::move(ev));
      traj.samples.push_back({tc, edge.target, post, Region::interior(), Vec()});
      j = edge.target;
      sliding.reset();
      return post;
    }
    if (rc.tag == RegionTag::Sliding) {
      sliding = e;
      if (traj.samples.back().t < tc) traj.samples.push_back({tc, j, xc, Region::sliding(e), Vec()});
      return xc;
    }
    throw FilippovUndefined("Filippov solution undefined at t = " + format_double(tc) + ", x = " + format_vec(xc) +
                            " (ghat.f_j = " + format_double(rc.a1) + ", ghat.f_e = " + format_double(rc.a2) + ")");
  };

  traj.samples.push_back({0.0, j, x, Region::interior(), Vec()});
  if (const Contact c = guard_contact(geo, j, x, contact_tol(x)); c.found) {
    x = resolve_contact(c.edge, x, 0.0);
    if (sliding) traj.samples.back().region = Region::sliding(*sliding);
  }


  auto sliding_ok = [&](EdgeIndex e, const Vec& xx, const Vec& ut) {
    const RegionClass rc = fs.classify_region(e, xx, ut);
    return rc.tag == RegionTag::Sliding;
  };

  while (T - t > 1e-12 * std::max(1.0, T)) {
    double h = std::min({h_try, opt.max_step, T - t});
    const double tb = u.next_breakpoint(t);
    if (tb - t < h && tb - t > 1e-14 * std::max(1.0, t)) h = tb - t;
    const Vec ut = u.at(t);
    StateField F;
    const ModeIndex jj = j;
    if (sliding) {
      const EdgeIndex e = *sliding;
      F = [&, e](const Vec& v) {
        const Edge& edge = sys.edge(e);
        const Vec fj = eval_field(sys, edge.source, v, ut);
        const Vec fe = fs.projected_field(e, v, ut);
        const double a1 = edge.guard_normal.dot(fj);
        const double a2 = edge.guard_normal.dot(fe);
        if (a1 == a2) throw FilippovUndefined("sliding field undefined at " + format_vec(v));
        const double alpha = a1 / (a1 - a2);
        return Vec((1.0 - alpha) * fj + alpha * fe);
      };
    } else {
      F = [&, jj](const Vec& v) { return eval_field(sys, jj, v, ut); };
    }
    const Dopri5Step st = dopri5_step(F, x, h);
    const double err = dopri5_error_norm(x, st.y, st.error, opt.tol);
    if (!(err <= 1.0)) {
      h_try = std::isfinite(err) ? h * std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1 * h;
      if (h_try < 1e-15 * std::max(1.0, t))
        throw NumericError("step size underflow at t = " + format_double(t) + ", x = " + format_vec(x));
      continue;
    }
    const double grow = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    const double tn = (T - (t + h) <= 1e-12 * std::max(1.0, T)) ? T : t + h;

    if (sliding) {
      const EdgeIndex e = *sliding;
      const Edge& edge = sys.edge(e);
      auto stage = [&](double theta) { return project_to_guard_plane(edge, dopri5_step(F, x, theta * h).y); };
      const Vec y = project_to_guard_plane(edge, st.y);
      const bool on_facet = sys.mode(j).domain.contains(y, 1e-9);
      if (on_facet && sliding_ok(e, y, ut)) {
        x = y;
        t = tn;
        h_try = h * grow;
        traj.samples.push_back({t, j, x, Region::sliding(e), Vec()});
        continue;
      }
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < kMaxBisections && (hi - lo) * h > 1e-14 * std::max(1.0, t); ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec ym = stage(mid);
        (sys.mode(j).domain.contains(ym, 1e-9) && sliding_ok(e, ym, ut) ? lo : hi) = mid;
      }
      const Vec yx = stage(hi);
      const double tx = t + hi * h;
      if (!sys.mode(j).domain.contains(yx, 1e-9)) {
        const Vec yl = stage(lo);
        traj.samples.push_back({t + lo * h, j, yl, Region::sliding(e), Vec()});
        traj.termination = Termination::LeftDomain;
        traj.termination_time = t + lo * h;
        return traj;
      }
      const RegionClass rc = fs.classify_region(e, yx, ut);
      t = tx;
      if (rc.a1 <= 0.0 && rc.a2 < 0.0) {
        traj.samples.push_back({tx, j, yx, Region::sliding(e), Vec()});
        sliding.reset();
        x = yx;
      } else if (rc.a1 > 0.0 && rc.a2 >= 0.0) {
        // Sliding ends in a crossing; apply the reset.
        const Vec post = edge.reset(yx);
        if (++n_events > opt.event_budget) throw NumericError("event budget exhausted");
        Event ev{tx, e, j, edge.target, yx, Vec(), Region::sliding(e), post, Vec(), traj.samples.size()};
        traj.events.push_back(std::move(ev));
        traj.samples.push_back({tx, edge.target, post, Region::interior(), Vec()});
        j = edge.target;
        x = post;
        sliding.reset();
      } else {
        throw FilippovUndefined("sliding motion reaches an escaping or tangential point at t = " +
                                format_double(tx) + ", x = " + format_vec(yx));
      }
      continue;
    }

    if (sys.mode(j).domain.contains(st.y, 1e-12)) {
      x = st.y;
      t = tn;
      h_try = h * grow;
      traj.samples.push_back({t, j, x, Region::interior(), Vec()});
      continue;
    }
    // Localize the boundary contact.
    double lo = 0.0, hi = 1.0;
    Vec y_hi = st.y;
    for (int it = 0; it < kMaxBisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Vec ym = dopri5_step(F, x, mid * h).y;
      if (sys.mode(j).domain.contains(ym, 0.0)) {
        lo = mid;
      } else {
        hi = mid;
        y_hi = ym;
      }
      if (sys.mode(j).domain.max_violation(y_hi) <= kGuardTol * (1.0 + y_hi.norm()) ||
          (hi - lo) * h <= 1e-15 * std::max(1.0, t))
        break;
    }
    const double tc = t + hi * h;
    const Contact c = guard_contact(geo, j, y_hi, contact_tol(y_hi));
    if (!c.found) {
      const Vec yl = dopri5_step(F, x, lo * h).y;
      traj.samples.push_back({t + lo * h, j, yl, Region::interior(), Vec()});
      traj.termination = Termination::LeftDomain;
      traj.termination_time = t + lo * h;
      return traj;
    }
    t = tc;
    x = resolve_contact(c.edge, y_hi, tc);
  }
  traj.termination = Termination::HorizonReached;
  traj.termination_time = traj.samples.back().t;
  return traj;
}

}  // namespace hyrelax

#include "hyrelax/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hyrelax {

QuotientMetric::QuotientMetric(const RelaxedGeometry& geo, double tol) : geo_(&geo), tol_(tol) {
  const HybridSystem& sys = geo.system();
  const auto n = static_cast<Eigen::Index>(sys.state_dim);
  facets_.resize(sys.edges.size());
  for (EdgeIndex e = 0; e < sys.edges.size(); ++e) {
    const Edge& edge = sys.edge(e);
    Facet& f = facets_[e];
    f.origin = edge.guard_normal * edge.guard_offset;
    Eigen::HouseholderQR<Mat> qr(Mat(edge.guard_normal));
    const Mat Q = qr.householderQ() * Mat::Identity(n, n);
    f.basis = Q.rightCols(n - 1);
    const Polytope& D = sys.mode(edge.source).domain;
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < D.normals.rows(); ++i)
      if ((D.normals.row(i) * f.basis).norm() > 1e-12) rows.push_back(i);
    f.cons_A.resize(static_cast<Eigen::Index>(rows.size()), n - 1);
    f.cons_b.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto i = rows[r];
      const auto rr = static_cast<Eigen::Index>(r);
      f.cons_A.row(rr) = D.normals.row(i) * f.basis;
      f.cons_b[rr] = D.offsets[i] - D.normals.row(i).dot(f.origin);
    }
    const auto verts = guard_facet_vertices(sys, e);
    f.center = Vec::Zero(n - 1);
    f.lo = std::numeric_limits<double>::infinity();
    f.hi = -f.lo;
    std::vector<Vec> xis;
    for (const auto& v : verts) xis.push_back(f.basis.transpose() * (v - f.origin));
    for (const auto& xi : xis) f.center += xi;
    if (!xis.empty()) f.center /= static_cast<double>(xis.size());
    for (const auto& xi : xis) {
      f.radius = std::max(f.radius, (xi - f.center).norm());
      if (n == 2) {
        f.lo = std::min(f.lo, xi[0]);
        f.hi = std::max(f.hi, xi[0]);
      }
    }
    f.radius = 1.01 * f.radius + 1e-9;
  }
}

double QuotientMetric::hop_lower_bound(EdgeIndex e, const Vec& xp, const Vec& xq) const {
  const Edge& edge = geo_->system().edge(e);
  const EdgeGeometry& g = geo_->edge(e);
  return std::abs(relaxed_guard_value(edge, geo_->eps(), xp)) + std::abs(g.receiving_value(xq));
}

double QuotientMetric::hop(EdgeIndex e, const Vec& xp, const Vec& xq) const {
  const Edge& edge = geo_->system().edge(e);
  const EdgeGeometry& g = geo_->edge(e);
  const Facet& f = facets_[e];
  const Vec w0 = f.origin + edge.guard_normal * geo_->eps();
  const Vec a = xp - w0;
  const Mat M = g.A_bar * f.basis;
  const Vec c = g.bar_reset(w0) - xq;
  const auto d = f.basis.cols();

  auto objective = [&](const Vec& xi) { return (a - f.basis * xi).norm() + (c + M * xi).norm(); };
  if (d == 0) return objective(Vec());

  // Foot of x_p on the plane and the least-squares preimage of x_q.
  double seed = std::numeric_limits<double>::infinity();
  const Vec feet[2] = {f.basis.transpose() * a, M.colPivHouseholderQr().solve(-c)};
  for (const Vec& xi0 : feet) {
    Vec xi = xi0;
    if (d == 1) xi[0] = std::clamp(xi[0], f.lo, f.hi);
    else if (((f.cons_A * xi - f.cons_b).array() > 1e-12).any()) continue;
    if (xi.allFinite()) seed = std::min(seed, objective(xi));
  }
  if (d == 1) {
    double lo = f.lo, hi = f.hi;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    Vec xi1(1), xi2(1);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    xi1[0] = x1;
    xi2[0] = x2;
    double f1 = objective(xi1), f2 = objective(xi2);
    while (hi - lo > tol_ * (1.0 + std::abs(lo) + std::abs(hi))) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - r * (hi - lo);
        xi1[0] = x1;
        f1 = objective(xi1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (hi - lo);
        xi2[0] = x2;
        f2 = objective(xi2);
      }
    }
    Vec xl(1), xh(1);
    xl[0] = f.lo;
    xh[0] = f.hi;
    return std::min({f1, f2, objective(xl), objective(xh), seed});
  }

  // Central-cut ellipsoid method over the facet in plane coordinates.
  const double dd = static_cast<double>(d);
  Vec xc = f.center;
  Mat P = Mat::Identity(d, d) * (f.radius * f.radius);
  double best = std::min(seed, objective(f.center));
  double lower = 0.0;
  const int max_iter = 400 * static_cast<int>(d * d) + 200;
  for (int it = 0; it < max_iter; ++it) {
    Vec cut;
    Eigen::Index worst = -1;
    double viol = 0.0;
    for (Eigen::Index i = 0; i < f.cons_A.rows(); ++i) {
      const double v = f.cons_A.row(i).dot(xc) - f.cons_b[i];
      if (v > viol) {
        viol = v;
        worst = i;
      }
    }
    if (worst >= 0 && viol > 1e-14 * (1.0 + std::abs(f.cons_b[worst]))) {
      cut = f.cons_A.row(worst).transpose();
    } else {
      const Vec r1 = a - f.basis * xc;
      const Vec r2 = c + M * xc;
      const double n1 = r1.norm(), n2 = r2.norm();
      const double fx = n1 + n2;
      best = std::min(best, fx);
      cut = Vec::Zero(d);
      if (n1 > 0.0) cut -= f.basis.transpose() * r1 / n1;
      if (n2 > 0.0) cut += M.transpose() * r2 / n2;
      const double width = std::sqrt(std::max(0.0, cut.dot(P * cut)));
      lower = std::max(lower, fx - width);
      if (best - lower <= tol_ * (1.0 + best) || cut.norm() == 0.0) break;
    }
    const double gpg = cut.dot(P * cut);
    if (!(gpg > 0.0)) break;
    const Vec Pg = P * cut / std::sqrt(gpg);
    xc -= Pg / (dd + 1.0);
    P = (dd * dd / (dd * dd - 1.0)) * (P - (2.0 / (dd + 1.0)) * Pg * Pg.transpose());
  }
  return best;
}

double QuotientMetric::distance(const HybridPoint& p, const HybridPoint& q) const {
  const HybridSystem& sys = geo_->system();
  double best = std::numeric_limits<double>::infinity();
  if (p.mode == q.mode) best = (p.x - q.x).norm();
  for (EdgeIndex e = 0; e < sys.edges.size(); ++e) {
    const Edge& edge = sys.edge(e);
    if (edge.source == p.mode && edge.target == q.mode && hop_lower_bound(e, p.x, q.x) < best)
      best = std::min(best, hop(e, p.x, q.x));
    if (edge.source == q.mode && edge.target == p.mode && hop_lower_bound(e, q.x, p.x) < best)
      best = std::min(best, hop(e, q.x, p.x));
    // points past the relaxed guard are identified with their reset images
    const double eps = geo_->eps();
    if (edge.source == p.mode && edge.target == q.mode && relaxed_guard_value(edge, eps, p.x) >= 0.0)
      best = std::min(best, (geo_->edge(e).bar_reset(p.x) - q.x).norm());
    if (edge.source == q.mode && edge.target == p.mode && relaxed_guard_value(edge, eps, q.x) >= 0.0)
      best = std::min(best, (geo_->edge(e).bar_reset(q.x) - p.x).norm());
  }
  return best;
}

double quotient_distance(const RelaxedGeometry& geo, const HybridPoint& p, const HybridPoint& q) {
  return QuotientMetric(geo).distance(p, q);
}

double trajectory_distance(const QuotientMetric& metric, const Trajectory& a, const Trajectory& b,
                           const DistanceOptions& opt) {
  if (a.empty() || b.empty()) throw DomainError("trajectory_distance needs nonempty trajectories");
  const double t_lo = std::max({opt.t_from, a.t_begin(), b.t_begin()});
  const double t_hi = std::min({opt.t_to, a.t_end(), b.t_end()});
  if (!std::isfinite(opt.t_to) &&
      std::abs(a.t_end() - b.t_end()) > opt.horizon_tol * (1.0 + std::max(a.t_end(), b.t_end())))
    throw DomainError("trajectory horizons differ: " + format_double(a.t_end()) + " vs " + format_double(b.t_end()));
  std::vector<double> grid;
  auto add = [&](const Trajectory& tr) {
    for (const auto& s : tr.samples)
      if (s.t >= t_lo && s.t <= t_hi) grid.push_back(s.t);
  };
  if (opt.grid != TimeGrid::Second) add(a);
  if (opt.grid != TimeGrid::First) add(b);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double sup = 0.0;
  for (double t : grid) {
    const TrajectoryPoint pa = a.at(t);
    const TrajectoryPoint pb = b.at(t);
    sup = std::max(sup, metric.distance({pa.mode, pa.x}, {pb.mode, pb.x}));
  }
  return sup;
}

double sup_norm_after(const Trajectory& traj, double t_from, double t_to) {
  double sup = 0.0;
  for (const auto& s : traj.samples)
    if (s.t >= t_from && s.t <= t_to) sup = std::max(sup, s.x.lpNorm<Eigen::Infinity>());
  return sup;
}

}  // namespace hyrelax

#include "hyrelax/relaxation.hpp"

#include <cmath>
#include <limits>

namespace hyrelax {

RelaxedSystem::RelaxedSystem(const HybridSystem& sys, RelaxationParams params, MembershipTolerances tol)
    : params_(params), geo_(sys, params.eps, tol) {
  if (!(params.eps > 0.0)) throw ConfigError("relaxation width eps must be positive");
}

double RelaxedSystem::phi_edge(EdgeIndex e, const Vec& x) const {
  return params_.transition(guard_value(system().edge(e), x) / params_.eps);
}

Vec RelaxedSystem::edge_field(EdgeIndex e, const Vec& x, const Vec& u) const {
  const Edge& edge = system().edge(e);
  const EdgeGeometry& g = geo_.edge(e);
  if (!g.full_rank())
    throw GeometryError("edge " + std::to_string(edge.id) + " is rank deficient; use the augmented field");
  const double phi = phi_edge(e, x);
  Vec out = Vec::Zero(x.size());
  if (phi < 1.0) out += (1.0 - phi) * eval_field(system(), edge.source, x, u);
  if (phi > 0.0) out += phi * g.solve(eval_field(system(), edge.target, g.bar_reset(x), u));
  return out;
}

Vec RelaxedSystem::mode_field(ModeIndex j, const Vec& x, const Vec& u) const {
  const Region r = geo_.membership(j, x);
  switch (r.kind) {
    case RegionKind::Interior:
      return eval_field(system(), j, x, u);
    case RegionKind::Strip:
    case RegionKind::Projected:
      return edge_field(r.edge, x, u);
    default:
      throw DomainError("state " + format_vec(x) + " lies outside the extended domain of mode " +
                        std::to_string(system().mode(j).id));
  }
}

Vec RelaxedSystem::augmented_edge_field(EdgeIndex e, const Vec& x, const Vec& z, const Vec& u) const {
  const Edge& edge = system().edge(e);
  const EdgeGeometry& g = geo_.edge(e);
  const auto n = x.size();
  const auto p = static_cast<Eigen::Index>(g.aux_dim());
  if (z.size() != p) throw DomainError("auxiliary state of edge " + std::to_string(edge.id) + " has wrong dimension");
  const double phi = phi_edge(e, x);
  Vec out = Vec::Zero(n + p);
  if (phi < 1.0) out.head(n) += (1.0 - phi) * eval_field(system(), edge.source, x, u);
  if (phi > 0.0) {
    const Vec fy = eval_field(system(), edge.target, g.tilde_reset(x, z), u);
    out += phi * (p == 0 ? g.solve(fy) : Vec(g.A_tilde_pinv * fy));
  }
  return out;
}

Region RelaxedSystem::field_region(ModeIndex j, const Vec& x, const Vec& z, bool strict) const {
  const Region r = geo_.membership(j, x, z);
  if (r.kind != RegionKind::Outside) return r;
  if (strict)
    throw DomainError("state " + format_vec(x) + " lies outside the extended domain of mode " +
                      std::to_string(system().mode(j).id));
  double best = 0.0;
  Region pick = Region::interior();
  for (EdgeIndex e : geo_.outgoing(j)) {
    const double gv = guard_value(system().edge(e), x);
    if (gv > best) {
      best = gv;
      pick = Region::projected(e);
    }
  }
  return pick;
}

Vec RelaxedSystem::state_field(ModeIndex j, const Vec& xz, const Vec& u, bool strict) const {
  const auto n = static_cast<Eigen::Index>(system().state_dim);
  const auto q = static_cast<Eigen::Index>(geo_.aux_dim(j));
  if (xz.size() != n + q) throw DomainError("mode state has wrong dimension");
  const Vec x = xz.head(n);
  const Vec z = xz.tail(q);
  const Region r = field_region(j, x, z, strict);
  Vec out = Vec::Zero(n + q);
  if (r.kind == RegionKind::Interior) {
    out.head(n) = eval_field(system(), j, x, u);
    return out;
  }
  const EdgeIndex e = r.edge;
  const auto p = static_cast<Eigen::Index>(geo_.edge(e).aux_dim());
  const Vec fe = augmented_edge_field(e, x, geo_.aux_slice(e, z), u);
  out.head(n) = fe.head(n);
  if (p > 0) out.segment(n + static_cast<Eigen::Index>(geo_.aux_offset(e)), p) = fe.tail(p);
  return out;
}

Mat RelaxedSystem::source_jacobian(ModeIndex j, const Vec& x, const Vec& u) const {
  const VectorField& f = system().mode(j).field;
  if (f.has_jacobian()) return f.jacobian(x, u);
  return finite_difference_jacobian([&](const Vec& y) { return f.eval(y, u); }, x);
}

Mat RelaxedSystem::state_jacobian(ModeIndex j, const Vec& xz, const Vec& u, bool strict) const {
  const auto n = static_cast<Eigen::Index>(system().state_dim);
  const auto q = static_cast<Eigen::Index>(geo_.aux_dim(j));
  if (xz.size() != n + q) throw DomainError("mode state has wrong dimension");
  const Vec x = xz.head(n);
  const Vec z = xz.tail(q);
  const Region r = field_region(j, x, z, strict);
  Mat J = Mat::Zero(n + q, n + q);
  if (r.kind == RegionKind::Interior) {
    J.topLeftCorner(n, n) = source_jacobian(j, x, u);
  } else {
    const EdgeIndex e = r.edge;
    const Edge& edge = system().edge(e);
    const EdgeGeometry& g = geo_.edge(e);
    const auto p = static_cast<Eigen::Index>(g.aux_dim());
    const Vec ze = geo_.aux_slice(e, z);
    const double a = guard_value(edge, x) / params_.eps;
    const double phi = params_.transition(a);
    const double dphi = params_.transition.derivative(a) / params_.eps;

    // Local Jacobian over (x, z_e).
    Mat Jl = Mat::Zero(n + p, n + p);
    Vec src = Vec::Zero(n + p);
    Vec tgt = Vec::Zero(n + p);
    if (phi < 1.0 || dphi != 0.0) {
      src.head(n) = eval_field(system(), edge.source, x, u);
      if (phi < 1.0) Jl.topLeftCorner(n, n) += (1.0 - phi) * source_jacobian(edge.source, x, u);
    }
    if (phi > 0.0 || dphi != 0.0) {
      const Vec y = g.tilde_reset(x, ze);
      const Vec fy = eval_field(system(), edge.target, y, u);
      const Mat Jy = source_jacobian(edge.target, y, u);
      if (p == 0) {
        tgt = g.solve(fy);
        if (phi > 0.0) Jl += phi * g.solve_matrix(Jy * g.A_bar);
      } else {
        tgt = g.A_tilde_pinv * fy;
        if (phi > 0.0) Jl += phi * g.A_tilde_pinv * Jy * g.A_tilde;
      }
    }
    if (dphi != 0.0) Jl.leftCols(n) += (tgt - src) * (dphi * edge.guard_normal.transpose());

    const auto off = n + static_cast<Eigen::Index>(geo_.aux_offset(e));
    J.topLeftCorner(n, n) = Jl.topLeftCorner(n, n);
    if (p > 0) {
      J.block(0, off, n, p) = Jl.topRightCorner(n, p);
      J.block(off, 0, p, n) = Jl.bottomLeftCorner(p, n);
      J.block(off, off, p, p) = Jl.bottomRightCorner(p, p);
    }
  }
  if (!J.allFinite()) throw NumericError("field Jacobian has non-finite entries at " + format_vec(x));
  return J;
}

}  // namespace hyrelax

#include "hyrelax/filippov.hpp"

namespace hyrelax {

RegionTag classify_normals(double a1, double a2) {
  if (a1 * a2 > 0.0) return RegionTag::Crossing;
  if (a1 > 0.0 && a2 < 0.0) return RegionTag::Sliding;
  if (a1 <= 0.0 && a2 >= 0.0) return RegionTag::Escaping;
  return RegionTag::Degenerate;
}

FilippovSystem::FilippovSystem(const HybridSystem& sys) : geo_(sys, 0.0) {}

Vec FilippovSystem::projected_field(EdgeIndex e, const Vec& x, const Vec& u) const {
  const Edge& edge = system().edge(e);
  const EdgeGeometry& g = geo_.edge(e);
  if (!g.full_rank())
    throw GeometryError("edge " + std::to_string(edge.id) +
                        " has a rank-deficient change of basis; use the augmented field");
  return g.solve(eval_field(system(), edge.target, g.bar_reset(x, false), u));
}

RegionClass FilippovSystem::classify_region(EdgeIndex e, const Vec& x, const Vec& u) const {
  const Edge& edge = system().edge(e);
  RegionClass rc;
  rc.a1 = edge.guard_normal.dot(eval_field(system(), edge.source, x, u));
  rc.a2 = edge.guard_normal.dot(projected_field(e, x, u));
  rc.tag = classify_normals(rc.a1, rc.a2);
  return rc;
}

SlidingField FilippovSystem::sliding_field(EdgeIndex e, const Vec& x, const Vec& u) const {
  const Edge& edge = system().edge(e);
  const Vec fj = eval_field(system(), edge.source, x, u);
  const Vec fe = projected_field(e, x, u);
  const double a1 = edge.guard_normal.dot(fj);
  const double a2 = edge.guard_normal.dot(fe);
  if (classify_normals(a1, a2) != RegionTag::Sliding)
    throw DomainError("contact at " + format_vec(x) + " is not in the sliding region");
  SlidingField s;
  s.alpha = a1 / (a1 - a2);
  s.field = (1.0 - s.alpha) * fj + s.alpha * fe;
  return s;
}

Vec FilippovSystem::switched_field(ModeIndex j, const Vec& x, const Vec& u) const {
  const Region r = geo_.membership(j, x);
  switch (r.kind) {
    case RegionKind::Interior:
      return eval_field(system(), j, x, u);
    case RegionKind::Strip:
    case RegionKind::Projected:
      return projected_field(r.edge, x, u);
    default:
      throw DomainError("state " + format_vec(x) + " lies outside the switched domain of mode " +
                        std::to_string(system().mode(j).id));
  }
}

}  // namespace hyrelax

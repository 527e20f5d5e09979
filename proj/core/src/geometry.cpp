#include "hyrelax/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hyrelax {

double guard_value(const Edge& e, const Vec& x) { return e.guard_normal.dot(x) - e.guard_offset; }

double relaxed_guard_value(const Edge& e, double eps, const Vec& x) {
  return e.guard_normal.dot(x) - (e.guard_offset + eps);
}

Vec project_to_guard_plane(const Edge& e, const Vec& x) { return x - e.guard_normal * guard_value(e, x); }

Vec EdgeGeometry::bar_reset(const Vec& x, bool relaxed) const {
  return A_bar * x + (relaxed ? b_bar_eps : b_bar);
}

Vec EdgeGeometry::tilde_reset(const Vec& x, const Vec& z) const {
  Vec y = bar_reset(x);
  if (null_basis.cols() > 0) {
    if (z.size() != null_basis.cols()) throw DomainError("auxiliary state has wrong dimension");
    y += null_basis * z;
  }
  return y;
}

Vec EdgeGeometry::solve(const Vec& v) const {
  if (!full_rank()) throw GeometryError("A_bar of edge is rank deficient; use the augmented field");
  return lu_.solve(v);
}

Mat EdgeGeometry::solve_matrix(const Mat& m) const {
  if (!full_rank()) throw GeometryError("A_bar of edge is rank deficient; use the augmented field");
  return lu_.solve(m);
}

EdgeGeometry build_edge_geometry(const HybridSystem& sys, EdgeIndex e, double eps) {
  const Edge& edge = sys.edge(e);
  const auto n = static_cast<Eigen::Index>(sys.state_dim);
  EdgeGeometry g;
  g.edge = e;
  g.eps = eps;
  g.kind = classify_edge(sys, e);
  g.guard_normal = edge.guard_normal;
  g.guard_offset = edge.guard_offset;
  if (g.kind == EdgeKind::Reversible) {
    const Edge& partner = sys.edge(*edge.partner);
    g.receiving_normal = partner.guard_normal;
    g.receiving_offset = partner.guard_offset;
  } else {
    if (!edge.target_facet_normal || !edge.target_facet_offset)
      throw GeometryError("edge " + std::to_string(edge.id) + " has neither partner nor target facet");
    g.receiving_normal = *edge.target_facet_normal;
    g.receiving_offset = *edge.target_facet_offset;
  }
  const Vec& gh = g.guard_normal;
  const Vec& nr = g.receiving_normal;
  const double c = g.guard_offset;
  const Mat I = Mat::Identity(n, n);
  g.A_bar = edge.reset_A * (I - gh * gh.transpose()) - nr * gh.transpose();
  g.b_bar = edge.reset_A * gh * c + edge.reset_b + nr * c;
  g.b_bar_eps = g.b_bar + nr * eps;

  Eigen::JacobiSVD<Mat> svd(g.A_bar, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  g.rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > 1e-9 * smax) ++g.rank;
  const Eigen::Index p = n - g.rank;
  if (p > 0 && g.kind == EdgeKind::Reversible)
    throw GeometryError("edge " + std::to_string(edge.id) + " is reversible but A_bar is singular");

  g.null_basis = svd.matrixU().rightCols(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    Eigen::Index imax = 0;
    g.null_basis.col(k).cwiseAbs().maxCoeff(&imax);
    if (g.null_basis(imax, k) < 0.0) g.null_basis.col(k) *= -1.0;
  }
  g.A_tilde.resize(n, n + p);
  g.A_tilde << g.A_bar, g.null_basis;
  g.A_tilde_pinv = Eigen::CompleteOrthogonalDecomposition<Mat>(g.A_tilde).pseudoInverse();

  if (p == 0) g.lu_.compute(g.A_bar);

  g.z_bound = 0.0;
  if (p > 0) {
    const auto verts = enumerate_vertices(sys.mode(edge.target).domain).vertices;
    for (const auto& w : verts)
      g.z_bound = std::max(g.z_bound, (g.null_basis.transpose() * (w - g.b_bar_eps)).lpNorm<Eigen::Infinity>());
  }
  return g;
}

std::pair<Vec, Vec> augmented_reset(const EdgeGeometry& g, const Vec& x, const Vec& z) {
  return {g.tilde_reset(x, z), Vec::Zero(static_cast<Eigen::Index>(g.aux_dim()))};
}

RelaxedGeometry::RelaxedGeometry(const HybridSystem& sys, double eps, MembershipTolerances tol)
    : sys_(sys), eps_(eps), tol_(tol) {
  if (!(eps >= 0.0)) throw ConfigError("relaxation width must be nonnegative");
  edges_.reserve(sys.edges.size());
  for (EdgeIndex e = 0; e < sys.edges.size(); ++e) edges_.push_back(build_edge_geometry(sys, e, eps));
  outgoing_.resize(sys.modes.size());
  aux_dim_.assign(sys.modes.size(), 0);
  aux_offset_.assign(sys.edges.size(), 0);
  for (ModeIndex j = 0; j < sys.modes.size(); ++j) {
    outgoing_[j] = sys.outgoing(j);
    for (EdgeIndex e : outgoing_[j]) {
      aux_offset_[e] = aux_dim_[j];
      aux_dim_[j] += edges_[e].aux_dim();
    }
  }
}

Vec RelaxedGeometry::aux_slice(EdgeIndex e, const Vec& z) const {
  const auto p = static_cast<Eigen::Index>(edges_[e].aux_dim());
  if (p == 0) return Vec();
  if (z.size() == 0) return Vec::Zero(p);
  return z.segment(static_cast<Eigen::Index>(aux_offset_[e]), p);
}

bool RelaxedGeometry::has_rank_deficient_edge() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const EdgeGeometry& g) { return !g.full_rank(); });
}

bool RelaxedGeometry::in_strip(EdgeIndex e, const Vec& x) const {
  const Edge& edge = sys_.edge(e);
  const double g = guard_value(edge, x);
  const double slack = tol_.facet * (1.0 + std::abs(edge.guard_offset));
  if (g < -slack || g > eps_ + slack) return false;
  return sys_.mode(edge.source).domain.contains(project_to_guard_plane(edge, x), tol_.facet);
}

bool RelaxedGeometry::in_projected(EdgeIndex e, const Vec& x, const Vec& z_full) const {
  const Edge& edge = sys_.edge(e);
  if (relaxed_guard_value(edge, eps_, x) < -tol_.facet * (1.0 + std::abs(edge.guard_offset))) return false;
  return sys_.mode(edge.target).domain.contains(reset(e, x, z_full), tol_.target);
}

Region RelaxedGeometry::membership(ModeIndex j, const Vec& x, const Vec& z_full) const {
  if (sys_.mode(j).domain.contains(x, tol_.interior)) return Region::interior();
  for (EdgeIndex e : outgoing_[j])
    if (in_strip(e, x)) return Region::strip(e);
  for (EdgeIndex e : outgoing_[j])
    if (in_projected(e, x, z_full)) return Region::projected(e);
  return Region::outside();
}

Vec RelaxedGeometry::reset(EdgeIndex e, const Vec& x, const Vec& z_full) const {
  return edges_[e].tilde_reset(x, aux_slice(e, z_full));
}

}  // namespace hyrelax

#pragma once

#include "hyrelax/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace hyrelax {

double guard_value(const Edge& e, const Vec& x);
double relaxed_guard_value(const Edge& e, double eps, const Vec& x);
/// P_e(x) = x - ghat * g_e(x)
Vec project_to_guard_plane(const Edge& e, const Vec& x);

/// Change-of-basis data for one edge at a fixed relaxation width.
struct EdgeGeometry {
  EdgeIndex edge = 0;
  EdgeKind kind = EdgeKind::Reversible;
  double eps = 0.0;

  Vec guard_normal;
  double guard_offset = 0.0;
  /// Normal and offset of the receiving plane in the target mode:
  /// ghat_{e'}, c_{e'} for reversible edges, hhat_e, d_e otherwise.
  Vec receiving_normal;
  double receiving_offset = 0.0;

  Mat A_bar;
  Vec b_bar;
  Vec b_bar_eps;

  Eigen::Index rank = 0;
  Mat null_basis;    // n x p, orthonormal, spans range(A_bar)^perp
  Mat A_tilde;       // [A_bar | null_basis]
  Mat A_tilde_pinv;  // minimal-norm right inverse
  double z_bound = 0.0;

  std::size_t state_dim() const { return static_cast<std::size_t>(A_bar.rows()); }
  std::size_t aux_dim() const { return static_cast<std::size_t>(null_basis.cols()); }
  bool full_rank() const { return null_basis.cols() == 0; }

  /// A_bar x + b_bar^eps (relaxed) or A_bar x + b_bar.
  Vec bar_reset(const Vec& x, bool relaxed = true) const;
  /// R~(x, z) = bar_reset(x) + V z.
  Vec tilde_reset(const Vec& x, const Vec& z) const;
  /// Signed value of the receiving plane at y (<= 0 inside the target).
  double receiving_value(const Vec& y) const { return receiving_normal.dot(y) - receiving_offset; }
  /// Solves A_bar y = v with the cached factorization. Full-rank edges only.
  Vec solve(const Vec& v) const;
  Mat solve_matrix(const Mat& m) const;

 private:
  friend EdgeGeometry build_edge_geometry(const HybridSystem&, EdgeIndex, double);
  Eigen::PartialPivLU<Mat> lu_;
};

EdgeGeometry build_edge_geometry(const HybridSystem& sys, EdgeIndex e, double eps);

/// R^_e(x, z) = (R~_e(x, z), 0).
std::pair<Vec, Vec> augmented_reset(const EdgeGeometry& g, const Vec& x, const Vec& z);

enum class RegionKind { Interior, Strip, Projected, Sliding, Outside };

struct Region {
  RegionKind kind = RegionKind::Outside;
  EdgeIndex edge = 0;

  bool operator==(const Region&) const = default;
  static Region interior() { return {RegionKind::Interior, 0}; }
  static Region strip(EdgeIndex e) { return {RegionKind::Strip, e}; }
  static Region projected(EdgeIndex e) { return {RegionKind::Projected, e}; }
  static Region sliding(EdgeIndex e) { return {RegionKind::Sliding, e}; }
  static Region outside() { return {RegionKind::Outside, 0}; }
};

struct MembershipTolerances {
  double interior = 1e-12;
  double facet = 1e-9;
  double target = 1e-9;
};

/// The relaxed hybrid system at one width eps: per-edge geometry plus the
/// layout of the auxiliary state of each mode (z slices of its outgoing
/// rank-deficient edges, ascending edge index).
class RelaxedGeometry {
 public:
  RelaxedGeometry(const HybridSystem& sys, double eps, MembershipTolerances tol = {});

  const HybridSystem& system() const { return sys_; }
  double eps() const { return eps_; }
  const EdgeGeometry& edge(EdgeIndex e) const { return edges_.at(e); }
  const std::vector<EdgeIndex>& outgoing(ModeIndex j) const { return outgoing_.at(j); }

  /// Total auxiliary dimension of mode j and the slice offset of edge e.
  std::size_t aux_dim(ModeIndex j) const { return aux_dim_.at(j); }
  std::size_t aux_offset(EdgeIndex e) const { return aux_offset_.at(e); }
  Vec aux_slice(EdgeIndex e, const Vec& z) const;
  bool has_rank_deficient_edge() const;

  bool in_strip(EdgeIndex e, const Vec& x) const;
  bool in_projected(EdgeIndex e, const Vec& x, const Vec& z_full) const;
  /// Region of x in the extended domain of mode j. Precedence is
  /// Interior > Strip > Projected, lowest edge index first.
  Region membership(ModeIndex j, const Vec& x, const Vec& z_full = Vec()) const;

  /// Image of x (with auxiliary state) under the relaxed reset of e.
  Vec reset(EdgeIndex e, const Vec& x, const Vec& z_full) const;

 private:
  HybridSystem sys_;
  double eps_;
  MembershipTolerances tol_;
  std::vector<EdgeGeometry> edges_;
  std::vector<std::vector<EdgeIndex>> outgoing_;
  std::vector<std::size_t> aux_dim_;
  std::vector<std::size_t> aux_offset_;
};

}  // namespace hyrelax

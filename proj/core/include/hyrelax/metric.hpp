#pragma once

#include "hyrelax/geometry.hpp"
#include "hyrelax/trajectory.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace hyrelax {

struct HybridPoint {
  ModeIndex mode = 0;
  Vec x;
};

/// One-hop evaluation of the quotient distance on the relaxed space: the
/// minimum of the in-chart distance and every path crossing one relaxed
/// guard once, in either direction. Points past a relaxed guard also count
/// through their reset image. An upper bound on the multi-hop metric;
/// +inf for modes that are neither equal nor adjacent.
class QuotientMetric {
 public:
  explicit QuotientMetric(const RelaxedGeometry& geo, double tol = 1e-10);

  double distance(const HybridPoint& p, const HybridPoint& q) const;
  /// inf over w on the relaxed guard of e of |x_p - w| + |R_bar^eps(w) - x_q|.
  double hop(EdgeIndex e, const Vec& xp, const Vec& xq) const;

  const RelaxedGeometry& geometry() const { return *geo_; }

 private:
  struct Facet {
    Vec origin;  // point on the guard plane
    Mat basis;   // n x (n-1), orthonormal, spans the plane
    Mat cons_A;  // constraints in plane coordinates: cons_A xi <= cons_b
    Vec cons_b;
    Vec center;
    double radius = 0.0;
    double lo = 0.0, hi = 0.0;  // one-dimensional planes
  };
  double hop_lower_bound(EdgeIndex e, const Vec& xp, const Vec& xq) const;

  const RelaxedGeometry* geo_;
  double tol_;
  std::vector<Facet> facets_;
};

double quotient_distance(const RelaxedGeometry& geo, const HybridPoint& p, const HybridPoint& q);

enum class TimeGrid { Union, First, Second };

struct DistanceOptions {
  TimeGrid grid = TimeGrid::Union;
  double t_from = -std::numeric_limits<double>::infinity();
  double t_to = std::numeric_limits<double>::infinity();
  /// Allowed mismatch of the two horizons.
  double horizon_tol = 1e-9;
};

/// rho^eps: supremum of the quotient distance over the time grid.
double trajectory_distance(const QuotientMetric& metric, const Trajectory& a, const Trajectory& b,
                           const DistanceOptions& opt = {});

/// sup over samples with t in [t_from, t_to] of |x(t)|_inf.
double sup_norm_after(const Trajectory& traj, double t_from, double t_to = std::numeric_limits<double>::infinity());

}  // namespace hyrelax

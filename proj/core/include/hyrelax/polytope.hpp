#pragma once

#include "hyrelax/types.hpp"

#include <vector>

namespace hyrelax {

/// Convex polytope {x : normals * x <= offsets}. Rows of `normals` are unit
/// outward facet normals.
struct Polytope {
  Mat normals;
  Vec offsets;

  std::size_t dim() const { return static_cast<std::size_t>(normals.cols()); }
  std::size_t facets() const { return static_cast<std::size_t>(normals.rows()); }

  /// Largest signed constraint residual max_i (H_i x - h_i).
  double max_violation(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-12) const;

  static Polytope box(const Vec& lo, const Vec& hi);
};

/// Brute-force vertex enumeration by intersecting every n-subset of facet
/// planes. Intended for n <= 6. When `bounding` is positive an artificial box
/// |x_i| <= bounding is added so unbounded inputs still yield a finite list;
/// `touches_bound` reports whether any vertex lies on that artificial box.
struct VertexEnumeration {
  std::vector<Vec> vertices;
  bool touches_bound = false;
};

VertexEnumeration enumerate_vertices(const Polytope& p, double bounding = 0.0, double tol = 1e-9);

}  // namespace hyrelax

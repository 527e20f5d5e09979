#pragma once

#include "hyrelax/geometry.hpp"

namespace hyrelax {

enum class RegionTag { Crossing, Sliding, Escaping, Degenerate };

struct RegionClass {
  RegionTag tag = RegionTag::Degenerate;
  double a1 = 0.0;  // ghat^T f_j
  double a2 = 0.0;  // ghat^T f_e
};

/// Tag from the two normal components alone.
RegionTag classify_normals(double a1, double a2);

struct SlidingField {
  double alpha = 0.0;
  Vec field;
};

/// Unrelaxed switched-system view (eps = 0).
class FilippovSystem {
 public:
  explicit FilippovSystem(const HybridSystem& sys);

  const HybridSystem& system() const { return geo_.system(); }
  const RelaxedGeometry& geometry() const { return geo_; }

  /// f_e = A_bar^{-1} f_{j'}(R_bar x). Throws GeometryError for rank-deficient edges.
  Vec projected_field(EdgeIndex e, const Vec& x, const Vec& u) const;
  RegionClass classify_region(EdgeIndex e, const Vec& x, const Vec& u) const;
  /// Throws DomainError unless the contact is Sliding.
  SlidingField sliding_field(EdgeIndex e, const Vec& x, const Vec& u) const;
  /// f_j on D_j, f_e on D_e. Throws DomainError outside D_j and every D_e.
  Vec switched_field(ModeIndex j, const Vec& x, const Vec& u) const;

 private:
  RelaxedGeometry geo_;
};

}  // namespace hyrelax

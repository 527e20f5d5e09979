#pragma once

#include "hyrelax/geometry.hpp"

#include <string>

namespace hyrelax {

enum class TransitionKind { Sine, SmoothstepCubic };

/// Monotone C1 ramp with phi = 0 below 0, phi = 1 above 1 and
/// phi(1 - a) = 1 - phi(a).
struct TransitionFunction {
  TransitionKind kind = TransitionKind::Sine;

  double operator()(double a) const { return value(a); }
  double value(double a) const;
  double derivative(double a) const;

  static TransitionFunction parse(const std::string& name);
  std::string name() const;
};

struct RelaxationParams {
  double eps = 1e-3;
  TransitionFunction transition;
};

/// Field evaluation on the relaxed system. A state of mode j is (x, z) where
/// z has RelaxedGeometry::aux_dim(j) entries (empty when every outgoing edge
/// of j has a full-rank change of basis).
class RelaxedSystem {
 public:
  RelaxedSystem(const HybridSystem& sys, RelaxationParams params, MembershipTolerances tol = {});

  const HybridSystem& system() const { return geo_.system(); }
  const RelaxedGeometry& geometry() const { return geo_; }
  double eps() const { return params_.eps; }
  const TransitionFunction& transition() const { return params_.transition; }

  /// phi(g_e(x) / eps)
  double phi_edge(EdgeIndex e, const Vec& x) const;

  /// f_e^eps = (1 - phi) f_j + phi A_bar^{-1} f_{j'}(R_bar^eps x). Full-rank edges.
  Vec edge_field(EdgeIndex e, const Vec& x, const Vec& u) const;

  /// f_j^eps: f_j on D_j, f_e^eps on strips and projected domains.
  /// Throws DomainError outside the extended domain.
  Vec mode_field(ModeIndex j, const Vec& x, const Vec& u) const;

  /// f^_e^eps over (x, z_e), length n + p_e.
  Vec augmented_edge_field(EdgeIndex e, const Vec& x, const Vec& z, const Vec& u) const;

  /// Field over the full mode state (x, z) of length n + aux_dim(j). When
  /// `strict` is false, points outside the extended domain (integrator stage
  /// points) use the edge whose guard they are furthest past, or f_j.
  Vec state_field(ModeIndex j, const Vec& xz, const Vec& u, bool strict = true) const;
  /// Analytic Jacobian of state_field with respect to (x, z); central
  /// finite differences for fields without an analytic Jacobian.
  Mat state_jacobian(ModeIndex j, const Vec& xz, const Vec& u, bool strict = true) const;

  /// Region used by state_field at (x, z).
  Region field_region(ModeIndex j, const Vec& x, const Vec& z, bool strict) const;

 private:
  Mat source_jacobian(ModeIndex j, const Vec& x, const Vec& u) const;

  RelaxationParams params_;
  RelaxedGeometry geo_;
};

}  // namespace hyrelax

#pragma once

#include "hyrelax/polytope.hpp"
#include "hyrelax/types.hpp"
#include "hyrelax/vector_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hyrelax {

struct Mode {
  int id = 0;
  Polytope domain;
  VectorField field;
};

/// Transition e = (source, target) with guard {x : ghat^T x = c} on a facet
/// of the source domain (ghat points out of it) and affine reset A x + b.
/// Reversible edges name a partner; non-reversible edges carry the target
/// facet plane {hhat^T x = d} that receives R_e(G_e).
struct Edge {
  int id = 0;
  ModeIndex source = 0;
  ModeIndex target = 0;
  Vec guard_normal;
  double guard_offset = 0.0;
  Mat reset_A;
  Vec reset_b;
  std::optional<EdgeIndex> partner;
  std::optional<Vec> target_facet_normal;
  std::optional<double> target_facet_offset;

  double guard(const Vec& x) const { return guard_normal.dot(x) - guard_offset; }
  Vec reset(const Vec& x) const { return reset_A * x + reset_b; }
};

struct InputBox {
  Vec lo;
  Vec hi;
  bool contains(const Vec& u, double tol = 0.0) const;
};

/// Piecewise-constant input u(t) = values[i] on [breakpoints[i], breakpoints[i+1]).
/// Right-continuous; the last value holds past the final breakpoint.
class InputSignal {
 public:
  InputSignal() = default;
  InputSignal(std::vector<double> breakpoints, std::vector<Vec> values);

  static InputSignal constant(const Vec& u);
  static InputSignal none() { return constant(Vec()); }

  Vec at(double t) const;
  std::size_t dim() const { return values_.empty() ? 0 : static_cast<std::size_t>(values_.front().size()); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Vec>& values() const { return values_; }
  /// First breakpoint strictly after t, or +inf.
  double next_breakpoint(double t) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Vec> values_;
};

enum class EdgeKind { Reversible, NonReversible };

class HybridSystem {
 public:
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::vector<Mode> modes;
  std::vector<Edge> edges;
  InputBox input_box;

  const Mode& mode(ModeIndex j) const { return modes.at(j); }
  const Edge& edge(EdgeIndex e) const { return edges.at(e); }
  /// Outgoing edges of mode j, ascending edge index.
  std::vector<EdgeIndex> outgoing(ModeIndex j) const;
  std::optional<ModeIndex> mode_by_id(int id) const;
  std::optional<EdgeIndex> edge_by_id(int id) const;
};

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& code) const;
};

ValidationReport validate_system(const HybridSystem& sys);

/// Reversible iff a partner is set and R_{e'}(R_e(x)) = x on sampled guard
/// points. Throws GeometryError when a partner is set but the round trip fails.
EdgeKind classify_edge(const HybridSystem& sys, EdgeIndex e);

Vec eval_field(const HybridSystem& sys, ModeIndex j, const Vec& x, const Vec& u);

/// Vertices of the guard facet G_e = D_source ∩ {g_e = 0}.
std::vector<Vec> guard_facet_vertices(const HybridSystem& sys, EdgeIndex e);

}  // namespace hyrelax

#include "hyrelax/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hyrelax {

bool InputBox::contains(const Vec& u, double tol) const {
  if (u.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] < lo[i] - tol || u[i] > hi[i] + tol) return false;
  }
  return true;
}

InputSignal::InputSignal(std::vector<double> breakpoints, std::vector<Vec> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size())
    throw ConfigError("input signal needs one value per breakpoint");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw ConfigError("input breakpoints must be strictly increasing");
  }
  for (const auto& v : values_) {
    if (v.size() != values_.front().size()) throw ConfigError("input values have inconsistent dimension");
  }
}

InputSignal InputSignal::constant(const Vec& u) { return InputSignal({0.0}, {u}); }

Vec InputSignal::at(double t) const {
  if (values_.empty()) return Vec();
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.begin()) return values_.front();
  return values_[static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1];
}

double InputSignal::next_breakpoint(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return it == breakpoints_.end() ? std::numeric_limits<double>::infinity() : *it;
}

std::vector<EdgeIndex> HybridSystem::outgoing(ModeIndex j) const {
  std::vector<EdgeIndex> out;
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    if (edges[e].source == j) out.push_back(e);
  }
  return out;
}

std::optional<ModeIndex> HybridSystem::mode_by_id(int id) const {
  for (ModeIndex j = 0; j < modes.size(); ++j) {
    if (modes[j].id == id) return j;
  }
  return std::nullopt;
}

std::optional<EdgeIndex> HybridSystem::edge_by_id(int id) const {
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    if (edges[e].id == id) return e;
  }
  return std::nullopt;
}

bool ValidationReport::has(const std::string& code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

Vec eval_field(const HybridSystem& sys, ModeIndex j, const Vec& x, const Vec& u) {
  if (j >= sys.modes.size()) throw DomainError("mode index out of range");
  return sys.modes[j].field.eval(x, u);
}

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kRoundTripTol = 1e-10;
constexpr double kBoundingBox = 1e6;

bool on_plane(const Vec& normal, double offset, const Vec& v) {
  return std::abs(normal.dot(v) - offset) <= 1e-9 * (1.0 + std::abs(offset) + v.lpNorm<Eigen::Infinity>());
}

std::vector<Vec> facet_vertices(const std::vector<Vec>& verts, const Vec& normal, double offset) {
  std::vector<Vec> out;
  for (const auto& v : verts) {
    if (on_plane(normal, offset, v)) out.push_back(v);
  }
  return out;
}

Vec centroid(const std::vector<Vec>& pts) {
  Vec c = Vec::Zero(pts.front().size());
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

std::vector<Vec> guard_samples(const std::vector<Vec>& facet) {
  std::vector<Vec> samples = facet;
  if (!facet.empty()) {
    const Vec c = centroid(facet);
    samples.push_back(c);
    for (const auto& v : facet) samples.push_back(0.5 * (v + c));
  }
  return samples;
}

bool round_trip_holds(const HybridSystem& sys, EdgeIndex e, const std::vector<Vec>& facet) {
  const Edge& edge = sys.edges[e];
  const Edge& partner = sys.edges[*edge.partner];
  for (const auto& x : guard_samples(facet)) {
    const Vec back = partner.reset(edge.reset(x));
    if ((back - x).norm() > kRoundTripTol * (1.0 + x.norm())) return false;
  }
  return true;
}

struct Reporter {
  ValidationReport report;
  void add(std::string code, const std::string& where, const std::string& what) {
    report.violations.push_back({std::move(code), where + ": " + what});
  }
};

std::string mode_label(const HybridSystem& sys, ModeIndex j) { return "mode " + std::to_string(sys.modes[j].id); }
std::string edge_label(const HybridSystem& sys, EdgeIndex e) { return "edge " + std::to_string(sys.edges[e].id); }

}  // namespace

std::vector<Vec> guard_facet_vertices(const HybridSystem& sys, EdgeIndex e) {
  const Edge& edge = sys.edge(e);
  const auto verts = enumerate_vertices(sys.mode(edge.source).domain).vertices;
  return facet_vertices(verts, edge.guard_normal, edge.guard_offset);
}

ValidationReport validate_system(const HybridSystem& sys) {
  Reporter r;
  const auto n = static_cast<Eigen::Index>(sys.state_dim);
  const auto m = static_cast<Eigen::Index>(sys.input_dim);

  if (sys.state_dim == 0) r.add("bad_dimension", "system", "state dimension must be positive");
  if (sys.modes.empty()) r.add("empty_modes", "system", "mode set is empty");
  if (sys.input_box.lo.size() != m || sys.input_box.hi.size() != m) {
    r.add("input_box", "system", "input box dimension differs from input_dim");
  } else if ((sys.input_box.lo.array() > sys.input_box.hi.array()).any()) {
    r.add("input_box", "system", "input box has lo > hi");
  }
  if (!r.report.ok()) return r.report;

  // Unique labels.
  for (std::size_t a = 0; a < sys.modes.size(); ++a)
    for (std::size_t b = a + 1; b < sys.modes.size(); ++b)
      if (sys.modes[a].id == sys.modes[b].id) r.add("duplicate_id", mode_label(sys, a), "mode id repeated");
  for (std::size_t a = 0; a < sys.edges.size(); ++a)
    for (std::size_t b = a + 1; b < sys.edges.size(); ++b)
      if (sys.edges[a].id == sys.edges[b].id) r.add("duplicate_id", edge_label(sys, a), "edge id repeated");

  std::vector<std::vector<Vec>> vertices(sys.modes.size());
  std::vector<bool> domain_ok(sys.modes.size(), false);
  for (ModeIndex j = 0; j < sys.modes.size(); ++j) {
    const Mode& mode = sys.modes[j];
    const auto where = mode_label(sys, j);
    if (mode.domain.normals.cols() != n || mode.domain.normals.rows() != mode.domain.offsets.size() ||
        mode.domain.normals.rows() == 0) {
      r.add("halfspace_dim", where, "half-space system has inconsistent dimensions");
      continue;
    }
    bool units = true;
    for (Eigen::Index i = 0; i < mode.domain.normals.rows(); ++i) {
      if (std::abs(mode.domain.normals.row(i).norm() - 1.0) > kUnitTol) {
        r.add("halfspace_unit_normal", where, "row " + std::to_string(i) + " normal is not unit length");
        units = false;
      }
    }
    const auto en = enumerate_vertices(mode.domain, kBoundingBox);
    if (en.vertices.empty()) {
      r.add("polytope_empty", where, "domain polytope is empty");
    } else if (en.touches_bound) {
      r.add("polytope_unbounded", where, "domain polytope is unbounded");
    } else if (units) {
      vertices[j] = en.vertices;
      domain_ok[j] = true;
    }
    if (const auto* a = mode.field.affine()) {
      if (a->F.rows() != n || a->F.cols() != n || a->w.size() != n ||
          (a->G.size() > 0 && (a->G.rows() != n || a->G.cols() != m)) || (a->G.size() == 0 && m > 0))
        r.add("field_dim", where, "affine field matrices do not match state/input dimensions");
    } else if (mode.field.double_pendulum() && n != 4) {
      r.add("field_dim", where, "double_pendulum field requires state_dim = 4");
    }
  }

  for (EdgeIndex e = 0; e < sys.edges.size(); ++e) {
    const Edge& edge = sys.edges[e];
    const auto where = edge_label(sys, e);
    if (edge.source >= sys.modes.size() || edge.target >= sys.modes.size()) {
      r.add("edge_mode_ref", where, "source or target mode does not exist");
      continue;
    }
    if (edge.guard_normal.size() != n || edge.reset_A.rows() != n || edge.reset_A.cols() != n ||
        edge.reset_b.size() != n) {
      r.add("reset_dim", where, "guard or reset dimensions do not match state_dim");
      continue;
    }
    if (std::abs(edge.guard_normal.norm() - 1.0) > kUnitTol)
      r.add("guard_unit_normal", where, "guard normal is not unit length");
    if (!domain_ok[edge.source] || !domain_ok[edge.target]) continue;

    const auto& src_verts = vertices[edge.source];
    for (const auto& v : src_verts) {
      if (edge.guard(v) > kUnitTol * (1.0 + std::abs(edge.guard_offset))) {
        r.add("guard_outward", where,
              "guard normal points into the source domain (g_e > 0 at vertex " + format_vec(v) + ")");
        break;
      }
    }
    const auto& H = sys.modes[edge.source].domain;
    bool is_facet_plane = false;
    for (Eigen::Index i = 0; i < H.normals.rows(); ++i) {
      if ((H.normals.row(i).transpose() - edge.guard_normal).lpNorm<Eigen::Infinity>() <= 1e-9 &&
          std::abs(H.offsets[i] - edge.guard_offset) <= 1e-9 * (1.0 + std::abs(edge.guard_offset)))
        is_facet_plane = true;
    }
    const auto facet = facet_vertices(src_verts, edge.guard_normal, edge.guard_offset);
    if (!is_facet_plane || facet.size() < static_cast<std::size_t>(n)) {
      r.add("guard_not_facet", where, "guard plane is not a facet hyperplane of the source domain");
      continue;
    }

    if (edge.partner) {
      if (*edge.partner >= sys.edges.size()) {
        r.add("edge_partner_ref", where, "partner edge does not exist");
        continue;
      }
      const Edge& partner = sys.edges[*edge.partner];
      if (partner.source != edge.target || partner.target != edge.source)
        r.add("partner_inconsistent", where, "partner does not run target -> source");
      Eigen::FullPivLU<Mat> lu(edge.reset_A);
      if (!lu.isInvertible()) r.add("reset_singular", where, "reset matrix of a reversible edge is singular");
      if (partner.reset_A.rows() == n && partner.reset_A.cols() == n && partner.reset_b.size() == n &&
          !round_trip_holds(sys, e, facet))
        r.add("round_trip", where, "R_partner(R_e(x)) != x on the guard");
      if (partner.guard_normal.size() == n) {
        for (const auto& v : guard_samples(facet)) {
          const Vec y = edge.reset(v);
          if (std::abs(partner.guard(y)) > kRoundTripTol * (1.0 + y.norm()) ||
              !sys.modes[edge.target].domain.contains(y, 1e-9)) {
            r.add("reset_image", where, "reset does not map the guard onto the partner guard");
            break;
          }
        }
      }
    } else {
      if (!edge.target_facet_normal || !edge.target_facet_offset) {
        r.add("target_facet_missing", where, "non-reversible edge needs a target facet plane");
        continue;
      }
      const Vec& hn = *edge.target_facet_normal;
      const double d = *edge.target_facet_offset;
      if (hn.size() != n) {
        r.add("reset_dim", where, "target facet normal has wrong dimension");
        continue;
      }
      if (std::abs(hn.norm() - 1.0) > kUnitTol) r.add("target_facet_unit_normal", where, "target facet normal is not unit length");
      for (const auto& v : vertices[edge.target]) {
        if (hn.dot(v) - d > kUnitTol * (1.0 + std::abs(d))) {
          r.add("target_facet_outward", where, "target facet normal points into the target domain");
          break;
        }
      }
      for (const auto& v : guard_samples(facet)) {
        const Vec y = edge.reset(v);
        if (std::abs(hn.dot(y) - d) > kRoundTripTol * (1.0 + y.norm())) {
          r.add("target_facet_image", where, "reset image of the guard is not on the target facet");
          break;
        }
      }
    }
  }

  // Guards of distinct edges must be disjoint. Guards out of different modes
  // live in different components of the disjoint union.
  for (EdgeIndex a = 0; a < sys.edges.size(); ++a) {
    for (EdgeIndex b = a + 1; b < sys.edges.size(); ++b) {
      const Edge& ea = sys.edges[a];
      const Edge& eb = sys.edges[b];
      if (ea.source != eb.source || ea.guard_normal.size() != n || eb.guard_normal.size() != n) continue;
      const bool same_plane = (ea.guard_normal - eb.guard_normal).lpNorm<Eigen::Infinity>() <= 1e-9 &&
                              std::abs(ea.guard_offset - eb.guard_offset) <= 1e-9 * (1.0 + std::abs(ea.guard_offset));
      if (same_plane)
        r.add("guard_overlap", edge_label(sys, a), "guard overlaps the guard of " + edge_label(sys, b));
    }
  }
  return r.report;
}

EdgeKind classify_edge(const HybridSystem& sys, EdgeIndex e) {
  const Edge& edge = sys.edge(e);
  if (!edge.partner) return EdgeKind::NonReversible;
  if (*edge.partner >= sys.edges.size()) throw GeometryError("partner edge index out of range");
  const auto facet = guard_facet_vertices(sys, e);
  if (facet.empty()) throw GeometryError("edge " + std::to_string(edge.id) + " has an empty guard facet");
  Eigen::FullPivLU<Mat> lu(edge.reset_A);
  if (!lu.isInvertible() || !round_trip_holds(sys, e, facet))
    throw GeometryError("edge " + std::to_string(edge.id) +
                        " names a partner but the reset round trip is not the identity on the guard");
  return EdgeKind::Reversible;
}

}  // namespace hyrelax

#include "hyrelax/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace hyrelax {

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::HorizonReached: return "horizon_reached";
    case Termination::LeftDomain: return "left_domain";
    case Termination::ZBoundExceeded: return "z_bound_exceeded";
  }
  return "unknown";
}

std::string region_name(const Region& r, const HybridSystem& sys) {
  switch (r.kind) {
    case RegionKind::Interior: return "interior";
    case RegionKind::Strip: return "strip:" + std::to_string(sys.edge(r.edge).id);
    case RegionKind::Projected: return "projected:" + std::to_string(sys.edge(r.edge).id);
    case RegionKind::Sliding: return "sliding:" + std::to_string(sys.edge(r.edge).id);
    case RegionKind::Outside: return "outside";
  }
  return "unknown";
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const Event* Trajectory::event_at_sample(std::size_t i) const {
  const auto it = std::lower_bound(events.begin(), events.end(), i,
                                   [](const Event& ev, std::size_t s) { return ev.sample < s; });
  if (it != events.end() && it->sample == i) return &*it;
  return nullptr;
}

TrajectoryPoint Trajectory::at(double t) const {
  if (samples.empty()) throw DomainError("empty trajectory");
  auto it = std::upper_bound(samples.begin(), samples.end(), t, [](double v, const Sample& s) { return v < s.t; });
  if (it == samples.begin()) {
    const Sample& s = samples.front();
    return {s.mode, s.x, s.z, s.region};
  }
  const auto k = static_cast<std::size_t>(std::distance(samples.begin(), it)) - 1;
  const Sample& a = samples[k];
  if (t == a.t || k + 1 == samples.size()) return {a.mode, a.x, a.z, a.region};
  const Sample& b = samples[k + 1];
  Vec bx = b.x;
  Vec bz = b.z;
  if (const Event* ev = event_at_sample(k + 1)) {
    bx = ev->pre_x;
    bz = ev->pre_z;
  } else if (b.mode != a.mode) {
    return {a.mode, a.x, a.z, a.region};
  }
  const double s = (t - a.t) / (b.t - a.t);
  TrajectoryPoint p{a.mode, (1.0 - s) * a.x + s * bx, a.z, a.region};
  if (a.z.size() == bz.size() && a.z.size() > 0) p.z = (1.0 - s) * a.z + s * bz;
  return p;
}

std::vector<Interval> Trajectory::strip_intervals(std::optional<EdgeIndex> e) const {
  std::vector<Interval> out;
  bool open = false;
  Interval cur;
  for (const auto& s : samples) {
    const bool in = s.region.kind == RegionKind::Strip && (!e || s.region.edge == *e);
    if (in) {
      if (!open) {
        cur.begin = s.t;
        open = true;
      }
      cur.end = s.t;
    } else if (open) {
      out.push_back(cur);
      open = false;
    }
  }
  if (open) out.push_back(cur);
  return out;
}

void Trajectory::write_csv(std::ostream& os, const HybridSystem& sys) const {
  const auto n = sys.state_dim;
  std::size_t p = 0;
  for (const auto& s : samples) p = std::max(p, static_cast<std::size_t>(s.z.size()));
  os << "t,mode,region";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < p; ++i) os << ",z" << i;
  os << ",event_edge\n";
  auto row = [&](double t, ModeIndex mode, const Region& region, const Vec& x, const Vec& z, const Event* ev) {
    os << format_double(t) << ',' << sys.mode(mode).id << ',' << region_name(region, sys);
    for (Eigen::Index i = 0; i < x.size(); ++i) os << ',' << format_double(x[i]);
    for (std::size_t i = 0; i < p; ++i) {
      os << ',';
      if (static_cast<Eigen::Index>(i) < z.size()) os << format_double(z[static_cast<Eigen::Index>(i)]);
    }
    os << ',';
    if (ev) os << sys.edge(ev->edge).id;
    os << '\n';
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const Event* ev = event_at_sample(i);
    if (ev) row(ev->t, ev->from, ev->pre_region, ev->pre_x, ev->pre_z, ev);
    row(s.t, s.mode, s.region, s.x, s.z, ev);
  }
}

}  // namespace hyrelax

#pragma once

#include "hyrelax/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hyrelax {

struct Sample {
  double t = 0.0;
  ModeIndex mode = 0;
  Vec x;
  Region region;
  Vec z;
};

/// Discrete transition. `sample` is the index of the post-event sample.
struct Event {
  double t = 0.0;
  EdgeIndex edge = 0;
  ModeIndex from = 0;
  ModeIndex to = 0;
  Vec pre_x;
  Vec pre_z;
  Region pre_region;
  Vec post_x;
  Vec post_z;
  std::size_t sample = 0;
};

enum class Termination { HorizonReached, LeftDomain, ZBoundExceeded };

std::string termination_name(Termination t);
std::string region_name(const Region& r, const HybridSystem& sys);

struct TrajectoryPoint {
  ModeIndex mode = 0;
  Vec x;
  Vec z;
  Region region;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
  double duration() const { return end - begin; }
};

class Trajectory {
 public:
  std::vector<Sample> samples;
  std::vector<Event> events;
  Termination termination = Termination::HorizonReached;
  double termination_time = 0.0;

  bool empty() const { return samples.empty(); }
  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }

  /// State at time t by linear interpolation between samples; across an event
  /// the segment ends at the pre-event state.
  TrajectoryPoint at(double t) const;

  /// Maximal runs of consecutive strip samples (of edge e when given).
  std::vector<Interval> strip_intervals(std::optional<EdgeIndex> e = std::nullopt) const;

  /// `t,mode,region,x0..,z0..,event_edge`; each event emits its pre-state row
  /// immediately before the post-state row.
  void write_csv(std::ostream& os, const HybridSystem& sys) const;

  /// Sample `i` is the post state of an event; returns that event.
  const Event* event_at_sample(std::size_t i) const;
};

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace hyrelax

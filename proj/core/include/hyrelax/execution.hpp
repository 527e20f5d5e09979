#pragma once

#include "hyrelax/filippov.hpp"
#include "hyrelax/integrator.hpp"
#include "hyrelax/relaxation.hpp"
#include "hyrelax/trajectory.hpp"

#include <limits>

namespace hyrelax {

struct DiscreteOptions {
  /// Record every k-th step (events and the final state are always kept).
  std::size_t sample_stride = 1;
  /// When false the run stays in the initial chart: projected-domain samples
  /// are kept instead of being reset (single extended domain).
  bool apply_resets = true;
};

/// Fixed-step discrete approximation with step-over of the relaxed strips.
/// Requires every edge to have a full-rank change of basis.
Trajectory simulate_discrete(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Vec& x0, ModeIndex j0,
                             const InputSignal& u, double T, const DiscreteOptions& opt = {});

/// Fixed-step execution over the augmented state (x, z); z starts at zero and
/// is zeroed at every transition.
Trajectory simulate_augmented(const RelaxedSystem& rs, const IntegratorScheme& scheme, const Vec& x0, ModeIndex j0,
                              const InputSignal& u, double T, const DiscreteOptions& opt = {});

struct ReferenceOptions {
  double tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t event_budget = 1000000;
  bool apply_resets = true;
};

/// Adaptive Dormand-Prince integration of the relaxed field with bisection
/// localization of relaxed-guard crossings. Handles augmented states.
Trajectory simulate_relaxed_reference(const RelaxedSystem& rs, const Vec& x0, ModeIndex j0, const InputSignal& u,
                                      double T, const ReferenceOptions& opt = {});

struct FilippovOptions {
  double tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t event_budget = 1000000;
  /// Consecutive events advancing time by less than 1e-12 before the run is
  /// declared Zeno.
  std::size_t zeno_limit = 100;
};

/// Event-driven execution of the switched field: crossings apply the
/// unrelaxed reset, sliding contacts follow the Filippov field along the
/// guard. Throws FilippovUndefined on escaping, tangential or Zeno contact.
Trajectory simulate_filippov(const FilippovSystem& fs, const Vec& x0, ModeIndex j0, const InputSignal& u, double T,
                             const FilippovOptions& opt = {});

}  // namespace hyrelax

#pragma once

#include "hyrelax/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hyrelax {

/// Ball height x1 >= 0 and velocity x2 on [0, x1_max] x [-v_max, v_max];
/// impact at x1 = 0 resets x2 -> -c x2.
struct BouncingBallParams {
  double g = 1.0;
  double c = 0.5;
  double x1_max = 2.0;
  double v_max = 3.0;
};

HybridSystem bouncing_ball(const BouncingBallParams& p = {});

/// Double pendulum with a mechanical stop at knee angle theta2 = 0 (theta2 >= 0
/// inside the domain). The impact resets (dtheta1, dtheta2) to
/// (dtheta1 + k (1 + c) dtheta2, -c dtheta2).
struct DoublePendulumSystemParams {
  DoublePendulumParams dynamics;
  double c = 0.0;
  /// Defaults to M12 / M11 at theta2 = 0 (momentum-consistent plastic impact).
  std::optional<double> k;
  double theta1_max = 3.14159265358979323846;
  double theta2_max = 3.14159265358979323846;
  double omega_max = 20.0;
};

double default_stop_gain(const DoublePendulumParams& p);

HybridSystem double_pendulum(const DoublePendulumSystemParams& p = {});

/// Built-in systems by name: "bouncing-ball" (g, c, x1_max, v_max) and
/// "double-pendulum" (m1, m2, L1, L2, g, k, c).
HybridSystem registry_system(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> registry_names();

}  // namespace hyrelax

namespace hyrelax {

/// Accumulation time of the bounces from (height, velocity) = x0.
double bouncing_ball_zeno_time(const BouncingBallParams& p, const Vec& x0);

}  // namespace hyrelax

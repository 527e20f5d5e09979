#include "hyrelax/registry.hpp"
#include "hyrelax/hyrelax.hpp"

#include <cmath>
#include <limits>

namespace hyrelax {

namespace {

void check_restitution(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("restitution coefficient c must lie in [0, 1]");
}

}  // namespace

HybridSystem bouncing_ball(const BouncingBallParams& p) {
  check_restitution(p.c);
  if (!(p.g > 0.0 && p.x1_max > 0.0 && p.v_max > 0.0)) throw ConfigError("bouncing-ball: g, x1_max, v_max must be positive");
  HybridSystem sys;
  sys.state_dim = 2;
  sys.input_dim = 0;
  sys.input_box = {Vec(), Vec()};

  Vec lo(2), hi(2);
  lo << 0.0, -p.v_max;
  hi << p.x1_max, p.v_max;
  AffineField f;
  f.F = Mat::Zero(2, 2);
  f.F(0, 1) = 1.0;
  f.G = Mat::Zero(2, 0);
  f.w = Vec::Zero(2);
  f.w[1] = -p.g;
  sys.modes.push_back({0, Polytope::box(lo, hi), VectorField(f)});

  Edge e;
  e.id = 0;
  e.guard_normal = Vec::Zero(2);
  e.guard_normal[0] = -1.0;
  e.guard_offset = 0.0;
  e.reset_A = Mat::Identity(2, 2);
  e.reset_A(1, 1) = -p.c;
  e.reset_b = Vec::Zero(2);
  e.target_facet_normal = e.guard_normal;
  e.target_facet_offset = 0.0;
  sys.edges.push_back(e);
  return sys;
}

double default_stop_gain(const DoublePendulumParams& p) {
  const Eigen::Matrix2d M = DoublePendulumField{p}.mass_matrix(0.0);
  return M(0, 1) / M(0, 0);
}

HybridSystem double_pendulum(const DoublePendulumSystemParams& p) {
  check_restitution(p.c);
  const double k = p.k.value_or(default_stop_gain(p.dynamics));
  HybridSystem sys;
  sys.state_dim = 4;
  sys.input_dim = 0;
  sys.input_box = {Vec(), Vec()};

  Vec lo(4), hi(4);
  lo << -p.theta1_max, -p.omega_max, 0.0, -p.omega_max;
  hi << p.theta1_max, p.omega_max, p.theta2_max, p.omega_max;
  sys.modes.push_back({0, Polytope::box(lo, hi), VectorField(DoublePendulumField{p.dynamics})});

  Edge e;
  e.id = 0;
  e.guard_normal = Vec::Zero(4);
  e.guard_normal[2] = -1.0;
  e.guard_offset = 0.0;
  e.reset_A = Mat::Identity(4, 4);
  e.reset_A(1, 3) = k * (1.0 + p.c);
  e.reset_A(3, 3) = -p.c;
  e.reset_b = Vec::Zero(4);
  e.target_facet_normal = e.guard_normal;
  e.target_facet_offset = 0.0;
  sys.edges.push_back(e);
  return sys;
}

HybridSystem registry_system(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "bouncing-ball") {
    BouncingBallParams p;
    for (const auto& [key, v] : params) {
      if (key == "g") p.g = v;
      else if (key == "c") p.c = v;
      else if (key == "x1_max") p.x1_max = v;
      else if (key == "v_max") p.v_max = v;
      else throw ConfigError("bouncing-ball: unknown parameter '" + key + "'");
    }
    return bouncing_ball(p);
  }
  if (name == "double-pendulum") {
    DoublePendulumSystemParams p;
    for (const auto& [key, v] : params) {
      if (key == "m1") p.dynamics.m1 = v;
      else if (key == "m2") p.dynamics.m2 = v;
      else if (key == "L1") p.dynamics.L1 = v;
      else if (key == "L2") p.dynamics.L2 = v;
      else if (key == "g") p.dynamics.g = v;
      else if (key == "k") p.k = v;
      else if (key == "c") p.c = v;
      else throw ConfigError("double-pendulum: unknown parameter '" + key + "'");
    }
    const auto& d = p.dynamics;
    if (!(d.m1 > 0 && d.m2 > 0 && d.L1 > 0 && d.L2 > 0 && d.g >= 0))
      throw ConfigError("double-pendulum: masses and lengths must be positive, g nonnegative");
    return double_pendulum(p);
  }
  throw ConfigError("unknown example system '" + name + "'");
}

std::vector<std::string> registry_names() { return {"bouncing-ball", "double-pendulum"}; }

}  // namespace hyrelax

namespace hyrelax {

const char* version() { return HYRELAX_VERSION; }

}  // namespace hyrelax

namespace hyrelax {

double bouncing_ball_zeno_time(const BouncingBallParams& p, const Vec& x0) {
  if (x0.size() != 2) throw ConfigError("bouncing ball state has two coordinates");
  if (!(p.c < 1.0)) return std::numeric_limits<double>::infinity();
  const double vi = std::sqrt(x0[1] * x0[1] + 2.0 * p.g * x0[0]);
  const double t0 = (x0[1] + vi) / p.g;
  return t0 + 2.0 * p.c * vi / (p.g * (1.0 - p.c));
}

}  // namespace hyrelax

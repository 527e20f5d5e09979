#include "hyrelax/relaxation.hpp"

#include <cmath>
#include <numbers>

namespace hyrelax {

double TransitionFunction::value(double a) const {
  if (a <= 0.0) return 0.0;
  if (a >= 1.0) return 1.0;
  switch (kind) {
    case TransitionKind::Sine:
      return 0.5 - 0.5 * std::cos(std::numbers::pi * a);
    case TransitionKind::SmoothstepCubic:
      return a * a * (3.0 - 2.0 * a);
  }
  return 0.0;
}

double TransitionFunction::derivative(double a) const {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  switch (kind) {
    case TransitionKind::Sine:
      return 0.5 * std::numbers::pi * std::sin(std::numbers::pi * a);
    case TransitionKind::SmoothstepCubic:
      return 6.0 * a * (1.0 - a);
  }
  return 0.0;
}

TransitionFunction TransitionFunction::parse(const std::string& name) {
  if (name == "sine") return {TransitionKind::Sine};
  if (name == "smoothstep") return {TransitionKind::SmoothstepCubic};
  throw ConfigError("unknown transition function '" + name + "' (expected sine or smoothstep)");
}

std::string TransitionFunction::name() const {
  return kind == TransitionKind::Sine ? "sine" : "smoothstep";
}

}  // namespace hyrelax

#pragma once

#include "hyrelax/types.hpp"

#include <functional>
#include <string>

namespace hyrelax {

using StateField = std::function<Vec(const Vec&)>;
using StateJacobian = std::function<Mat(const Vec&)>;

enum class SchemeKind { Euler, RK4 };

struct IntegratorScheme {
  SchemeKind kind = SchemeKind::RK4;
  double h = 1e-3;

  int order() const { return kind == SchemeKind::Euler ? 1 : 4; }
  std::string name() const { return kind == SchemeKind::Euler ? "euler" : "rk4"; }
  static SchemeKind parse(const std::string& name);
};

/// One fixed step of x' = f(x). Throws NumericError on non-finite values.
Vec integrator_step(SchemeKind kind, const StateField& f, const Vec& x, double h);

/// Jacobian of the one-step map of `kind` at x.
Mat integrator_step_jacobian(SchemeKind kind, const StateField& f, const StateJacobian& df, const Vec& x, double h);

/// Dormand-Prince 5(4) step: fifth-order solution and embedded error estimate.
struct Dopri5Step {
  Vec y;
  Vec error;
};

Dopri5Step dopri5_step(const StateField& f, const Vec& x, double h);

/// Scaled RMS error norm with atol = rtol = tol.
double dopri5_error_norm(const Vec& x, const Vec& y, const Vec& err, double tol);

}  // namespace hyrelax

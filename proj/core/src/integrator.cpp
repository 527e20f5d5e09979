#include "hyrelax/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace hyrelax {

namespace {

Vec checked(const Vec& v, const Vec& at) {
  if (!v.allFinite()) throw NumericError("non-finite field value at " + format_vec(at));
  return v;
}

}  // namespace

SchemeKind IntegratorScheme::parse(const std::string& name) {
  if (name == "euler") return SchemeKind::Euler;
  if (name == "rk4") return SchemeKind::RK4;
  throw ConfigError("unknown integrator scheme '" + name + "' (expected euler or rk4)");
}

Vec integrator_step(SchemeKind kind, const StateField& f, const Vec& x, double h) {
  const Vec k1 = checked(f(x), x);
  if (kind == SchemeKind::Euler) return x + h * k1;
  const Vec x2 = x + 0.5 * h * k1;
  const Vec k2 = checked(f(x2), x2);
  const Vec x3 = x + 0.5 * h * k2;
  const Vec k3 = checked(f(x3), x3);
  const Vec x4 = x + h * k3;
  const Vec k4 = checked(f(x4), x4);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Mat integrator_step_jacobian(SchemeKind kind, const StateField& f, const StateJacobian& df, const Vec& x, double h) {
  const auto n = x.size();
  const Mat I = Mat::Identity(n, n);
  const Mat J1 = df(x);
  if (kind == SchemeKind::Euler) return I + h * J1;
  const Vec k1 = f(x);
  const Vec x2 = x + 0.5 * h * k1;
  const Vec k2 = f(x2);
  const Vec x3 = x + 0.5 * h * k2;
  const Vec k3 = f(x3);
  const Vec x4 = x + h * k3;
  // dk_i/dx by the chain rule through the stage points
  const Mat D1 = J1;
  const Mat D2 = df(x2) * (I + 0.5 * h * D1);
  const Mat D3 = df(x3) * (I + 0.5 * h * D2);
  const Mat D4 = df(x4) * (I + h * D3);
  return I + (h / 6.0) * (D1 + 2.0 * D2 + 2.0 * D3 + D4);
}

Dopri5Step dopri5_step(const StateField& f, const Vec& x, double h) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                   b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                   e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const Vec k1 = checked(f(x), x);
  const Vec k2 = checked(f(x + h * a21 * k1), x);
  const Vec k3 = checked(f(x + h * (a31 * k1 + a32 * k2)), x);
  const Vec k4 = checked(f(x + h * (a41 * k1 + a42 * k2 + a43 * k3)), x);
  const Vec k5 = checked(f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)), x);
  const Vec k6 = checked(f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), x);
  Dopri5Step s;
  s.y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vec k7 = checked(f(s.y), s.y);
  s.error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return s;
}

double dopri5_error_norm(const Vec& x, const Vec& y, const Vec& err, double tol) {
  if (err.size() == 0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = tol + tol * std::max(std::abs(x[i]), std::abs(y[i]));
    acc += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

}  // namespace hyrelax

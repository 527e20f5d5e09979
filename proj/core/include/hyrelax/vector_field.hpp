#pragma once

#include "hyrelax/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace hyrelax {

/// f(x, u) = F x + G u + w
struct AffineField {
  Mat F;
  Mat G;
  Vec w;
};

/// Two-link planar pendulum with point masses at the link tips. State order
/// (theta1, dtheta1, theta2, dtheta2); theta1 is measured from the downward
/// vertical, theta2 is the relative (knee) angle of link 2 against link 1.
struct DoublePendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double L1 = 1.0;
  double L2 = 1.0;
  double g = 1.0;
};

struct DoublePendulumField {
  DoublePendulumParams params;

  Vec eval(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
  /// Joint-space mass matrix at knee angle theta2.
  Eigen::Matrix2d mass_matrix(double theta2) const;
};

/// Library-level extension point for fields not expressible in the system
/// file. The Jacobian is optional; callers fall back to finite differences.
struct CustomField {
  std::string name;
  std::function<Vec(const Vec& x, const Vec& u)> f;
  std::function<Mat(const Vec& x, const Vec& u)> dfdx;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(AffineField a) : impl_(std::move(a)) {}
  VectorField(DoublePendulumField d) : impl_(std::move(d)) {}
  VectorField(CustomField c) : impl_(std::move(c)) {}

  /// Builds a registered nonlinear field by name. Throws ConfigError for
  /// unknown names or parameters.
  static VectorField named(const std::string& kind, const std::map<std::string, double>& params);

  Vec eval(const Vec& x, const Vec& u) const;
  bool has_jacobian() const;
  /// Analytic state Jacobian; throws DomainError when none is available.
  Mat jacobian(const Vec& x, const Vec& u) const;

  std::string kind() const;
  const AffineField* affine() const { return std::get_if<AffineField>(&impl_); }
  const DoublePendulumField* double_pendulum() const { return std::get_if<DoublePendulumField>(&impl_); }

 private:
  std::variant<AffineField, DoublePendulumField, CustomField> impl_;
};

/// Central finite-difference state Jacobian with per-coordinate step
/// 1e-6 * (1 + |x_i|).
Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x);

}  // namespace hyrelax

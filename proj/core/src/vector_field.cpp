#include "hyrelax/vector_field.hpp"

#include <cmath>

namespace hyrelax {

Eigen::Matrix2d DoublePendulumField::mass_matrix(double theta2) const {
  const auto& p = params;
  const double c2 = std::cos(theta2);
  Eigen::Matrix2d M;
  M(0, 0) = (p.m1 + p.m2) * p.L1 * p.L1 + p.m2 * p.L2 * p.L2 + 2.0 * p.m2 * p.L1 * p.L2 * c2;
  M(0, 1) = p.m2 * p.L2 * p.L2 + p.m2 * p.L1 * p.L2 * c2;
  M(1, 0) = M(0, 1);
  M(1, 1) = p.m2 * p.L2 * p.L2;
  return M;
}

namespace {

struct PendulumTerms {
  Eigen::Matrix2d M;
  Eigen::Vector2d tau;  // generalized force: -(Coriolis + gravity)
  Eigen::Vector2d qdd;
};

PendulumTerms pendulum_terms(const DoublePendulumField& dp, const Vec& x) {
  const auto& p = dp.params;
  const double th1 = x[0], w1 = x[1], th2 = x[2], w2 = x[3];
  const double s2 = std::sin(th2);
  const double s12 = std::sin(th1 + th2);
  const double h = p.m2 * p.L1 * p.L2;
  PendulumTerms t;
  t.M = dp.mass_matrix(th2);
  t.tau[0] = h * s2 * (2.0 * w1 * w2 + w2 * w2) - (p.m1 + p.m2) * p.g * p.L1 * std::sin(th1) -
             p.m2 * p.g * p.L2 * s12;
  t.tau[1] = -h * s2 * w1 * w1 - p.m2 * p.g * p.L2 * s12;
  t.qdd = t.M.ldlt().solve(t.tau);
  return t;
}

}  // namespace

Vec DoublePendulumField::eval(const Vec& x) const {
  const auto t = pendulum_terms(*this, x);
  Vec f(4);
  f << x[1], t.qdd[0], x[3], t.qdd[1];
  return f;
}

Mat DoublePendulumField::jacobian(const Vec& x) const {
  const auto& p = params;
  const auto t = pendulum_terms(*this, x);
  const double th1 = x[0], w1 = x[1], th2 = x[2], w2 = x[3];
  const double s2 = std::sin(th2), c2 = std::cos(th2);
  const double c12 = std::cos(th1 + th2);
  const double h = p.m2 * p.L1 * p.L2;

  // d tau / d state, columns in state order (th1, w1, th2, w2)
  Eigen::Matrix<double, 2, 4> dtau;
  dtau(0, 0) = -(p.m1 + p.m2) * p.g * p.L1 * std::cos(th1) - p.m2 * p.g * p.L2 * c12;
  dtau(0, 1) = 2.0 * h * s2 * w2;
  dtau(0, 2) = h * c2 * (2.0 * w1 * w2 + w2 * w2) - p.m2 * p.g * p.L2 * c12;
  dtau(0, 3) = 2.0 * h * s2 * (w1 + w2);
  dtau(1, 0) = -p.m2 * p.g * p.L2 * c12;
  dtau(1, 1) = -2.0 * h * s2 * w1;
  dtau(1, 2) = -h * c2 * w1 * w1 - p.m2 * p.g * p.L2 * c12;
  dtau(1, 3) = 0.0;

  // M(th2) qdd = tau  =>  d qdd = M^{-1} (d tau - dM qdd)
  Eigen::Matrix2d dM;
  dM << -2.0 * h * s2, -h * s2, -h * s2, 0.0;
  Eigen::Matrix<double, 2, 4> rhs = dtau;
  rhs.col(2) -= dM * t.qdd;
  const Eigen::Matrix<double, 2, 4> dqdd = t.M.ldlt().solve(rhs);

  Mat J = Mat::Zero(4, 4);
  J(0, 1) = 1.0;
  J(2, 3) = 1.0;
  J.row(1) = dqdd.row(0);
  J.row(3) = dqdd.row(1);
  return J;
}

VectorField VectorField::named(const std::string& kind, const std::map<std::string, double>& params) {
  if (kind == "double_pendulum") {
    DoublePendulumField dp;
    for (const auto& [key, value] : params) {
      if (key == "m1") dp.params.m1 = value;
      else if (key == "m2") dp.params.m2 = value;
      else if (key == "L1") dp.params.L1 = value;
      else if (key == "L2") dp.params.L2 = value;
      else if (key == "g") dp.params.g = value;
      else if (key == "k" || key == "c") continue;  // reset parameters, carried by the edge
      else throw ConfigError("double_pendulum: unknown parameter '" + key + "'");
    }
    const auto& p = dp.params;
    if (!(p.m1 > 0 && p.m2 > 0 && p.L1 > 0 && p.L2 > 0 && p.g >= 0))
      throw ConfigError("double_pendulum: masses and lengths must be positive, g nonnegative");
    return VectorField(dp);
  }
  throw ConfigError("unknown vector field kind '" + kind + "'");
}

Vec VectorField::eval(const Vec& x, const Vec& u) const {
  return std::visit(
      [&](const auto& f) -> Vec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AffineField>) {
          Vec out = f.F * x + f.w;
          if (f.G.cols() > 0) out += f.G * u;
          return out;
        } else if constexpr (std::is_same_v<T, DoublePendulumField>) {
          return f.eval(x);
        } else {
          return f.f(x, u);
        }
      },
      impl_);
}

bool VectorField::has_jacobian() const {
  if (const auto* c = std::get_if<CustomField>(&impl_)) return static_cast<bool>(c->dfdx);
  return true;
}

Mat VectorField::jacobian(const Vec& x, const Vec& u) const {
  return std::visit(
      [&](const auto& f) -> Mat {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AffineField>) {
          return f.F;
        } else if constexpr (std::is_same_v<T, DoublePendulumField>) {
          return f.jacobian(x);
        } else {
          if (!f.dfdx) throw DomainError("field '" + f.name + "' has no analytic Jacobian");
          return f.dfdx(x, u);
        }
      },
      impl_);
}

std::string VectorField::kind() const {
  switch (impl_.index()) {
    case 0: return "affine";
    case 1: return "double_pendulum";
    default: return std::get<CustomField>(impl_).name;
  }
}

Mat finite_difference_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const Eigen::Index n = x.size();
  Mat J;
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double step = 1e-6 * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    const Vec col = (f(xp) - f(xm)) / (xp[i] - xm[i]);
    if (J.size() == 0) J.resize(col.size(), n);
    J.col(i) = col;
    xp[i] = x[i];
    xm[i] = x[i];
  }
  if (!J.allFinite()) throw NumericError("finite-difference Jacobian has non-finite entries at " + format_vec(x));
  return J;
}

}  // namespace hyrelax

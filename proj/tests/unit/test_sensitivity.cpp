#include "test_systems.hpp"

#include <doctest.h>

using namespace hyrelax;
using hyrelax::testing::random_in_box;
using hyrelax::testing::stacked_boxes;
using hyrelax::testing::vec;

namespace {

const InputSignal kNone = InputSignal::none();

}  // namespace

TEST_CASE("zero perturbation stays zero") {
  const RelaxedSystem rs(bouncing_ball(), {1e-3, {}});
  const IntegratorScheme scheme{SchemeKind::RK4, 1e-3};
  const Trajectory nominal = simulate_discrete(rs, scheme, vec({1, 0}), 0, kNone, 1.0);
  const VariationalResult v = variational_flow(rs, scheme, nominal, Vec::Zero(2), kNone);
  REQUIRE(v.dx.size() == nominal.samples.size());
  for (const Vec& d : v.dx) CHECK(d.norm() == 0.0);
}

TEST_CASE("scalar Euler recursion") {
  const double a = -0.7, h = 0.01;
  Mat F(1, 1);
  F << a;
  const RelaxedSystem rs(testing::linear_single_mode(F), {1e-3, {}});
  const IntegratorScheme scheme{SchemeKind::Euler, h};
  const Trajectory nominal = simulate_discrete(rs, scheme, vec({2.0}), 0, kNone, 1.0);
  const VariationalResult v = variational_flow(rs, scheme, nominal, vec({0.1}), kNone);
  for (std::size_t k = 0; k < v.dx.size(); ++k)
    CHECK(v.dx[k][0] == doctest::Approx(0.1 * std::pow(1 + a * h, static_cast<double>(k))).epsilon(1e-12));
  CHECK(v.linearized.samples.back().x[0] == doctest::Approx(nominal.samples.back().x[0] + v.dx.back()[0]));
}

TEST_CASE("the linearization is linear") {
  DoublePendulumSystemParams p;
  p.c = 0.5;
  const RelaxedSystem rs(double_pendulum(p), {1e-3, {}});
  const IntegratorScheme scheme{SchemeKind::RK4, 1e-3};
  const double deg = 3.14159265358979323846 / 180.0;
  const Trajectory nominal = simulate_discrete(rs, scheme, vec({20 * deg, 0, 40 * deg, 0}), 0, kNone, 0.5);
  const Vec d1 = vec({0.01, -0.02, 0.005, 0.0});
  const Vec d2 = vec({-0.003, 0.0, 0.01, 0.02});
  const auto v1 = variational_flow(rs, scheme, nominal, d1, kNone);
  const auto v2 = variational_flow(rs, scheme, nominal, d2, kNone);
  const auto vs = variational_flow(rs, scheme, nominal, d1 + d2, kNone);
  const auto v3 = variational_flow(rs, scheme, nominal, 3.0 * d1, kNone);
  for (std::size_t k = 0; k < v1.dx.size(); ++k) {
    CHECK((vs.dx[k] - v1.dx[k] - v2.dx[k]).norm() <= 1e-12 * (1 + vs.dx[k].norm()));
    CHECK((v3.dx[k] - 3.0 * v1.dx[k]).norm() <= 1e-12 * (1 + v3.dx[k].norm()));
  }
}

TEST_CASE("nominal with a reset is rejected") {
  const RelaxedSystem rs(stacked_boxes(vec({0, 1}), vec({0, 1})), {0.05, {}});
  const IntegratorScheme scheme{SchemeKind::Euler, 0.25};
  const Trajectory nominal = simulate_discrete(rs, scheme, vec({0, 0.25}), 0, kNone, 1.25);
  REQUIRE_FALSE(nominal.events.empty());
  CHECK_THROWS_AS(variational_flow(rs, scheme, nominal, vec({0.1, 0}), kNone), UnsupportedChart);
}

TEST_CASE("field Jacobian of an affine mode is its matrix") {
  Mat F(2, 2);
  F << 0.3, -1, 2, 0.1;
  const RelaxedSystem rs(testing::linear_single_mode(F), {1e-3, {}});
  CHECK((field_jacobian(rs, 0, vec({0.4, -0.2}), Vec()) - F).norm() < 1e-15);
}

TEST_CASE("strip Jacobian of constant fields has rank one") {
  const double eps = 0.1;
  const Vec f1 = vec({0.5, 1}), f2 = vec({-0.3, 2});
  const RelaxedSystem rs(stacked_boxes(f1, f2), {eps, {}});
  const Vec x = vec({2, 1.03});
  const double a = 0.3;
  const Mat J = field_jacobian(rs, 0, x, Vec());
  const Mat expected = (f2 - f1) * (rs.transition().derivative(a) / eps) * vec({0, 1}).transpose();
  CHECK((J - expected).norm() < 1e-10);
  Eigen::JacobiSVD<Mat> svd(J);
  CHECK(svd.singularValues()[1] <= 1e-12 * svd.singularValues()[0]);
}

TEST_CASE("analytic and difference Jacobians agree in strips") {
  std::mt19937_64 rng(13);
  const double eps = 0.05;
  DoublePendulumSystemParams p;
  p.c = 0.5;
  const RelaxedSystem rs(double_pendulum(p), {eps, {}});
  for (int i = 0; i < 100; ++i) {
    Vec x = random_in_box(rng, vec({-1, -2, -eps, -2}), vec({1, 2, 0, 2}));
    const Mat J = field_jacobian(rs, 0, x, Vec());
    const Mat fd = field_jacobian_fd(rs, 0, x, Vec());
    CHECK(testing::rel_err(J, fd) < 1e-6);
  }
}

TEST_CASE("linearization error shrinks faster than the perturbation") {
  SensitivitySpec spec;
  DoublePendulumSystemParams p;
  p.c = 0.5;
  spec.system = double_pendulum(p);
  const double deg = 3.14159265358979323846 / 180.0;
  spec.x0 = vec({20 * deg, 0, 40 * deg, 0});
  spec.direction = vec({0, 0, 1, 0});
  spec.deltas = {1e-2, 1e-3, 1e-4};
  spec.T = 0.5;
  spec.h = 1e-3;
  spec.eps = 1e-3;
  const SweepResult r = sensitivity_sweep(spec);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[2].error < r.rows[0].error / 5.0);
  CHECK(r.fit.slope > 1.5);
}

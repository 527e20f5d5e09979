#include "test_systems.hpp"

#include <doctest.h>

using namespace hyrelax;
using hyrelax::testing::random_in_box;
using hyrelax::testing::stacked_boxes;
using hyrelax::testing::vec;

namespace {

HybridSystem glued_halves() {
  HybridSystem sys;
  sys.state_dim = 2;
  sys.input_box = {Vec(), Vec()};
  sys.modes = {Mode{1, Polytope::box(vec({-1, 0}), vec({0, 1})), VectorField(testing::constant_field(vec({1, 0})))},
               Mode{2, Polytope::box(vec({0, 0}), vec({1, 1})), VectorField(testing::constant_field(vec({1, 0})))}};
  Edge right;
  right.id = 1;
  right.source = 0;
  right.target = 1;
  right.guard_normal = vec({1, 0});
  right.guard_offset = 0.0;
  right.reset_A = Mat::Identity(2, 2);
  right.reset_b = Vec::Zero(2);
  right.partner = 1;
  Edge left = right;
  left.id = 2;
  left.source = 1;
  left.target = 0;
  left.guard_normal = vec({-1, 0});
  left.partner = 0;
  sys.edges = {right, left};
  return sys;
}

}  // namespace

TEST_CASE("guard values and the relaxed guard") {
  const HybridSystem stacked = stacked_boxes(vec({0, 1}), vec({0, 1}));
  CHECK(guard_value(stacked.edge(0), vec({3, 1})) == 0.0);

  const HybridSystem ball = bouncing_ball();
  const Edge& e = ball.edge(0);
  CHECK(guard_value(e, vec({0.25, -1})) == doctest::Approx(-0.25));
  CHECK(relaxed_guard_value(e, 0.1, vec({0.25, -1})) == doctest::Approx(-0.35));
  CHECK(project_to_guard_plane(e, vec({-0.3, 2})).isApprox(vec({0, 2})));
}

TEST_CASE("identity gluing gives the identity change of basis") {
  const HybridSystem sys = glued_halves();
  const EdgeGeometry g = build_edge_geometry(sys, 0, 0.0);
  CHECK(g.kind == EdgeKind::Reversible);
  CHECK(g.A_bar.isApprox(Mat::Identity(2, 2)));
  CHECK(g.b_bar.norm() < 1e-15);
  CHECK(g.full_rank());
}

TEST_CASE("bouncing ball change of basis") {
  const HybridSystem ball = bouncing_ball();
  const EdgeGeometry g = build_edge_geometry(ball, 0, 0.0);
  Mat expected(2, 2);
  expected << -1, 0, 0, -0.5;
  CHECK(g.A_bar.isApprox(expected));
  CHECK(g.aux_dim() == 0);
  CHECK(g.bar_reset(vec({-0.3, -2})).isApprox(vec({0.3, 1})));
}

TEST_CASE("plastic knee impact is rank deficient with a single null direction") {
  DoublePendulumSystemParams p;
  p.c = 0.0;
  const HybridSystem sys = double_pendulum(p);
  const double k = default_stop_gain(p.dynamics);
  const EdgeGeometry g = build_edge_geometry(sys, 0, 0.0);
  CHECK(g.kind == EdgeKind::NonReversible);
  Mat expected = Mat::Zero(4, 4);
  expected(0, 0) = 1;
  expected(1, 1) = 1;
  expected(1, 3) = k;
  expected(2, 2) = -1;
  CHECK((g.A_bar - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(g.rank == 3);
  REQUIRE(g.aux_dim() == 1);
  CHECK(std::abs(std::abs(g.null_basis(3, 0)) - 1.0) < 1e-12);
  CHECK(g.null_basis.col(0).head(3).norm() < 1e-12);
  CHECK((g.A_bar.transpose() * g.null_basis).norm() < 1e-12);
  CHECK(std::isfinite(g.z_bound));
  CHECK(g.z_bound > 0.0);
}

TEST_CASE("augmented reset adds the auxiliary coordinate along the null basis") {
  DoublePendulumSystemParams p;
  p.c = 0.0;
  const HybridSystem sys = double_pendulum(p);
  const double eps = 0.01;
  const EdgeGeometry g = build_edge_geometry(sys, 0, eps);
  const Vec x = vec({0.2, 0.5, -eps, -0.3});
  const auto [y0, z0] = augmented_reset(g, x, Vec::Zero(1));
  CHECK(y0.isApprox(g.bar_reset(x)));
  CHECK(z0.size() == 1);
  CHECK(z0.norm() == 0.0);
  const double zeta = 0.37;
  const auto [y, z] = augmented_reset(g, x, vec({zeta}));
  CHECK((y - y0).norm() == doctest::Approx(zeta));
  CHECK(std::abs(y[3] - y0[3]) == doctest::Approx(zeta));
  CHECK(g.tilde_reset(x, vec({zeta})).isApprox(y));
}

TEST_CASE("relaxed guard maps onto the receiving plane") {
  const HybridSystem ball = bouncing_ball();
  const double eps = 0.1;
  const EdgeGeometry g = build_edge_geometry(ball, 0, eps);
  // relaxed guard g^eps = 0 is x1 = -eps
  const Vec x = vec({-eps, -1.3});
  CHECK(std::abs(g.receiving_value(g.bar_reset(x))) < 1e-14);
}

TEST_CASE("membership precedence on the bouncing ball") {
  const HybridSystem ball = bouncing_ball();
  const RelaxedGeometry geo(ball, 0.1);
  CHECK(geo.membership(0, vec({0.5, -1})) == Region::interior());
  CHECK(geo.membership(0, vec({0.0, -1})) == Region::interior());
  CHECK(geo.membership(0, vec({-0.05, -1})) == Region::strip(0));
  CHECK(geo.membership(0, vec({-0.5, -1})) == Region::projected(0));
  CHECK(geo.reset(0, vec({-0.5, -1}), Vec()).isApprox(vec({0.4, 0.5})));
  CHECK(geo.membership(0, vec({3.0, 0})) == Region::outside());
}

TEST_CASE("singular change of basis on a reversible edge is rejected") {
  HybridSystem sys = stacked_boxes(vec({0, 1}), vec({0, 1}));
  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  for (auto& e : sys.edges) {
    e.reset_A = swap;
    e.reset_b = Vec::Zero(2);
  }
  CHECK_THROWS_AS(build_edge_geometry(sys, 0, 0.0), GeometryError);
}

TEST_CASE("projection properties") {
  std::mt19937_64 rng(11);
  const HybridSystem ball = bouncing_ball();
  const HybridSystem pend = double_pendulum();
  for (const HybridSystem* sys : {&ball, &pend}) {
    const Edge& e = sys->edge(0);
    const auto n = static_cast<Eigen::Index>(sys->state_dim);
    for (int i = 0; i < 1000; ++i) {
      const Vec x = random_in_box(rng, Vec::Constant(n, -3), Vec::Constant(n, 3));
      const Vec p = project_to_guard_plane(e, x);
      CHECK(std::abs(guard_value(e, p)) < 1e-12);
      CHECK((project_to_guard_plane(e, p) - p).norm() < 1e-12);
      const Vec d = x - p;
      CHECK((d - d.dot(e.guard_normal) * e.guard_normal).norm() < 1e-12);
    }
  }
}

TEST_CASE("change of basis identities") {
  std::mt19937_64 rng(23);
  const double eps = 0.05;
  std::vector<HybridSystem> systems = {bouncing_ball(), glued_halves(), stacked_boxes(vec({1, 1}), vec({1, 2}))};
  for (double c : {0.0, 0.3, 1.0}) {
    DoublePendulumSystemParams p;
    p.c = c;
    systems.push_back(double_pendulum(p));
  }
  for (const HybridSystem& sys : systems) {
    const auto n = static_cast<Eigen::Index>(sys.state_dim);
    for (EdgeIndex ei = 0; ei < sys.edges.size(); ++ei) {
      const Edge& e = sys.edge(ei);
      const EdgeGeometry g = build_edge_geometry(sys, ei, eps);
      CHECK(g.null_basis.cols() + g.rank == n);
      CHECK((g.A_bar.transpose() * g.null_basis).norm() < 1e-12);
      CHECK((g.null_basis.transpose() * g.null_basis - Mat::Identity(g.null_basis.cols(), g.null_basis.cols())).norm() <
            1e-12);
      CHECK((g.A_tilde * g.A_tilde_pinv - Mat::Identity(n, n)).norm() < 1e-10);
      for (int i = 0; i < 200; ++i) {
        const Vec x = random_in_box(rng, Vec::Constant(n, -2), Vec::Constant(n, 2));
        // R_bar^eps(x) = R(P x) - hhat g^eps(x)
        const Vec direct = e.reset(project_to_guard_plane(e, x)) - g.receiving_normal * relaxed_guard_value(e, eps, x);
        CHECK((g.bar_reset(x) - direct).norm() < 1e-10);
        // unrelaxed map agrees with the reset on the guard plane
        const Vec p = project_to_guard_plane(e, x);
        CHECK((g.bar_reset(p, false) - e.reset(p)).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("partner edges undo each other on the guard") {
  std::mt19937_64 rng(5);
  std::vector<HybridSystem> systems = {glued_halves(), stacked_boxes(vec({1, 1}), vec({1, 2}))};
  for (const HybridSystem& sys : systems) {
    for (EdgeIndex ei = 0; ei < sys.edges.size(); ++ei) {
      const EdgeIndex pi = *sys.edge(ei).partner;
      const EdgeGeometry g = build_edge_geometry(sys, ei, 0.0);
      const EdgeGeometry gp = build_edge_geometry(sys, pi, 0.0);
      for (int i = 0; i < 100; ++i) {
        const Vec x = project_to_guard_plane(sys.edge(ei), random_in_box(rng, vec({0, 0}), vec({1, 2})));
        CHECK((gp.bar_reset(g.bar_reset(x, false), false) - x).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("solve inverts the change of basis") {
  const HybridSystem sys = stacked_boxes(vec({1, 1}), vec({1, 2}));
  const EdgeGeometry g = build_edge_geometry(sys, 0, 0.1);
  const Vec v = vec({0.3, -0.7});
  CHECK((g.A_bar * g.solve(v) - v).norm() < 1e-14);
}

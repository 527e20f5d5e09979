#include "test_systems.hpp"

#include <doctest.h>

using namespace hyrelax;
using hyrelax::testing::random_in_box;
using hyrelax::testing::stacked_boxes;
using hyrelax::testing::vec;

namespace {

HybridSystem three_boxes() {
  HybridSystem sys = stacked_boxes(vec({0, 1}), vec({0, 1}));
  sys.modes.push_back(
      Mode{3, Polytope::box(vec({10, 10}), vec({11, 11})), VectorField(testing::constant_field(vec({0, 0})))});
  return sys;
}

/// Two unit cubes glued along x3 = 1.
HybridSystem stacked_cubes() {
  HybridSystem sys;
  sys.state_dim = 3;
  sys.input_box = {Vec(), Vec()};
  sys.modes = {
      Mode{1, Polytope::box(vec({0, 0, 0}), vec({1, 1, 1})), VectorField(testing::constant_field(vec({0, 0, 1})))},
      Mode{2, Polytope::box(vec({0, 0, 1}), vec({1, 1, 2})), VectorField(testing::constant_field(vec({0, 0, 1})))}};
  Edge up;
  up.id = 1;
  up.source = 0;
  up.target = 1;
  up.guard_normal = vec({0, 0, 1});
  up.guard_offset = 1.0;
  up.reset_A = Mat::Identity(3, 3);
  up.reset_b = Vec::Zero(3);
  up.partner = 1;
  Edge down = up;
  down.id = 2;
  down.source = 1;
  down.target = 0;
  down.guard_normal = vec({0, 0, -1});
  down.guard_offset = -1.0;
  down.partner = 0;
  sys.edges = {up, down};
  return sys;
}

Trajectory constant_run(ModeIndex j, const Vec& x, std::initializer_list<double> ts) {
  Trajectory tr;
  for (double t : ts) tr.samples.push_back({t, j, x, Region::interior(), Vec()});
  return tr;
}

}  // namespace

TEST_CASE("same-chart distance is Euclidean") {
  const RelaxedGeometry geo(stacked_boxes(vec({0, 1}), vec({0, 1}), 10.0), 0.01);
  const QuotientMetric d(geo);
  CHECK(d.distance({0, vec({0, 0})}, {0, vec({3, 0.4})}) == doctest::Approx(std::hypot(3.0, 0.4)));
  CHECK(d.distance({0, vec({0.5, 0.5})}, {0, vec({0.5, 0.5})}) == 0.0);
}

TEST_CASE("unrelated modes are infinitely far apart") {
  const RelaxedGeometry geo(three_boxes(), 0.01);
  const QuotientMetric d(geo);
  CHECK(std::isinf(d.distance({0, vec({0.5, 0.5})}, {2, vec({10.5, 10.5})})));
}

TEST_CASE("glued points are at distance zero") {
  const double eps = 0.05;
  const RelaxedGeometry geo(stacked_boxes(vec({0, 1}), vec({0, 1})), eps);
  const QuotientMetric d(geo);
  for (double s : {0.0, 1.3, 4.0}) {
    const Vec w = vec({s, 1 + eps});
    CHECK(d.distance({0, w}, {1, geo.edge(0).bar_reset(w)}) <= 1e-12);
    CHECK(d.distance({1, geo.edge(0).bar_reset(w)}, {0, w}) <= 1e-12);
  }
  // a point past the relaxed guard is its reset image
  const Vec past = vec({2, 1.2});
  CHECK(d.distance({0, past}, {1, geo.edge(0).bar_reset(past)}) <= 1e-12);
}

TEST_CASE("a hop through the guard is shorter than nothing") {
  const double eps = 0.05;
  const RelaxedGeometry geo(stacked_boxes(vec({0, 1}), vec({0, 1})), eps);
  const QuotientMetric d(geo);
  // (1, 0.9) in the lower chart and (1, 1.1) in the upper chart: the relaxed
  // guard sits at 1.05 below and maps to 1.0 above
  CHECK(d.distance({0, vec({1, 0.9})}, {1, vec({1, 1.1})}) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(d.distance({0, vec({0, 0.95})}, {1, vec({3, 1.0})}) == doctest::Approx(std::hypot(3.0, 0.1)).epsilon(1e-8));
}

TEST_CASE("hop over a two-dimensional facet matches a grid search") {
  const double eps = 0.02;
  const RelaxedGeometry geo(stacked_cubes(), eps);
  const QuotientMetric d(geo);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const Vec p = random_in_box(rng, vec({0, 0, 0.5}), vec({1, 1, 1}));
    const Vec q = random_in_box(rng, vec({0, 0, 1}), vec({1, 1, 1.5}));
    double brute = std::numeric_limits<double>::infinity();
    const int n = 200;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; b <= n; ++b) {
        const Vec w = vec({double(a) / n, double(b) / n, 1 + eps});
        brute = std::min(brute, (p - w).norm() + (geo.edge(0).bar_reset(w) - q).norm());
      }
    }
    const double h = d.hop(0, p, q);
    CHECK(h <= brute + 1e-9);
    CHECK(h >= brute - 1e-2);
  }
}

TEST_CASE("symmetry and triangle inequality on sampled points") {
  const RelaxedGeometry geo(bouncing_ball(), 0.1);
  const QuotientMetric d(geo);
  std::mt19937_64 rng(2);
  std::vector<HybridPoint> pts;
  for (int i = 0; i < 40; ++i) pts.push_back({0, random_in_box(rng, vec({-0.1, -3}), vec({2, 3}))});
  for (const auto& p : pts) {
    for (const auto& q : pts) {
      CHECK(std::abs(d.distance(p, q) - d.distance(q, p)) <= 1e-10);
    }
  }
}

TEST_CASE("trajectory distance") {
  const RelaxedGeometry geo(stacked_boxes(vec({0, 1}), vec({0, 1}), 10.0), 0.01);
  const QuotientMetric d(geo);
  const Trajectory a = constant_run(0, vec({1, 0.5}), {0.0, 0.5, 1.0});
  const Trajectory b = constant_run(0, vec({4, 0.1}), {0.0, 0.25, 1.0});
  CHECK(trajectory_distance(d, a, a) == 0.0);
  CHECK(trajectory_distance(d, a, b) == doctest::Approx(std::hypot(3.0, 0.4)));
  DistanceOptions opt;
  opt.grid = TimeGrid::First;
  CHECK(trajectory_distance(d, a, b, opt) == doctest::Approx(std::hypot(3.0, 0.4)));
  const Trajectory c = constant_run(0, vec({1, 0.5}), {0.0, 0.5, 2.0});
  CHECK_THROWS_AS(trajectory_distance(d, a, c), DomainError);
  opt.t_to = 1.0;
  CHECK(trajectory_distance(d, a, c, opt) == 0.0);
}

TEST_CASE("rest error against the zero state and the sup norm") {
  const double eps = 1e-3;
  const RelaxedSystem rs(bouncing_ball(), {eps, {}});
  const Trajectory tr =
      simulate_discrete(rs, {SchemeKind::RK4, 1e-3}, vec({1, 0}), 0, InputSignal::none(), 6.0, {1, true});
  Trajectory rest;
  for (const Sample& s : tr.samples) rest.samples.push_back({s.t, 0, Vec::Zero(2), Region::interior(), Vec()});
  const QuotientMetric d(rs.geometry());
  DistanceOptions opt;
  opt.t_from = 4.6;
  opt.grid = TimeGrid::First;
  const double rho = trajectory_distance(d, tr, rest, opt);
  const double sup = sup_norm_after(tr, 4.6);
  CHECK(rho <= std::sqrt(2.0) * sup + 1e-12);
  CHECK(sup < 0.05);
}

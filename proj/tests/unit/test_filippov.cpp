#include "test_systems.hpp"

#include <doctest.h>

using namespace hyrelax;
using hyrelax::testing::random_in_box;
using hyrelax::testing::stacked_boxes;
using hyrelax::testing::vec;

TEST_CASE("region classification by normal components") {
  CHECK(classify_normals(1, 1) == RegionTag::Crossing);
  CHECK(classify_normals(1, -1) == RegionTag::Sliding);
  CHECK(classify_normals(2, 0) == RegionTag::Degenerate);
  CHECK(classify_normals(-1, 1) == RegionTag::Escaping);
  CHECK(classify_normals(0, 0) == RegionTag::Escaping);
}

TEST_CASE("classification is a partition of the plane") {
  int counts[4] = {0, 0, 0, 0};
  for (int i = -10; i <= 10; ++i) {
    for (int k = -10; k <= 10; ++k) {
      const double a1 = 0.1 * i, a2 = 0.1 * k;
      const RegionTag tag = classify_normals(a1, a2);
      ++counts[static_cast<int>(tag)];
      switch (tag) {
        case RegionTag::Crossing: CHECK(a1 * a2 > 0); break;
        case RegionTag::Sliding: CHECK((a1 > 0 && a2 < 0)); break;
        case RegionTag::Escaping: CHECK((a1 <= 0 && a2 >= 0)); break;
        case RegionTag::Degenerate: CHECK(((a1 > 0 && a2 == 0) || (a1 == 0 && a2 < 0))); break;
      }
    }
  }
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 21 * 21);
}

TEST_CASE("projected field of the bouncing ball") {
  const FilippovSystem fs(bouncing_ball());
  CHECK(fs.projected_field(0, vec({-0.3, -2}), Vec()).isApprox(vec({-1, 2})));
  CHECK(fs.switched_field(0, vec({-0.3, -2}), Vec()).isApprox(vec({-1, 2})));
  CHECK(fs.switched_field(0, vec({0.5, -2}), Vec()).isApprox(vec({-2, -1})));
  CHECK(fs.switched_field(0, vec({0.0, -2}), Vec()).isApprox(vec({-2, -1})));
}

TEST_CASE("identity gluing with equal fields leaves the field unchanged") {
  const FilippovSystem fs(stacked_boxes(vec({0.5, 1}), vec({0.5, 1})));
  CHECK(fs.projected_field(0, vec({1, 1.2}), Vec()).isApprox(vec({0.5, 1})));
  CHECK(fs.classify_region(0, vec({1, 1}), Vec()).tag == RegionTag::Crossing);
}

TEST_CASE("sliding field examples") {
  {
    const FilippovSystem fs(stacked_boxes(vec({1, 1}), vec({1, -1})));
    const RegionClass rc = fs.classify_region(0, vec({2, 1}), Vec());
    CHECK(rc.tag == RegionTag::Sliding);
    CHECK(rc.a1 == doctest::Approx(1));
    CHECK(rc.a2 == doctest::Approx(-1));
    const SlidingField s = fs.sliding_field(0, vec({2, 1}), Vec());
    CHECK(s.alpha == doctest::Approx(0.5));
    CHECK(s.field.isApprox(vec({1, 0})));
  }
  {
    const FilippovSystem fs(stacked_boxes(vec({1, 2}), vec({1, -1})));
    const SlidingField s = fs.sliding_field(0, vec({2, 1}), Vec());
    CHECK(s.alpha == doctest::Approx(2.0 / 3.0));
    CHECK(std::abs(s.field[1]) < 1e-14);
  }
}

TEST_CASE("sliding field outside the sliding region is an error") {
  const FilippovSystem fs(stacked_boxes(vec({1, 1}), vec({1, 1})));
  CHECK_THROWS_AS(fs.sliding_field(0, vec({2, 1}), Vec()), DomainError);
}

TEST_CASE("rank-deficient edge has no projected field") {
  DoublePendulumSystemParams p;
  p.c = 0.0;
  const FilippovSystem fs(double_pendulum(p));
  CHECK_THROWS_AS(fs.projected_field(0, vec({0.1, 0, -0.1, 0}), Vec()), GeometryError);
}

TEST_CASE("normal identity, tangency and convexity on random affine systems") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  int sliding_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    HybridSystem sys = stacked_boxes(vec({0, 1}), vec({0, 1}));
    for (auto& m : sys.modes) {
      Mat F(2, 2);
      F << U(rng), U(rng), U(rng), U(rng);
      m.field = VectorField(AffineField{F, Mat::Zero(2, 0), vec({U(rng), U(rng)})});
    }
    const FilippovSystem fs(sys);
    const Vec x = vec({4.0 * (U(rng) + 2.0) / 4.0, 1.0});
    const EdgeGeometry& g = fs.geometry().edge(0);
    const Vec fe = fs.projected_field(0, x, Vec());
    const Vec y = g.bar_reset(x);
    const Vec fjp = sys.mode(1).field.eval(y, Vec());
    CHECK(std::abs(g.guard_normal.dot(fe) + g.receiving_normal.dot(fjp)) < 1e-10);
    const RegionClass rc = fs.classify_region(0, x, Vec());
    if (rc.tag == RegionTag::Sliding) {
      const SlidingField s = fs.sliding_field(0, x, Vec());
      CHECK(std::abs(g.guard_normal.dot(s.field)) < 1e-10);
      CHECK(s.alpha >= 0.0);
      CHECK(s.alpha <= 1.0);
      ++sliding_checked;
    }
  }
  CHECK(sliding_checked > 50);
}

TEST_CASE("projected field is the pullback along the change of basis") {
  const HybridSystem sys = stacked_boxes(vec({1, 1}), vec({0.3, 2}));
  const FilippovSystem fs(sys);
  const EdgeGeometry& g = fs.geometry().edge(0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec x = random_in_box(rng, vec({0, 1}), vec({4, 1.5}));
    const Vec fe = fs.projected_field(0, x, Vec());
    const double dt = 1e-6;
    const Vec lhs = (g.bar_reset(x + dt * fe) - g.bar_reset(x)) / dt;
    CHECK((lhs - sys.mode(1).field.eval(g.bar_reset(x), Vec())).norm() < 1e-8);
  }
}

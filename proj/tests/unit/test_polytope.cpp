#include "test_systems.hpp"

#include <doctest.h>

using namespace hyrelax;
using hyrelax::testing::vec;

TEST_CASE("box rows are ordered -e_i, +e_i") {
  const Polytope p = Polytope::box(vec({0, -3}), vec({2, 3}));
  CHECK(p.facets() == 4);
  CHECK(p.dim() == 2);
  CHECK(p.normals.row(0).transpose().isApprox(vec({-1, 0})));
  CHECK(p.normals.row(1).transpose().isApprox(vec({1, 0})));
  CHECK(p.offsets[0] == 0.0);
  CHECK(p.offsets[1] == 2.0);
  CHECK(p.offsets[2] == 3.0);
}

TEST_CASE("containment and violation") {
  const Polytope p = Polytope::box(vec({0, 0}), vec({1, 1}));
  CHECK(p.contains(vec({0.5, 0.5})));
  CHECK(p.contains(vec({1.0, 0.0})));
  CHECK_FALSE(p.contains(vec({1.1, 0.5})));
  CHECK(p.max_violation(vec({1.25, 0.5})) == doctest::Approx(0.25));
  CHECK(p.max_violation(vec({0.5, 0.5})) == doctest::Approx(-0.5));
}

TEST_CASE("vertex enumeration of a box") {
  const Polytope p = Polytope::box(vec({0, 0, 0}), vec({1, 2, 3}));
  const auto v = enumerate_vertices(p);
  CHECK(v.vertices.size() == 8);
  CHECK_FALSE(v.touches_bound);
  for (const auto& x : v.vertices) CHECK(p.contains(x, 1e-12));
}

TEST_CASE("vertex enumeration of a triangle") {
  Polytope p;
  p.normals.resize(3, 2);
  const double s = 1.0 / std::sqrt(2.0);
  p.normals << -1, 0, 0, -1, s, s;
  p.offsets = vec({0, 0, s});
  const auto v = enumerate_vertices(p);
  CHECK(v.vertices.size() == 3);
}

TEST_CASE("unbounded input touches the artificial box") {
  Polytope p;
  p.normals.resize(1, 2);
  p.normals << 1, 0;
  p.offsets = vec({1});
  const auto v = enumerate_vertices(p, 100.0);
  CHECK(v.touches_bound);
}

#include <vector>

#include "doctest.h"
#include "hsr/errors.hpp"
#include "hsr/scene.hpp"

using namespace hsr;

namespace {

RPoint3 P(long x, long y, long z) { return {x, y, z}; }
HPoint H(long x, long y) { return HPoint(x, y, 1); }

// Two triangles in planes z = 4 (index 0) and z = 2 (index 1); the near one
// projects strictly inside the far one.
std::vector<RTriangle3> stacked(bool near_first) {
  RTriangle3 far{P(-4, -4, 4), P(4, -4, 4), P(0, 4, 4)};
  RTriangle3 near{P(-1, -1, 2), P(1, -1, 2), P(0, 1, 2)};
  if (near_first) return {near, far};
  return {far, near};
}

}  // namespace

TEST_CASE("project: central scaling and explicit planes") {
  const ProjectionFrame z1{P(0, 0, 0), P(0, 0, 1), P(1, 0, 0), P(0, 1, 0)};
  CHECK(project(z1, P(2, 2, 2)) == RPoint2{1, 1});
  CHECK(project(z1, P(0, 0, 3)) == RPoint2{0, 0});
  // Plane z = 4 seen from (0,0,5): normal . (X - eye) = 1 with normal (0,0,-1).
  const ProjectionFrame z4{P(0, 0, 5), P(0, 0, -1), P(1, 0, 0), P(0, 1, 0)};
  CHECK(project(z4, P(2, 0, 3)) == RPoint2{1, 0});
  CHECK_THROWS_AS(project(z1, P(0, 0, 0)), DegenerateRay);
}

TEST_CASE("orientation examples") {
  CHECK(orientation(H(0, 0), H(1, 0), H(0, 1)) == Orientation::left);
  CHECK(orientation(H(0, 0), H(1, 0), H(2, 0)) == Orientation::collinear);
  CHECK(orientation(H(0, 0), H(0, 1), H(1, 0)) == Orientation::right);
  // Homogeneous weights must not change the answer.
  CHECK(orientation(HPoint(0, 0, 3), HPoint(7, 0, 7), HPoint(0, 5, 5)) == Orientation::left);
}

TEST_CASE("segment crossings resolve exactly") {
  auto x1 = meet(line_through(H(0, 0), H(2, 2)), line_through(H(0, 2), H(2, 0)));
  REQUIRE(x1);
  CHECK(*x1 == H(1, 1));
  auto x2 = meet(line_through(H(0, 0), H(4, 0)), line_through(H(1, -1), H(1, 3)));
  REQUIRE(x2);
  CHECK(*x2 == H(1, 0));
  CHECK_FALSE(meet(line_through(H(0, 0), H(1, 0)), line_through(H(0, 1), H(1, 1))));
}

TEST_CASE("resolve_vertex on a scene") {
  const ProjectionFrame z1{P(0, 0, 0), P(0, 0, 1), P(1, 0, 0), P(0, 1, 0)};
  // Triangle A spans (0,0)-(2,2) as an edge; B spans (0,2)-(2,0); both at depth 1.
  std::vector<RTriangle3> tris{{P(0, 0, 1), P(2, 2, 1), P(3, 0, 1)}, {P(0, 2, 2), P(2, 0, 2), P(-1, -1, 2)}};
  // B is at z = 2 with corners scaled so its projection is (0,1),(1,0),(-0.5,-0.5): rescale.
  tris[1] = {P(0, 4, 2), P(4, 0, 2), P(-2, -2, 2)};
  std::swap(tris[0], tris[1]);  // far first
  const Scene scene = Scene::from_rational(P(0, 0, 0), tris, Scene::Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  CHECK(scene.resolve(VertexRef::corner(1, 1)) == H(2, 2));
  CHECK(project(z1, scene.corner(0, 0)) == RPoint2{0, 2});
  // Edge 0 of triangle 1 is (0,0)-(2,2); edge 0 of triangle 0 is (0,2)-(2,0).
  const VertexRef x = VertexRef::crossing(edge_id(1, 0), edge_id(0, 0));
  CHECK(x.edge_a() == 0);
  CHECK(x.edge_b() == 3);
  CHECK(scene.resolve(x) == H(1, 1));
  // Same crossing from either argument order is the same ref.
  CHECK(VertexRef::crossing(3, 0) == x);
  // Edge 1 of triangle 1 is (2,2)-(3,0): it misses edge 0 of triangle 0.
  CHECK_THROWS_AS(scene.resolve(VertexRef::crossing(edge_id(1, 1), edge_id(0, 0))), InvariantError);
}

TEST_CASE("vertex refs know their edges") {
  const VertexRef c = VertexRef::corner(4, 0);
  CHECK(c.is_corner());
  CHECK(c.triangle() == 4);
  CHECK(c.corner_index() == 0);
  CHECK(c.on_edge(12));
  CHECK(c.on_edge(14));
  CHECK_FALSE(c.on_edge(13));
  CHECK(common_edge(c, VertexRef::corner(4, 1)) == EdgeId{12});
  CHECK(common_edge(VertexRef::crossing(1, 9), VertexRef::crossing(9, 20)) == EdgeId{9});
  CHECK_FALSE(common_edge(VertexRef::crossing(1, 9), VertexRef::crossing(2, 20)));
  const VertexRef x = VertexRef::crossing(7, 2);
  CHECK(x.partner(0) == 2);
  CHECK(x.edge_on(2) == 7);
}

TEST_CASE("depth order validation") {
  SUBCASE("correct order") {
    const Scene s = Scene::from_rational(P(0, 0, 0), stacked(false));
    CHECK_NOTHROW(validate_depth_order(s));
  }
  SUBCASE("near occluder listed first") {
    const Scene s = Scene::from_rational(P(0, 0, 0), stacked(true));
    try {
      validate_depth_order(s);
      FAIL("expected a violation");
    } catch (const DepthOrderViolation& v) {
      CHECK(v.farther() == 1);
      CHECK(v.nearer() == 2);
    }
  }
  SUBCASE("disjoint projections in any order") {
    std::vector<RTriangle3> t{{P(0, 0, 1), P(1, 0, 1), P(0, 1, 1)}, {P(10, 10, 5), P(11, 10, 5), P(10, 11, 5)}};
    CHECK_NOTHROW(validate_depth_order(Scene::from_rational(P(0, 0, -1), t)));
  }
  SUBCASE("single triangle") {
    std::vector<RTriangle3> t{{P(0, 0, 1), P(1, 0, 1), P(0, 1, 1)}};
    CHECK_NOTHROW(validate_depth_order(Scene::from_rational(P(0, 0, -1), t)));
  }
}

TEST_CASE("load-time rejections") {
  // Triangle seen edge-on: all corners on a plane through the viewpoint.
  std::vector<RTriangle3> edge_on{{P(0, 0, 1), P(0, 1, 2), P(0, -1, 3)}};
  CHECK_THROWS_AS(Scene::from_rational(P(0, 0, 0), edge_on), ValidationError);
  std::vector<RTriangle3> behind{{P(0, 0, 1), P(1, 0, 1), P(0, 1, 1)}, {P(0, 0, -1), P(1, 0, -1), P(0, 1, -1)}};
  CHECK_THROWS_AS(Scene::from_rational(P(0, 0, 0), behind, Scene::Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}),
                  ValidationError);
}

TEST_CASE("general position check") {
  // Corner of the near triangle lies exactly on an edge of the far one.
  std::vector<RTriangle3> touching{{P(0, 0, 1), P(4, 0, 1), P(0, 4, 1)}, {P(2, 0, 1), P(3, -1, 1), P(1, -1, 1)}};
  const Scene s = Scene::from_rational(P(0, 0, -1), touching, Scene::Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  CHECK_THROWS_AS(check_general_position(s), DegeneracyDetected);
  const Scene ok = Scene::from_rational(P(0, 0, 0), stacked(false));
  CHECK_NOTHROW(check_general_position(ok));
  CHECK(all_edge_crossings(ok).empty());
}

TEST_CASE("padding to a power of two") {
  CHECK(next_power_of_two(1) == 1);
  CHECK(next_power_of_two(5) == 8);
  std::vector<RTriangle3> four;
  for (long i = 0; i < 4; ++i) four.push_back({P(10 * i, 0, 5 - i), P(10 * i + 1, 0, 5 - i), P(10 * i, 1, 5 - i)});
  CHECK(pad_to_power_of_two(Scene::from_rational(P(0, 0, -1), four)).added == 0);
  std::vector<RTriangle3> five = four;
  five.push_back({P(50, 0, 1), P(51, 0, 1), P(50, 1, 1)});
  const auto padded = pad_to_power_of_two(Scene::from_rational(P(0, 0, -1), five));
  CHECK(padded.added == 3);
  CHECK(padded.scene.size() == 8);
  CHECK(padded.scene.padding() == 3);
  CHECK_NOTHROW(validate_depth_order(padded.scene));
  CHECK_NOTHROW(check_general_position(padded.scene));
}

TEST_CASE("decimal parsing is exact") {
  CHECK(parse_decimal("0.1") == Rational(1, 10));
  CHECK(parse_decimal("-1.25e-3") == Rational(-1, 800));
  CHECK(parse_decimal("12") == 12);
  CHECK(parse_decimal("0.089") == Rational(89, 1000));
  CHECK(parse_decimal("3E2") == 300);
  CHECK_THROWS_AS(parse_decimal("1.2.3"), ValidationError);
  CHECK_THROWS_AS(parse_decimal("abc"), ValidationError);
}

TEST_CASE("back projection lands on the triangle plane") {
  std::vector<RTriangle3> t{{P(-2, -2, 2), P(2, -2, 2), P(0, 2, 2)}};
  const Scene s = Scene::from_rational(P(0, 0, 0), t, Scene::Frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
  // Plane point (1/2, 1/4) at unit distance maps to (1, 1/2, 2): coordinates scale by 2.
  const RPoint3 b = s.back_project(0, HPoint(2, 1, 4));
  CHECK(b == RPoint3{1, Rational(1, 2), 2});
}

#include <doctest.h>

#include <random>

#include "cfc/geometry.hpp"
#include "support/oracles.hpp"

using namespace cfc;
using cfc::testing::Coords;

namespace {
Point pt(std::int64_t x, std::int64_t y) { return {0, x, y}; }
}  // namespace

TEST_CASE("orient signs") {
  CHECK(orient(pt(0, 0), pt(1, 0), pt(0, 1)) == 1);
  CHECK(orient(pt(0, 0), pt(1, 1), pt(2, 2)) == 0);
  CHECK(orient(pt(0, 0), pt(0, 1), pt(1, 0)) == -1);
}

TEST_CASE("orient is exact at the coordinate limit") {
  const std::int64_t L = kCoordLimit;
  CHECK(orient(pt(-L, -L), pt(L, L - 1), pt(L, L)) == 1);
  CHECK(orient(pt(-L, -L), pt(L, L), pt(L - 1, L - 1)) == 0);
}

TEST_CASE("in_circle signs") {
  CHECK(in_circle(pt(2, 0), pt(0, 2), pt(-2, 0), pt(0, 0)) == 1);
  CHECK(in_circle(pt(2, 0), pt(0, 2), pt(-2, 0), pt(100, 100)) == -1);
  CHECK(in_circle(pt(1, 0), pt(0, 1), pt(-1, 0), pt(0, -1)) == 0);
}

TEST_CASE("in_circle near the coordinate limit does not overflow") {
  const std::int64_t L = kCoordLimit;
  CHECK(in_circle(pt(L, 0), pt(0, L), pt(-L, 0), pt(0, -L)) == 0);
  CHECK(in_circle(pt(L, 0), pt(0, L), pt(-L, 0), pt(0, -L + 1)) == 1);
}

TEST_CASE("segments_properly_cross") {
  CHECK(segments_properly_cross(pt(0, 0), pt(2, 2), pt(0, 2), pt(2, 0)));
  CHECK_FALSE(segments_properly_cross(pt(0, 0), pt(1, 0), pt(1, 0), pt(2, 1)));
  CHECK_FALSE(segments_properly_cross(pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1)));
}

TEST_CASE("predicate symmetries on random points") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> c(-50, 50);
  for (int iter = 0; iter < 2000; ++iter) {
    const Point p = pt(c(rng), c(rng)), q = pt(c(rng), c(rng)),
                r = pt(c(rng), c(rng)), s = pt(c(rng), c(rng));
    CHECK(orient(p, q, r) == -orient(q, p, r));
    CHECK(orient(p, q, r) == orient(q, r, p));
    if ((p.x != q.x || p.y != q.y) && (r.x != s.x || r.y != s.y)) {
      const bool x = segments_properly_cross(p, q, r, s);
      CHECK(x == segments_properly_cross(r, s, p, q));
      CHECK(x == segments_properly_cross(q, p, s, r));
    }
    if (orient(p, q, r) > 0) {
      CHECK(in_circle(p, q, r, s) == in_circle(q, r, p, s));
      CHECK(in_circle(p, q, r, s) == in_circle(r, p, q, s));
    }
  }
}

TEST_CASE("convex_hull") {
  SUBCASE("triangle") {
    const auto ps = testing::make_points({{0, 0}, {4, 0}, {0, 4}});
    CHECK(convex_hull(ps) == std::vector<VertexId>{0, 1, 2});
  }
  SUBCASE("interior point excluded") {
    const auto ps = testing::make_points({{-2, -1}, {2, -1}, {2, 1}, {-2, 2}, {0, 0}});
    CHECK(convex_hull(ps) == std::vector<VertexId>{0, 1, 2, 3});
  }
  SUBCASE("convex input keeps its cyclic order") {
    const auto ps = testing::make_points(testing::convex_coords(6));
    CHECK(convex_hull(ps) == std::vector<VertexId>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("random sets: hull turns left everywhere") {
    for (std::uint32_t seed = 1; seed <= 30; ++seed) {
      const auto ps = testing::make_points(testing::random_coords(12, seed));
      const auto h = convex_hull(ps);
      for (std::size_t i = 0; i < h.size(); ++i) {
        const auto a = h[i], b = h[(i + 1) % h.size()];
        for (int v = 0; v < ps.size(); ++v) {
          if (v != a && v != b) CHECK(orient(ps[a], ps[b], ps[v]) == 1);
        }
      }
    }
  }
}

TEST_CASE("validate_general_position") {
  auto collinear = validate_general_position(
      testing::make_points({{0, 0}, {1, 1}, {2, 2}, {5, 0}}));
  REQUIRE(collinear);
  CHECK(collinear->kind == ViolationKind::kCollinear);
  CHECK(collinear->tuple == std::vector<VertexId>{0, 1, 2});

  auto square = validate_general_position(
      testing::make_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  REQUIRE(square);
  CHECK(square->kind == ViolationKind::kCocircular);
  CHECK(square->tuple == std::vector<VertexId>{0, 1, 2, 3});

  CHECK_FALSE(validate_general_position(testing::make_points({{0, 0}, {4, 1}, {2, 5}})));

  auto dup = validate_general_position(testing::make_points({{0, 0}, {3, 1}, {0, 0}}));
  REQUIRE(dup);
  CHECK(dup->kind == ViolationKind::kDuplicate);
}

TEST_CASE("Geometry rejects invalid sets") {
  CHECK_THROWS_AS(testing::make_geometry({{0, 0}, {1, 1}}), GeometryError);
  CHECK_THROWS_AS(testing::make_geometry({{0, 0}, {1, 1}, {2, 2}}), GeometryError);
  CHECK_THROWS_AS(testing::make_geometry({{0, 0}, {kCoordLimit + 1, 0}, {0, 5}}),
                  GeometryError);
}

TEST_CASE("Geometry tables match the raw predicates") {
  const Coords c = testing::random_coords(9, 42);
  const Geometry g = testing::make_geometry(c);
  const auto& ps = g.points();
  const auto edges = testing::all_edges(9);
  for (const Edge& a : edges)
    for (const Edge& b : edges)
      CHECK(g.crosses(a, b) == testing::cross(ps, a, b));
  for (int p = 0; p < 9; ++p)
    for (int q = 0; q < 9; ++q)
      for (int r = 0; r < 9; ++r) {
        if (p == q || q == r || p == r) continue;
        std::uint64_t mask = 0;
        for (int s = 0; s < 9; ++s)
          if (s != p && s != q && s != r &&
              strictly_inside_triangle(ps[p], ps[q], ps[r], ps[s]))
            mask |= std::uint64_t{1} << s;
        CHECK(g.triangle_interior(p, q, r) == mask);
      }
}

TEST_CASE("strictly_inside on a concave polygon") {
  const auto ps = testing::make_points({{0, 0}, {10, 0}, {10, 10}, {5, 3}, {0, 10}, {5, 1}, {5, 8}});
  const std::vector<VertexId> poly = {0, 1, 2, 3, 4};
  CHECK(strictly_inside(ps, poly, ps[5]));
  CHECK_FALSE(strictly_inside(ps, poly, ps[6]));
  const std::vector<VertexId> cw = {4, 3, 2, 1, 0};
  CHECK(strictly_inside(ps, cw, ps[5]));
  CHECK(doubled_signed_area(ps, poly) > 0);
  CHECK(doubled_signed_area(ps, cw) < 0);
}

TEST_CASE("angle flip criterion matches incircle on convex quadrilaterals") {
  int convex = 0;
  for (std::uint32_t seed = 1; convex < 300; ++seed) {
    const auto g = testing::make_geometry(testing::random_coords(4, 7000 + seed));
    for (VertexId a = 0; a < 4; ++a) {
      for (VertexId b = a + 1; b < 4; ++b) {
        std::vector<VertexId> rest;
        for (VertexId x = 0; x < 4; ++x)
          if (x != a && x != b) rest.push_back(x);
        const VertexId p = rest[0], q = rest[1];
        if (!segments_properly_cross(g[a], g[b], g[p], g[q])) continue;
        ++convex;
        const bool ccw = g.orient(a, b, p) > 0;
        const int inside = ccw ? in_circle(g[a], g[b], g[p], g[q]) : in_circle(g[b], g[a], g[p], g[q]);
        CHECK(g.flip_improves(a, b, p, q) == (inside > 0));
      }
    }
  }
}

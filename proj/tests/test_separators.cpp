#include <doctest.h>

#include <map>
#include <set>

#include "cfc/separators.hpp"
#include "support/oracles.hpp"

using namespace cfc;
using cfc::testing::Coords;

namespace {

using Key = std::pair<int, std::vector<VertexId>>;

// Lexicographically smallest rotation/reflection of a cycle, or direction of
// a path.
Key smallest_form(const Separator& s) {
  const auto& q = s.sequence;
  std::vector<VertexId> best = q;
  if (s.kind == SeparatorKind::kPath) {
    best = std::min(q, std::vector<VertexId>(q.rbegin(), q.rend()));
  } else {
    for (int dir = 0; dir < 2; ++dir) {
      std::vector<VertexId> base = q;
      if (dir) std::reverse(base.begin(), base.end());
      for (std::size_t r = 0; r < base.size(); ++r) {
        std::vector<VertexId> rot(base.begin() + r, base.end());
        rot.insert(rot.end(), base.begin(), base.begin() + r);
        best = std::min(best, rot);
      }
    }
  }
  return {static_cast<int>(s.kind), best};
}

// Every ordered selection of distinct region vertices, tried both as a cycle
// and as a path, filtered by is_valid_separator.
std::set<Key> naive_separators(const Geometry& g, const Region& r) {
  const int max_size = separator_size_bound(r.size());
  std::set<Key> out;
  std::vector<VertexId> pick;
  std::vector<bool> taken(r.vertices.size(), false);
  std::function<void()> rec = [&]() {
    if (pick.size() >= 2) {
      for (auto kind : {SeparatorKind::kCycle, SeparatorKind::kPath}) {
        Separator s{kind, pick};
        if (is_valid_separator(g, r, s)) out.insert(smallest_form(s));
      }
    }
    if (static_cast<int>(pick.size()) == max_size) return;
    for (std::size_t i = 0; i < r.vertices.size(); ++i) {
      if (taken[i]) continue;
      taken[i] = true;
      pick.push_back(r.vertices[i]);
      rec();
      pick.pop_back();
      taken[i] = false;
    }
  };
  rec();
  return out;
}

std::vector<Triangulation> all_triangulations(const Geometry& g, const Region& r) {
  std::vector<Triangulation> out;
  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

bool contains_all(const Triangulation& t, const std::vector<Edge>& edges) {
  for (const Edge& e : edges) {
    if (!t.has_edge(e)) return false;
  }
  return true;
}

// Apex per base edge and side, read off a triangulation that contains `s`.
std::vector<std::array<VertexId, 2>> apexes_in(const Geometry& g, const Triangulation& t,
                                               const Separator& s) {
  const auto& seq = s.sequence;
  const bool left_first = s.kind == SeparatorKind::kPath ||
                          doubled_signed_area(g.points(), seq) > 0;
  std::vector<std::array<VertexId, 2>> out;
  for (std::size_t i = 0; i < s.edges().size(); ++i) {
    const VertexId a = seq[i], b = seq[(i + 1) % seq.size()];
    std::array<VertexId, 2> apex{-1, -1};
    for (const Tri& tri : t.triangles) {
      for (int k = 0; k < 3; ++k) {
        const Edge e(tri[k], tri[(k + 1) % 3]);
        if (e != Edge(a, b)) continue;
        const VertexId c = tri[(k + 2) % 3];
        const bool left = g.orient(a, b, c) > 0;
        apex[left == left_first ? 0 : 1] = c;
      }
    }
    out.push_back(apex);
  }
  return out;
}

Coords nine_point_coords() {
  // Hull triangle with six interior points.
  return {{0, 0}, {100, 3}, {48, 97}, {30, 20}, {62, 24}, {50, 60},
          {40, 35}, {52, 38}, {45, 12}};
}

}  // namespace

TEST_CASE("bounds") {
  CHECK(separator_size_bound(3) == 4);
  CHECK(separator_size_bound(4) == 4);
  CHECK(separator_size_bound(9) == 6);
  CHECK(separator_size_bound(10) == 7);
  CHECK(separator_balance_bound(9) == 6);
  CHECK(separator_balance_bound(8) == 5);
}

TEST_CASE("bare triangle yields its own boundary cycle") {
  const auto g = testing::make_geometry({{0, 0}, {7, 1}, {2, 6}});
  const auto seps = collect_separators(g, hull_region(g));
  const Separator tri{SeparatorKind::kCycle, {0, 1, 2}};
  CHECK(std::find(seps.begin(), seps.end(), tri) != seps.end());
  const auto sides = separator_sides(g, hull_region(g), tri);
  REQUIRE(sides);
  CHECK(sides->strict == std::array<int, 2>{0, 0});
  CHECK_FALSE(sides->proper());
}

TEST_CASE("is_valid_separator examples") {
  const auto g = testing::make_geometry(nine_point_coords());
  const Region r = hull_region(g);
  REQUIRE(r.size() == 9);
  // Triangle 3-4-5 holds 6 and 7; outside are 0, 1, 2, 8.
  const Separator inner{SeparatorKind::kCycle, {3, 4, 5}};
  const auto sides = separator_sides(g, r, inner);
  REQUIRE(sides);
  CHECK(sides->strict == std::array<int, 2>{2, 4});
  CHECK(is_valid_separator(g, r, inner));

  // A hull edge as a path leaves 7 > 6 vertices on one side.
  CHECK_FALSE(is_valid_separator(g, r, {SeparatorKind::kPath, {0, 1}}));
  // Self-crossing walk.
  int bowties = 0;
  for (VertexId a = 0; a < 9; ++a)
    for (VertexId b = 0; b < 9; ++b)
      for (VertexId c = 0; c < 9; ++c)
        for (VertexId d = 0; d < 9; ++d) {
          if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
          if (!g.crosses({a, b}, {c, d})) continue;
          ++bowties;
          CHECK_FALSE(is_valid_separator(g, r, {SeparatorKind::kCycle, {a, b, c, d}}));
        }
  CHECK(bowties > 0);
  // Repeated vertex, unknown vertex, path with an interior endpoint.
  CHECK_FALSE(is_valid_separator(g, r, {SeparatorKind::kCycle, {3, 4, 3}}));
  CHECK_FALSE(is_valid_separator(g, r, {SeparatorKind::kCycle, {3, 4, 40}}));
  CHECK_FALSE(is_valid_separator(g, r, {SeparatorKind::kPath, {0, 6, 5}}));
}

TEST_CASE("canonical forms") {
  CHECK(canonical({SeparatorKind::kCycle, {5, 2, 7, 3}}).sequence ==
        std::vector<VertexId>{2, 5, 3, 7});
  CHECK(canonical({SeparatorKind::kCycle, {5, 7, 2, 3}}).sequence ==
        std::vector<VertexId>{2, 3, 5, 7});
  CHECK(canonical({SeparatorKind::kPath, {9, 1, 4}}).sequence ==
        std::vector<VertexId>{4, 1, 9});
}

TEST_CASE("enumeration equals the naive subsets-and-permutations enumerator") {
  std::vector<Coords> sets = {testing::convex_coords(6), nine_point_coords()};
  for (std::uint32_t seed = 1; seed <= 6; ++seed) {
    sets.push_back(testing::random_coords(6 + seed % 3, seed));
  }
  for (const Coords& c : sets) {
    const auto g = testing::make_geometry(c);
    const Region r = hull_region(g);
    std::set<Key> got;
    for (const Separator& s : collect_separators(g, r)) {
      CHECK(canonical(s) == s);
      CHECK(got.insert(smallest_form(s)).second);
      CHECK(smallest_form(s).second == s.sequence);
    }
    if (r.size() <= 8) CHECK(got == naive_separators(g, r));
  }
}

TEST_CASE("size and balance on constrained and filled regions") {
  const auto g = testing::make_geometry(
      {{0, 0}, {40, 2}, {43, 37}, {3, 41}, {15, 14}, {27, 13}, {26, 25}, {14, 27}, {35, 20}});
  Region r = constrained_region(g, {0, 1, 2, 3, 4, 5, 6, 7, 8},
                                {{4, 5}, {5, 6}, {6, 7}, {4, 7}});
  r.holes = {{4, 5, 6, 7}};
  CHECK_THROWS_AS(collect_separators(g, r), InvalidRegion);
  r = triangulate_holes(g, r);
  const auto seps = collect_separators(g, r);
  CHECK_FALSE(seps.empty());
  for (const Separator& s : seps) {
    CHECK(s.size() <= separator_size_bound(r.size()));
    const auto sides = separator_sides(g, r, s);
    REQUIRE(sides);
    CHECK(sides->strict[0] <= 6);
    CHECK(sides->strict[1] <= 6);
    for (const Edge& e : s.edges())
      for (const Edge& m : r.mandatory) CHECK_FALSE(g.crosses(e, m));
  }
  CHECK(std::set<Key>{} != naive_separators(g, r));
  std::set<Key> got;
  for (const Separator& s : seps) got.insert(smallest_form(s));
  CHECK(got == naive_separators(g, r));
}

TEST_CASE("coverage: every triangulation contains a separator and its fattening") {
  std::vector<Coords> sets = {testing::convex_coords(8), nine_point_coords()};
  for (std::uint32_t seed = 20; seed <= 27; ++seed) {
    sets.push_back(testing::random_coords(6 + seed % 3, seed));
  }
  for (const Coords& c : sets) {
    const auto g = testing::make_geometry(c);
    const Region r = hull_region(g);
    const auto seps = collect_separators(g, r);
    for (const Triangulation& t : all_triangulations(g, r)) {
      bool found = false;
      for (const Separator& s : seps) {
        if (!contains_all(t, s.edges())) continue;
        const auto want = apexes_in(g, t, s);
        bool fat_found = false;
        enumerate_fattenings(g, r, s, [&](const FatSeparator& f) {
          fat_found = fat_found || f.apex == want;
          return !fat_found;
        });
        CHECK(fat_found);
        found = true;
        break;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("fattenings are exactly the attachment tuples of containing triangulations") {
  for (std::uint32_t seed = 40; seed <= 45; ++seed) {
    const auto g = testing::make_geometry(testing::random_coords(7, seed));
    const Region r = hull_region(g);
    const auto tris = all_triangulations(g, r);
    const auto seps = collect_separators(g, r);
    for (std::size_t k = 0; k < seps.size(); k += 3) {
      const Separator& s = seps[k];
      std::set<std::vector<std::array<VertexId, 2>>> expected, got;
      for (const Triangulation& t : tris) {
        if (contains_all(t, s.edges())) expected.insert(apexes_in(g, t, s));
      }
      enumerate_fattenings(g, r, s, [&](const FatSeparator& f) {
        CHECK(got.insert(f.apex).second);
        return true;
      });
      CHECK(got == expected);
    }
  }
}

TEST_CASE("triangles_overlap") {
  const auto g = testing::make_geometry({{0, 0}, {10, 0}, {1, 11}, {12, 9}, {3, 2}, {20, 1}});
  CHECK(triangles_overlap(g, {0, 1, 2}, {0, 1, 2}));
  CHECK_FALSE(triangles_overlap(g, {0, 1, 2}, {1, 3, 2}));
  CHECK(triangles_overlap(g, {0, 1, 2}, {0, 1, 3}));
  CHECK(triangles_overlap(g, {0, 1, 2}, {2, 4, 5}));
  CHECK(triangles_overlap(g, {0, 1, 3}, {4, 1, 2}));
  CHECK_FALSE(triangles_overlap(g, {0, 1, 4}, {1, 5, 3}));
}

TEST_CASE("split_region") {
  SUBCASE("path across a convex polygon") {
    const auto g = testing::make_geometry(testing::convex_coords(7));
    const Region r = hull_region(g);
    const auto split = split_region(g, r, Separator{SeparatorKind::kPath, {1, 4}});
    REQUIRE(split.subregions.size() == 2);
    CHECK(split.subregions[0].vertices == std::vector<VertexId>{0, 1, 4, 5, 6});
    CHECK(split.subregions[1].vertices == std::vector<VertexId>{1, 2, 3, 4});
    CHECK(count_triangulations_exact(g, split.subregions[0]) == 5);
    CHECK(count_triangulations_exact(g, split.subregions[1]) == 2);
  }
  SUBCASE("outer boundary as a cycle") {
    const auto g = testing::make_geometry(nine_point_coords());
    const Region r = hull_region(g);
    const auto split = split_region(g, r, Separator{SeparatorKind::kCycle, {0, 1, 2}});
    CHECK(split.subregions[0].vertices == r.vertices);
    CHECK(split.subregions[1].vertices == std::vector<VertexId>{0, 1, 2});
    CHECK(real_triangle_count(split.subregions[1]) == 0);
    CHECK(count_triangulations_exact(g, split.subregions[1]) == 1);
  }
  SUBCASE("invalid separator") {
    const auto g = testing::make_geometry(nine_point_coords());
    CHECK_THROWS_AS(split_region(g, hull_region(g), Separator{SeparatorKind::kPath, {0, 6, 5}}),
                    InvalidSeparator);
  }
  SUBCASE("products count the triangulations containing the separator") {
    std::vector<Coords> sets = {testing::convex_coords(8), nine_point_coords()};
    for (std::uint32_t seed = 60; seed <= 64; ++seed)
      sets.push_back(testing::random_coords(8, seed));
    for (const Coords& c : sets) {
      const auto g = testing::make_geometry(c);
      const Region r = hull_region(g);
      const auto tris = all_triangulations(g, r);
      for (const Separator& s : collect_separators(g, r)) {
        std::map<std::vector<std::array<VertexId, 2>>, long> per_fat;
        long containing = 0;
        for (const Triangulation& t : tris) {
          if (!contains_all(t, s.edges())) continue;
          ++containing;
          ++per_fat[apexes_in(g, t, s)];
        }
        const auto split = split_region(g, r, s);
        // Conservation: side vertices plus shared separator vertices.
        const auto sides = separator_sides(g, r, s);
        REQUIRE(sides);
        CHECK(split.subregions[0].size() == sides->strict[0] + s.size());
        CHECK(split.subregions[1].size() == sides->strict[1] + s.size());
        Count product = 1;
        for (const Region& sub : split.subregions) product *= count_triangulations_exact(g, sub);
        CHECK(product == containing);
        enumerate_fattenings(g, r, s, [&](const FatSeparator& f) {
          const auto fs = split_region(g, r, f);
          Count p = 1;
          for (const Region& sub : fs.subregions) p *= count_triangulations_exact(g, sub);
          CHECK(p == per_fat[f.apex]);
          return true;
        });
      }
    }
  }
}

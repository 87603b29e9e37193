#include "cfc/triangulation.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <unordered_map>

namespace cfc {

namespace {

std::uint64_t bit(VertexId v) { return std::uint64_t{1} << v; }

template <typename T>
bool sorted_contains(const std::vector<T>& xs, const T& x) {
  return std::binary_search(xs.begin(), xs.end(), x);
}

std::vector<VertexId> hull_of(const Geometry& g, std::vector<VertexId> ids) {
  std::sort(ids.begin(), ids.end(), [&](VertexId a, VertexId b) {
    return g[a].x != g[b].x ? g[a].x < g[b].x : g[a].y < g[b].y;
  });
  std::vector<VertexId> hull(2 * ids.size());
  std::size_t k = 0;
  for (VertexId id : ids) {
    while (k >= 2 && g.orient(hull[k - 2], hull[k - 1], id) <= 0) --k;
    hull[k++] = id;
  }
  const std::size_t lower = k + 1;
  for (auto it = ids.rbegin() + 1; it != ids.rend(); ++it) {
    while (k >= lower && g.orient(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  std::rotate(hull.begin(), std::min_element(hull.begin(), hull.end()), hull.end());
  return hull;
}

// Depth-first triangulation builder. The frontier holds the directed edges
// whose left side is still untriangulated; the next triangle is always the
// one on the left of the smallest frontier edge, so every triangulation is
// reached along exactly one path.
class FrontierSearch {
 public:
  FrontierSearch(const Geometry& g, const Region& r)
      : g_(g), vmask_(r.vertex_mask()), out_(g.n(), 0) {
    auto add_cycle = [&](const std::vector<VertexId>& cyc, bool reversed) {
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        VertexId a = cyc[i], b = cyc[(i + 1) % cyc.size()];
        if (reversed) std::swap(a, b);
        insert(a, b);
      }
    };
    add_cycle(r.outer, false);
    for (const auto& h : r.holes) add_cycle(h, true);
    for (const Edge& e : r.mandatory) {
      if (on_cycle(r.outer, e)) continue;
      bool on_hole = false;
      for (const auto& h : r.holes) on_hole = on_hole || on_cycle(h, e);
      if (on_hole) continue;
      insert(e.u, e.v);
      insert(e.v, e.u);
    }
    for (const Tri& t : r.filler) place_fixed(t);
    for (const Tri& t : r.fixed) place_fixed(t);
  }

  bool done() const { return size_ == 0; }

  std::pair<VertexId, VertexId> smallest() const {
    for (VertexId u = 0; u < static_cast<VertexId>(out_.size()); ++u) {
      if (out_[u]) return {u, std::countr_zero(out_[u])};
    }
    return {-1, -1};
  }

  // Apex candidates for the triangle on the left of u->v.
  std::uint64_t candidates(VertexId u, VertexId v) const {
    std::uint64_t result = 0;
    for (std::uint64_t rest = vmask_ & ~bit(u) & ~bit(v); rest; rest &= rest - 1) {
      const VertexId c = std::countr_zero(rest);
      if (g_.orient(u, v, c) <= 0) continue;
      if (g_.triangle_interior(u, v, c) & vmask_) continue;
      if (!side_ok(v, c) || !side_ok(c, u)) continue;
      result |= bit(c);
    }
    return result;
  }

  struct Undo {
    VertexId u, v, c;
    std::array<bool, 2> closed;
  };

  Undo place(VertexId u, VertexId v, VertexId c) {
    Undo undo{u, v, c, {false, false}};
    erase(u, v);
    undo.closed[0] = toggle(v, c);
    undo.closed[1] = toggle(c, u);
    return undo;
  }

  void unplace(const Undo& undo) {
    untoggle(undo.c, undo.u, undo.closed[1]);
    untoggle(undo.v, undo.c, undo.closed[0]);
    insert(undo.u, undo.v);
  }

  // Canonical key of the untriangulated part.
  std::vector<std::uint64_t> key() const { return out_; }

 private:
  static bool on_cycle(const std::vector<VertexId>& cyc, Edge e) {
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (Edge(cyc[i], cyc[(i + 1) % cyc.size()]) == e) return true;
    }
    return false;
  }

  bool has(VertexId a, VertexId b) const { return (out_[a] >> b) & 1U; }
  void insert(VertexId a, VertexId b) {
    if (!has(a, b)) {
      out_[a] |= bit(b);
      ++size_;
    }
  }
  void erase(VertexId a, VertexId b) {
    if (has(a, b)) {
      out_[a] &= ~bit(b);
      --size_;
    }
  }

  // Directed triangle side a->b: closes a frontier edge, or opens b->a.
  bool toggle(VertexId a, VertexId b) {
    if (has(a, b)) {
      erase(a, b);
      return true;
    }
    insert(b, a);
    return false;
  }
  void untoggle(VertexId a, VertexId b, bool closed) {
    if (closed) {
      insert(a, b);
    } else {
      erase(b, a);
    }
  }

  void place_fixed(const Tri& t) {
    for (int i = 0; i < 3; ++i) toggle(t[i], t[(i + 1) % 3]);
  }

  bool side_ok(VertexId a, VertexId b) const {
    if (has(a, b)) return true;
    if (has(b, a)) return false;
    const Edge e(a, b);
    for (std::uint64_t rows = vmask_; rows; rows &= rows - 1) {
      const VertexId x = std::countr_zero(rows);
      for (std::uint64_t cols = out_[x]; cols; cols &= cols - 1) {
        const VertexId y = std::countr_zero(cols);
        if (g_.crosses(e, Edge(x, y))) return false;
      }
    }
    return true;
  }

  const Geometry& g_;
  std::uint64_t vmask_;
  std::vector<std::uint64_t> out_;
  int size_ = 0;
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (std::uint64_t w : k) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

bool enumerate_rec(FrontierSearch& fs, std::vector<Tri>& placed,
                   const std::function<bool(const std::vector<Tri>&)>& leaf) {
  if (fs.done()) return leaf(placed);
  const auto [u, v] = fs.smallest();
  for (std::uint64_t cands = fs.candidates(u, v); cands; cands &= cands - 1) {
    const VertexId c = std::countr_zero(cands);
    const auto undo = fs.place(u, v, c);
    placed.push_back({u, v, c});
    const bool go_on = enumerate_rec(fs, placed, leaf);
    placed.pop_back();
    fs.unplace(undo);
    if (!go_on) return false;
  }
  return true;
}

Count count_rec(FrontierSearch& fs,
                std::unordered_map<std::vector<std::uint64_t>, Count, KeyHash>& memo) {
  if (fs.done()) return 1;
  auto key = fs.key();
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const auto [u, v] = fs.smallest();
  Count total = 0;
  for (std::uint64_t cands = fs.candidates(u, v); cands; cands &= cands - 1) {
    const VertexId c = std::countr_zero(cands);
    const auto undo = fs.place(u, v, c);
    total += count_rec(fs, memo);
    fs.unplace(undo);
  }
  memo.emplace(std::move(key), total);
  return total;
}

}  // namespace

Tri canonical_ccw(const Geometry& g, Tri t) {
  if (g.orient(t[0], t[1], t[2]) < 0) std::swap(t[1], t[2]);
  std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
  return t;
}

bool Region::has_vertex(VertexId v) const { return sorted_contains(vertices, v); }
bool Region::is_mandatory(Edge e) const { return sorted_contains(mandatory, e); }
bool Region::is_synthetic(Edge e) const { return sorted_contains(synthetic, e); }

std::uint64_t Region::vertex_mask() const {
  std::uint64_t m = 0;
  for (VertexId v : vertices) m |= bit(v);
  return m;
}

Region hull_region(const Geometry& g) {
  std::vector<VertexId> all(g.n());
  for (int i = 0; i < g.n(); ++i) all[i] = i;
  return constrained_region(g, std::move(all), {});
}

Region constrained_region(const Geometry& g, std::vector<VertexId> vertices,
                          std::vector<Edge> constraints) {
  Region r;
  std::sort(vertices.begin(), vertices.end());
  r.vertices = vertices;
  r.outer = hull_of(g, vertices);
  for (std::size_t i = 0; i < r.outer.size(); ++i) {
    constraints.emplace_back(r.outer[i], r.outer[(i + 1) % r.outer.size()]);
  }
  std::sort(constraints.begin(), constraints.end());
  constraints.erase(std::unique(constraints.begin(), constraints.end()),
                    constraints.end());
  r.mandatory = std::move(constraints);
  return r;
}

void check_region(const Geometry& g, const Region& r) {
  for (std::size_t i = 0; i < r.mandatory.size(); ++i) {
    for (std::size_t j = i + 1; j < r.mandatory.size(); ++j) {
      if (g.crosses(r.mandatory[i], r.mandatory[j])) {
        throw InvalidRegion("mandatory edges cross");
      }
    }
  }
  auto check_cycle = [&](const std::vector<VertexId>& cyc) {
    for (VertexId v : cyc) {
      if (!r.has_vertex(v)) throw InvalidRegion("boundary vertex missing");
    }
  };
  check_cycle(r.outer);
  for (const auto& h : r.holes) check_cycle(h);
}

int triangle_count(const Region& r) {
  int boundary = static_cast<int>(r.outer.size());
  for (const auto& h : r.holes) boundary += static_cast<int>(h.size());
  const int holes = static_cast<int>(r.holes.size());
  return 2 * r.size() - boundary - 2 + 2 * holes;
}

int real_triangle_count(const Region& r) {
  return triangle_count(r) - static_cast<int>(r.filler.size());
}

bool Triangulation::has_edge(Edge e) const { return sorted_contains(edges, e); }

std::vector<int> Triangulation::incident(Edge e) const {
  std::vector<int> result;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const Tri& tri = triangles[t];
    for (int i = 0; i < 3; ++i) {
      if (Edge(tri[i], tri[(i + 1) % 3]) == e) result.push_back(static_cast<int>(t));
    }
  }
  return result;
}

void Triangulation::rebuild() {
  std::map<Edge, std::vector<std::pair<int, int>>> sides;
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int i = 0; i < 3; ++i) {
      sides[Edge(triangles[t][i], triangles[t][(i + 1) % 3])].emplace_back(
          static_cast<int>(t), i);
    }
  }
  edges.clear();
  neighbors.assign(triangles.size(), {-1, -1, -1});
  for (const auto& [e, s] : sides) {
    edges.push_back(e);
    if (s.size() == 2) {
      neighbors[s[0].first][s[0].second] = s[1].first;
      neighbors[s[1].first][s[1].second] = s[0].first;
    }
  }
}

void enumerate_triangulations(const Geometry& g, const Region& r,
                              const TriangulationVisitor& visit) {
  check_region(g, r);
  FrontierSearch fs(g, r);
  std::vector<Tri> placed;
  Triangulation t;
  t.vertices = r.vertices;
  enumerate_rec(fs, placed, [&](const std::vector<Tri>& tris) {
    t.triangles = r.filler;
    t.triangles.insert(t.triangles.end(), r.fixed.begin(), r.fixed.end());
    t.triangles.insert(t.triangles.end(), tris.begin(), tris.end());
    t.rebuild();
    return visit(t);
  });
}

Count count_triangulations_exact(const Geometry& g, const Region& r) {
  check_region(g, r);
  FrontierSearch fs(g, r);
  std::unordered_map<std::vector<std::uint64_t>, Count, KeyHash> memo;
  return count_rec(fs, memo);
}

namespace {

// Apexes of the two triangles incident to e, or nullopt for a boundary edge.
std::optional<std::pair<VertexId, VertexId>> apexes(const Triangulation& t, Edge e) {
  const auto inc = t.incident(e);
  if (inc.size() < 2) return std::nullopt;
  auto apex = [&](int idx) {
    for (VertexId v : t.triangles[idx]) {
      if (v != e.u && v != e.v) return v;
    }
    return VertexId{-1};
  };
  return std::make_pair(apex(inc[0]), apex(inc[1]));
}

}  // namespace

bool is_flippable(const Geometry& g, const Triangulation& t, Edge e) {
  if (!t.has_edge(e)) throw MissingEdge("edge not in triangulation");
  const auto ap = apexes(t, e);
  if (!ap) return false;
  return g.flip_improves(e.u, e.v, ap->first, ap->second);
}

void flip(const Geometry& g, Triangulation& t, Edge e) {
  const auto inc = t.incident(e);
  if (inc.size() != 2) throw MissingEdge("edge has fewer than two triangles");
  const auto ap = apexes(t, e);
  const VertexId p = ap->first, q = ap->second;
  assert(segments_properly_cross(g[e.u], g[e.v], g[p], g[q]));
  t.triangles[inc[0]] = canonical_ccw(g, {p, q, e.u});
  t.triangles[inc[1]] = canonical_ccw(g, {p, q, e.v});
  t.rebuild();
}

void flip_to_fixpoint(const Geometry& g, Triangulation& t,
                      const std::vector<Edge>& keep) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Edge& e : t.edges) {
      if (sorted_contains(keep, e)) continue;
      if (is_flippable(g, t, e)) {
        flip(g, t, e);
        changed = true;
        break;
      }
    }
  }
}

Triangulation cdt(const Geometry& g, const Region& r) {
  std::optional<Triangulation> first;
  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    first = t;
    return false;
  });
  if (!first) throw InvalidRegion("region has no triangulation");
  std::vector<Edge> keep = r.mandatory;
  for (const Tri& tri : r.fixed) {
    for (int i = 0; i < 3; ++i) keep.emplace_back(tri[i], tri[(i + 1) % 3]);
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  flip_to_fixpoint(g, *first, keep);
  return *first;
}

Triangulation cdt(const Geometry& g, std::vector<VertexId> vertices,
                  std::vector<Edge> constraints) {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    for (std::size_t j = i + 1; j < constraints.size(); ++j) {
      if (g.crosses(constraints[i], constraints[j])) {
        throw InvalidConstraints("constraint edges cross");
      }
    }
  }
  return cdt(g, constrained_region(g, std::move(vertices), std::move(constraints)));
}

bool is_legal_cdt(const Geometry& g, const Triangulation& t,
                  const std::vector<Edge>& s) {
  for (const Edge& e : s) {
    if (!t.has_edge(e)) throw MissingEdge("constraint not in triangulation");
  }
  std::vector<Edge> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : t.edges) {
    if (!sorted_contains(sorted, e) && is_flippable(g, t, e)) return false;
  }
  return true;
}

Region triangulate_holes(const Geometry& g, Region r) {
  for (const auto& hole : r.holes) {
    Region inner;
    inner.vertices = hole;
    std::sort(inner.vertices.begin(), inner.vertices.end());
    inner.outer = hole;
    for (std::size_t i = 0; i < hole.size(); ++i) {
      inner.mandatory.emplace_back(hole[i], hole[(i + 1) % hole.size()]);
    }
    std::sort(inner.mandatory.begin(), inner.mandatory.end());
    const Triangulation t = cdt(g, inner);
    for (const Edge& e : t.edges) {
      if (!inner.is_mandatory(e)) {
        r.mandatory.push_back(e);
        r.synthetic.push_back(e);
      }
    }
    for (const Tri& tri : t.triangles) r.filler.push_back(canonical_ccw(g, tri));
  }
  r.holes.clear();
  std::sort(r.mandatory.begin(), r.mandatory.end());
  r.mandatory.erase(std::unique(r.mandatory.begin(), r.mandatory.end()),
                    r.mandatory.end());
  std::sort(r.synthetic.begin(), r.synthetic.end());
  return r;
}

}  // namespace cfc

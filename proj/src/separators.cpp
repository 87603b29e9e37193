#include "cfc/separators.hpp"

#include <algorithm>
#include <bit>

namespace cfc {

namespace {

std::uint64_t bit(VertexId v) { return std::uint64_t{1} << v; }

bool has_bit(std::uint64_t mask, VertexId v) { return (mask >> v) & 1U; }

std::uint64_t outer_mask(const Region& r) {
  std::uint64_t m = 0;
  for (VertexId v : r.outer) m |= bit(v);
  return m;
}

bool on_cycle(const std::vector<VertexId>& cyc, Edge e) {
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    if (Edge(cyc[i], cyc[(i + 1) % cyc.size()]) == e) return true;
  }
  return false;
}

// Outer vertices strictly between `from` and `to`, walking counter-clockwise.
std::vector<VertexId> outer_arc(const Region& r, VertexId from, VertexId to) {
  const auto k = r.outer.size();
  std::size_t i = std::find(r.outer.begin(), r.outer.end(), from) - r.outer.begin();
  std::vector<VertexId> arc;
  for (i = (i + 1) % k; r.outer[i] != to; i = (i + 1) % k) arc.push_back(r.outer[i]);
  return arc;
}

// The boundary of side 0 (ccw for paths; as given for cycles) and of side 1
// for paths.
struct SidePolygons {
  std::vector<VertexId> first;
  std::vector<VertexId> second;
  std::vector<VertexId> first_arc;
};

SidePolygons side_polygons(const Region& r, const Separator& s) {
  SidePolygons p;
  p.first = s.sequence;
  if (s.kind == SeparatorKind::kCycle) return p;
  const VertexId h1 = s.sequence.front(), h2 = s.sequence.back();
  p.first_arc = outer_arc(r, h2, h1);
  p.first.insert(p.first.end(), p.first_arc.begin(), p.first_arc.end());
  p.second.assign(s.sequence.rbegin(), s.sequence.rend());
  const auto arc = outer_arc(r, h1, h2);
  p.second.insert(p.second.end(), arc.begin(), arc.end());
  return p;
}

int count_fillers_inside(const Geometry& g, const Region& r,
                         const std::vector<VertexId>& poly) {
  int k = 0;
  for (const Tri& t : r.filler) k += centroid_strictly_inside(g.points(), poly, t);
  return k;
}

// Walk structure checks shared by validation and splitting.
bool well_formed(const Geometry& g, const Region& r, const Separator& s,
                 const std::vector<std::uint64_t>& usable) {
  const bool cycle = s.kind == SeparatorKind::kCycle;
  const int k = s.size();
  if (k < (cycle ? 3 : 2)) return false;
  std::uint64_t seen = 0;
  for (VertexId v : s.sequence) {
    if (v < 0 || v >= g.n() || !r.has_vertex(v) || has_bit(seen, v)) return false;
    seen |= bit(v);
  }
  const auto edges = s.edges();
  for (const Edge& e : edges) {
    if (!has_bit(usable[e.u], e.v)) return false;
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j)
      if (g.crosses(edges[i], edges[j])) return false;
  if (!cycle) {
    const std::uint64_t om = outer_mask(r);
    if (!has_bit(om, s.sequence.front()) || !has_bit(om, s.sequence.back())) return false;
    for (int i = 1; i + 1 < k; ++i) {
      if (has_bit(om, s.sequence[i])) return false;
    }
  }
  return true;
}

void require_no_holes(const Region& r) {
  if (!r.holes.empty()) throw InvalidRegion("separators need a region without open holes");
}

}  // namespace

std::vector<Edge> Separator::edges() const {
  std::vector<Edge> out;
  const std::size_t k = sequence.size();
  for (std::size_t i = 0; i + 1 < k; ++i) out.emplace_back(sequence[i], sequence[i + 1]);
  if (kind == SeparatorKind::kCycle && k >= 3) out.emplace_back(sequence.back(), sequence.front());
  return out;
}

Separator canonical(Separator s) {
  auto& q = s.sequence;
  if (q.empty()) return s;
  if (s.kind == SeparatorKind::kPath) {
    if (q.back() < q.front()) std::reverse(q.begin(), q.end());
    return s;
  }
  std::rotate(q.begin(), std::min_element(q.begin(), q.end()), q.end());
  if (q.size() >= 3 && q.back() < q[1]) std::reverse(q.begin() + 1, q.end());
  return s;
}

int separator_size_bound(int m) {
  int k = 0;
  while (k * k < 4 * m) ++k;
  return k;
}

int separator_balance_bound(int m) { return 2 * m / 3; }

SeparatorLimits SeparatorLimits::for_region(const Region& r) {
  return {separator_size_bound(r.size()), separator_balance_bound(r.size())};
}

std::vector<std::uint64_t> usable_edges(const Geometry& g, const Region& r) {
  std::vector<std::uint64_t> adj(g.n(), 0);
  const auto& ps = g.points();
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < r.vertices.size(); ++j) {
      const Edge e(r.vertices[i], r.vertices[j]);
      bool ok = r.is_mandatory(e);
      if (!ok) {
        ok = midpoint_strictly_inside(ps, r.outer, e.u, e.v);
        for (const auto& h : r.holes) ok = ok && !midpoint_strictly_inside(ps, h, e.u, e.v);
        for (std::size_t m = 0; ok && m < r.mandatory.size(); ++m) {
          ok = !g.crosses(e, r.mandatory[m]);
        }
      }
      if (ok) {
        adj[e.u] |= bit(e.v);
        adj[e.v] |= bit(e.u);
      }
    }
  }
  return adj;
}

namespace {

std::optional<SideCounts> sides_with(const Geometry& g, const Region& r,
                                     const Separator& s,
                                     const std::vector<std::uint64_t>& usable) {
  if (!well_formed(g, r, s, usable)) return std::nullopt;
  const auto& ps = g.points();
  const auto poly = side_polygons(r, s);
  std::uint64_t boundary = 0;
  for (VertexId v : poly.first) boundary |= bit(v);
  int inside = 0;
  for (VertexId v : r.vertices) {
    if (!has_bit(boundary, v) && strictly_inside(ps, poly.first, ps[v])) ++inside;
  }
  SideCounts c;
  c.strict[0] = inside + static_cast<int>(poly.first_arc.size());
  c.strict[1] = r.size() - s.size() - c.strict[0];
  const int tris = static_cast<int>(poly.first.size()) + 2 * inside - 2;
  c.real_triangles[0] = tris - count_fillers_inside(g, r, poly.first);
  c.real_triangles[1] = real_triangle_count(r) - c.real_triangles[0];
  return c;
}

bool valid_with(const Geometry& g, const Region& r, const Separator& s,
                const SeparatorLimits& lim, const std::vector<std::uint64_t>& usable) {
  if (s.size() > lim.max_size) return false;
  const auto c = sides_with(g, r, s, usable);
  return c && c->strict[0] <= lim.max_side && c->strict[1] <= lim.max_side;
}

}  // namespace

std::optional<SideCounts> separator_sides(const Geometry& g, const Region& r,
                                          const Separator& s) {
  require_no_holes(r);
  return sides_with(g, r, s, usable_edges(g, r));
}

bool is_valid_separator(const Geometry& g, const Region& r, const Separator& s,
                        std::optional<SeparatorLimits> limits) {
  require_no_holes(r);
  return valid_with(g, r, s, limits.value_or(SeparatorLimits::for_region(r)),
                    usable_edges(g, r));
}

void enumerate_separators(const Geometry& g, const Region& r,
                          const SeparatorVisitor& visit,
                          std::optional<SeparatorLimits> limits) {
  enumerate_separators_with_sides(
      g, r, [&](const Separator& s, const SideCounts&) { return visit(s); }, limits);
}

void enumerate_separators_with_sides(const Geometry& g, const Region& r,
                                     const SeparatorSidesVisitor& visit,
                                     std::optional<SeparatorLimits> limits) {
  require_no_holes(r);
  const SeparatorLimits lim = limits.value_or(SeparatorLimits::for_region(r));
  const auto usable = usable_edges(g, r);
  const std::uint64_t om = outer_mask(r);
  std::vector<VertexId> walk;
  std::vector<Edge> walk_edges;
  std::uint64_t used = 0;
  bool stop = false;

  auto crosses_walk = [&](Edge e) {
    for (const Edge& w : walk_edges) {
      if (g.crosses(e, w)) return true;
    }
    return false;
  };
  auto offer = [&](SeparatorKind kind) {
    Separator s{kind, walk};
    if (s.size() > lim.max_size) return;
    const auto c = sides_with(g, r, s, usable);
    if (!c || c->strict[0] > lim.max_side || c->strict[1] > lim.max_side) return;
    if (!visit(s, *c)) stop = true;
  };

  // Cycles: smallest vertex first, second vertex smaller than the last.
  std::function<void(VertexId)> grow_cycle = [&](VertexId start) {
    const VertexId x = walk.back();
    for (std::uint64_t next = usable[x] & ~used; next && !stop; next &= next - 1) {
      const VertexId y = std::countr_zero(next);
      if (y < start) continue;
      const Edge e(x, y);
      if (crosses_walk(e)) continue;
      walk.push_back(y);
      walk_edges.push_back(e);
      used |= bit(y);
      if (walk.size() >= 3 && walk[1] < y && has_bit(usable[y], start) &&
          !crosses_walk(Edge(y, start))) {
        offer(SeparatorKind::kCycle);
      }
      if (static_cast<int>(walk.size()) < lim.max_size) grow_cycle(start);
      used &= ~bit(y);
      walk_edges.pop_back();
      walk.pop_back();
    }
  };
  for (VertexId s : r.vertices) {
    if (stop) return;
    walk = {s};
    used = bit(s);
    grow_cycle(s);
  }

  // Paths: outer endpoints h1 < h2, interior vertices off the outer boundary.
  std::function<void(VertexId)> grow_path = [&](VertexId start) {
    const VertexId x = walk.back();
    for (std::uint64_t next = usable[x] & ~used; next && !stop; next &= next - 1) {
      const VertexId y = std::countr_zero(next);
      const bool ends = has_bit(om, y);
      if (ends && y < start) continue;
      const Edge e(x, y);
      if (crosses_walk(e)) continue;
      walk.push_back(y);
      walk_edges.push_back(e);
      used |= bit(y);
      if (ends) {
        offer(SeparatorKind::kPath);
      } else if (static_cast<int>(walk.size()) < lim.max_size) {
        grow_path(start);
      }
      used &= ~bit(y);
      walk_edges.pop_back();
      walk.pop_back();
    }
  };
  std::vector<VertexId> starts(r.outer.begin(), r.outer.end());
  std::sort(starts.begin(), starts.end());
  for (VertexId s : starts) {
    if (stop) return;
    walk = {s};
    walk_edges.clear();
    used = bit(s);
    grow_path(s);
  }
}

std::vector<Separator> collect_separators(const Geometry& g, const Region& r,
                                          std::optional<SeparatorLimits> limits) {
  std::vector<Separator> out;
  enumerate_separators(g, r, [&](const Separator& s) {
    out.push_back(s);
    return true;
  }, limits);
  return out;
}

std::vector<Tri> FatSeparator::attachments(const Geometry& g) const {
  std::vector<Tri> out;
  const auto edges = base.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (VertexId c : apex[i]) {
      if (c < 0) continue;
      const Tri t = canonical_ccw(g, {edges[i].u, edges[i].v, c});
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  }
  return out;
}

bool triangles_overlap(const Geometry& g, const Tri& a, const Tri& b) {
  auto sorted = [](Tri t) {
    std::sort(t.begin(), t.end());
    return t;
  };
  if (sorted(a) == sorted(b)) return true;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Edge ea(a[i], a[(i + 1) % 3]), eb(b[j], b[(j + 1) % 3]);
      if (ea.u == eb.u || ea.u == eb.v || ea.v == eb.u || ea.v == eb.v) {
        if (ea == eb) {
          const VertexId ca = a[(i + 2) % 3], cb = b[(j + 2) % 3];
          if (g.orient(ea.u, ea.v, ca) == g.orient(ea.u, ea.v, cb)) return true;
        }
        continue;
      }
      if (g.crosses(ea, eb)) return true;
    }
  }
  auto inside = [&](const Tri& t, VertexId v) {
    return has_bit(g.triangle_interior(t[0], t[1], t[2]), v);
  };
  for (int i = 0; i < 3; ++i) {
    if (inside(a, b[i]) || inside(b, a[i])) return true;
  }
  return false;
}

void enumerate_fattenings(const Geometry& g, const Region& r, const Separator& base,
                          const FatSeparatorVisitor& visit,
                          const std::vector<std::uint64_t>* usable_hint) {
  require_no_holes(r);
  const auto usable = usable_hint ? *usable_hint : usable_edges(g, r);
  const auto edges = base.edges();
  const auto& seq = base.sequence;
  const std::uint64_t vmask = r.vertex_mask();
  // Side 0 lies to the left of seq[i] -> seq[i+1] when the side-0 polygon is
  // counter-clockwise.
  bool left_is_first = true;
  if (base.kind == SeparatorKind::kCycle) {
    left_is_first = doubled_signed_area(g.points(), seq) > 0;
  }

  // candidates[i][side]
  std::vector<std::array<std::vector<VertexId>, 2>> cands(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const VertexId a = seq[i], b = seq[(i + 1) % seq.size()];
    const bool boundary = on_cycle(r.outer, Edge(a, b));
    for (int side = 0; side < 2; ++side) {
      const int want = (side == 0) == left_is_first ? 1 : -1;  // orient(a,b,c)
      // The exterior of an outer edge (right of its ccw direction) is absent.
      if (boundary) {
        const auto it = std::find(r.outer.begin(), r.outer.end(), a);
        const bool forward = r.outer[(it - r.outer.begin() + 1) % r.outer.size()] == b;
        if ((want > 0) != forward) continue;
      }
      for (std::uint64_t rest = vmask & ~bit(a) & ~bit(b); rest; rest &= rest - 1) {
        const VertexId c = std::countr_zero(rest);
        if (g.orient(a, b, c) != want) continue;
        if (g.triangle_interior(a, b, c) & vmask) continue;
        if (!has_bit(usable[a], c) || !has_bit(usable[b], c)) continue;
        bool ok = true;
        for (const Edge& e : edges) {
          ok = ok && !g.crosses(e, Edge(a, c)) && !g.crosses(e, Edge(b, c));
        }
        if (ok) cands[i][side].push_back(c);
      }
      if (cands[i][side].empty()) return;  // no triangulation contains `base`
    }
  }

  FatSeparator fat{base, std::vector<std::array<VertexId, 2>>(edges.size(), {-1, -1})};
  std::array<std::vector<Tri>, 2> chosen;
  bool stop = false;
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int side) {
    if (stop) return;
    if (i == edges.size()) {
      if (!visit(fat)) stop = true;
      return;
    }
    const std::size_t ni = side == 1 ? i + 1 : i;
    const int nside = 1 - side;
    const VertexId a = seq[i], b = seq[(i + 1) % seq.size()];
    if (cands[i][side].empty()) {  // side outside the region
      rec(ni, nside);
      return;
    }
    for (VertexId c : cands[i][side]) {
      const Tri t = canonical_ccw(g, {a, b, c});
      bool ok = true;
      bool repeat = false;
      for (const Tri& u : chosen[side]) {
        if (u == t) {
          repeat = true;
        } else if (triangles_overlap(g, u, t)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      fat.apex[i][side] = c;
      if (!repeat) chosen[side].push_back(t);
      rec(ni, nside);
      if (!repeat) chosen[side].pop_back();
      fat.apex[i][side] = -1;
      if (stop) return;
    }
  };
  rec(0, 0);
}

void enumerate_fat_separators(const Geometry& g, const Region& r,
                              const FatSeparatorVisitor& visit,
                              std::optional<SeparatorLimits> limits) {
  bool stop = false;
  enumerate_separators(g, r, [&](const Separator& s) {
    enumerate_fattenings(g, r, s, [&](const FatSeparator& f) {
      if (!visit(f)) stop = true;
      return !stop;
    });
    return !stop;
  }, limits);
}

namespace {

// The part of `r` on one side of a separator. `in_side` decides for a vertex
// strictly off the separator, and for the midpoint/centroid of an edge or
// triangle that is not on the separator.
template <typename VertexIn, typename EdgeIn, typename TriIn>
Region carve(const Region& r, const std::vector<Edge>& sep_edges,
             std::uint64_t sep_vertices, VertexIn vertex_in, EdgeIn edge_in, TriIn tri_in) {
  Region out;
  for (VertexId v : r.vertices) {
    if (has_bit(sep_vertices, v) || vertex_in(v)) out.vertices.push_back(v);
  }
  const std::uint64_t vm = out.vertex_mask();
  auto keep_edge = [&](const Edge& e) {
    if (!has_bit(vm, e.u) || !has_bit(vm, e.v)) return false;
    return std::find(sep_edges.begin(), sep_edges.end(), e) != sep_edges.end() || edge_in(e);
  };
  for (const Edge& e : r.mandatory) {
    if (keep_edge(e)) out.mandatory.push_back(e);
  }
  for (const Edge& e : sep_edges) out.mandatory.push_back(e);
  std::sort(out.mandatory.begin(), out.mandatory.end());
  out.mandatory.erase(std::unique(out.mandatory.begin(), out.mandatory.end()),
                      out.mandatory.end());
  for (const Edge& e : r.synthetic) {
    if (keep_edge(e)) out.synthetic.push_back(e);
  }
  for (const Edge& e : r.annotated) {
    if (keep_edge(e)) out.annotated.push_back(e);
  }
  out.annotated.insert(out.annotated.end(), sep_edges.begin(), sep_edges.end());
  std::sort(out.annotated.begin(), out.annotated.end());
  out.annotated.erase(std::unique(out.annotated.begin(), out.annotated.end()),
                      out.annotated.end());
  for (const Tri& t : r.filler) {
    if (tri_in(t)) out.filler.push_back(t);
  }
  for (const Tri& t : r.fixed) {
    if (tri_in(t)) out.fixed.push_back(t);
  }
  return out;
}

SplitResult split_plain(const Geometry& g, const Region& r, const Separator& s,
                        bool trusted) {
  require_no_holes(r);
  if (!trusted && !well_formed(g, r, s, usable_edges(g, r))) {
    throw InvalidSeparator("not a simple crossing-free separator of the region");
  }
  const auto& ps = g.points();
  const auto sep_edges = s.edges();
  std::uint64_t sep = 0;
  for (VertexId v : s.sequence) sep |= bit(v);
  auto poly = side_polygons(r, s);
  if (s.kind == SeparatorKind::kCycle && doubled_signed_area(ps, poly.first) < 0) {
    std::reverse(poly.first.begin(), poly.first.end());
  }

  SplitResult result;
  auto inside_of = [&](const std::vector<VertexId>& polygon, bool want) {
    std::uint64_t rim = 0;
    for (VertexId v : polygon) rim |= bit(v);
    return std::make_tuple(
        [&ps, &polygon, rim, want](VertexId v) {
          return has_bit(rim, v) ? want : strictly_inside(ps, polygon, ps[v]) == want;
        },
        [&ps, &polygon, want](const Edge& e) {
          if (on_cycle(polygon, e)) return want;
          return midpoint_strictly_inside(ps, polygon, e.u, e.v) == want;
        },
        [&ps, &polygon, want](const Tri& t) {
          return centroid_strictly_inside(ps, polygon, t) == want;
        });
  };

  {
    auto [vin, ein, tin] = inside_of(poly.first, true);
    Region a = carve(r, sep_edges, sep, vin, ein, tin);
    a.outer = poly.first;
    // Outer arc edges of a path side are already in r.mandatory.
    result.subregions.push_back(std::move(a));
  }
  if (s.kind == SeparatorKind::kCycle) {
    auto [vin, ein, tin] = inside_of(poly.first, false);
    Region b = carve(r, sep_edges, sep, vin, ein, tin);
    b.outer = r.outer;
    b.holes = {poly.first};
    result.subregions.push_back(triangulate_holes(g, std::move(b)));
  } else {
    auto [vin, ein, tin] = inside_of(poly.second, true);
    Region b = carve(r, sep_edges, sep, vin, ein, tin);
    b.outer = poly.second;
    result.subregions.push_back(std::move(b));
  }
  return result;
}

}  // namespace

SplitResult split_region(const Geometry& g, const Region& r, const Separator& s,
                         bool trusted) {
  return split_plain(g, r, s, trusted);
}

SplitResult split_region(const Geometry& g, const Region& r, const FatSeparator& s,
                         bool trusted) {
  SplitResult result = split_plain(g, r, s.base, trusted);
  const auto edges = s.base.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::array<Tri, 2> tri{};
    for (int side = 0; side < 2; ++side) {
      const VertexId c = s.apex[i][side];
      if (c < 0) continue;
      tri[side] = canonical_ccw(g, {edges[i].u, edges[i].v, c});
      Region& sub = result.subregions[side];
      if (!sub.has_vertex(c)) throw InvalidSeparator("attachment apex on the wrong side");
      const bool known = std::find(sub.filler.begin(), sub.filler.end(), tri[side]) !=
                             sub.filler.end() ||
                         std::find(sub.fixed.begin(), sub.fixed.end(), tri[side]) !=
                             sub.fixed.end();
      if (known) continue;
      sub.fixed.push_back(tri[side]);
      for (int k = 0; k < 3; ++k) {
        const Edge e(tri[side][k], tri[side][(k + 1) % 3]);
        auto it = std::lower_bound(sub.mandatory.begin(), sub.mandatory.end(), e);
        if (it == sub.mandatory.end() || *it != e) sub.mandatory.insert(it, e);
      }
    }
    if (s.apex[i][0] >= 0 && s.apex[i][1] >= 0) {
      // The second side checks this edge; the first side's triangle is its ghost.
      Region& second = result.subregions[1];
      if (std::find(second.ghosts.begin(), second.ghosts.end(), tri[0]) == second.ghosts.end())
        second.ghosts.push_back(tri[0]);
    }
  }
  if (!trusted) {
    for (Region& sub : result.subregions) check_region(g, sub);
  }
  return result;
}

}  // namespace cfc

#include "cfc/annotations.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cfc {

namespace {

template <typename T>
bool sorted_contains(const std::vector<T>& xs, const T& x) {
  return std::binary_search(xs.begin(), xs.end(), x);
}

int index_of(const std::vector<VertexId>& sorted, VertexId v) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  return it != sorted.end() && *it == v ? static_cast<int>(it - sorted.begin()) : -1;
}

// Union-find with undo for edge backtracking.
class Forest {
 public:
  explicit Forest(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void undo() {
    const int b = history_.back();
    history_.pop_back();
    const int a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

// Edges of a triangulation a region may choose, and which of them must be
// chosen because they are flippable.
struct FreeEdges {
  std::vector<Edge> edges;
  std::vector<bool> flippable;
};

FreeEdges free_edges(const Geometry& g, const Region& r, const Triangulation& t) {
  FreeEdges f;
  for (const Edge& e : t.edges) {
    if (r.is_synthetic(e) || sorted_contains(r.annotated, e)) continue;
    f.edges.push_back(e);
    f.flippable.push_back(is_flippable(g, t, e));
  }
  return f;
}

constexpr std::uint8_t kNoRoot = 255;
constexpr std::uint8_t kClosedRoot = 254;

// Relabels groups by first occurrence so equal partitions get equal keys.
ProfileKey tree_key(const std::vector<int>& group, const std::vector<bool>& sink,
                    int root_group, bool has_root, bool closed) {
  ProfileKey key(group.size() + 1);
  std::vector<int> relabel;
  auto label = [&](int gid) {
    auto it = std::find(relabel.begin(), relabel.end(), gid);
    if (it == relabel.end()) {
      relabel.push_back(gid);
      return static_cast<int>(relabel.size()) - 1;
    }
    return static_cast<int>(it - relabel.begin());
  };
  for (std::size_t i = 0; i < group.size(); ++i) {
    key[i] = static_cast<std::uint8_t>(2 * label(group[i]) + (sink[i] ? 1 : 0));
  }
  if (!has_root) {
    key.back() = kNoRoot;
  } else if (closed) {
    key.back() = kClosedRoot;
  } else {
    key.back() = static_cast<std::uint8_t>(label(root_group));
  }
  return key;
}

struct DecodedTreeKey {
  std::vector<int> group;
  std::vector<bool> sink;
  int root = kNoRoot;  // group label, kNoRoot or kClosedRoot
};

DecodedTreeKey decode(const ProfileKey& key) {
  DecodedTreeKey d;
  for (std::size_t i = 0; i + 1 < key.size(); ++i) {
    d.group.push_back(key[i] >> 1);
    d.sink.push_back(key[i] & 1);
  }
  d.root = key.back();
  return d;
}

void add_to(Profile& p, ProfileKey key, const Count& c) {
  auto [it, fresh] = p.try_emplace(std::move(key), c);
  if (!fresh) it->second += c;
}

// ---------------------------------------------------------------------------
// Base profiles.

void matching_base(const Geometry& g, const Region& r,
                   const std::vector<VertexId>& iface, Profile& out) {
  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    const FreeEdges f = free_edges(g, r, t);
    std::uint64_t matched = 0;
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      if (!f.flippable[i]) continue;
      const std::uint64_t ends = (1ULL << f.edges[i].u) | (1ULL << f.edges[i].v);
      if (matched & ends) return true;  // two forced edges share a vertex
      matched |= ends;
    }
    std::vector<Edge> optional;
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      if (!f.flippable[i]) optional.push_back(f.edges[i]);
    }
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == optional.size()) {
        ProfileKey key(iface.size());
        for (std::size_t k = 0; k < iface.size(); ++k) key[k] = (matched >> iface[k]) & 1;
        add_to(out, std::move(key), 1);
        return;
      }
      rec(i + 1);
      const std::uint64_t ends = (1ULL << optional[i].u) | (1ULL << optional[i].v);
      if (!(matched & ends)) {
        matched |= ends;
        rec(i + 1);
        matched &= ~ends;
      }
    };
    rec(0);
    return true;
  });
}

void tree_base(const Geometry& g, const Region& r, const std::vector<VertexId>& iface,
               VertexId root, Profile& out) {
  const bool has_root = r.has_vertex(root);
  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    const FreeEdges f = free_edges(g, r, t);
    Forest forest(g.n());
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      if (f.flippable[i] && !forest.unite(f.edges[i].u, f.edges[i].v)) return true;
    }
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i < f.edges.size()) {
        if (f.flippable[i]) {
          rec(i + 1);
          return;
        }
        rec(i + 1);
        if (forest.unite(f.edges[i].u, f.edges[i].v)) {
          rec(i + 1);
          forest.undo();
        }
        return;
      }
      // Components, keyed by union-find representative.
      std::vector<int> comp_of_iface(iface.size());
      std::vector<int> comps;  // representatives touching the interface
      for (std::size_t k = 0; k < iface.size(); ++k) {
        comp_of_iface[k] = forest.find(iface[k]);
        if (std::find(comps.begin(), comps.end(), comp_of_iface[k]) == comps.end())
          comps.push_back(comp_of_iface[k]);
      }
      const int root_comp = has_root ? forest.find(root) : -1;
      bool closed = false;
      for (VertexId v : r.vertices) {
        const int c = forest.find(v);
        if (std::find(comps.begin(), comps.end(), c) != comps.end()) continue;
        if (c != root_comp) return;  // nothing could ever give it a parent
        closed = true;
      }
      if (closed) {
        // The root's component reaches no interface vertex: only a spanning
        // tree of a region with no interface can be completed.
        if (!iface.empty()) return;
        for (VertexId v : r.vertices) {
          if (forest.find(v) != root_comp) return;
        }
        add_to(out, tree_key({}, {}, 0, true, true), 1);
        return;
      }
      // Each non-root component picks the interface vertex whose parent is
      // outside the region.
      std::vector<std::vector<int>> members(comps.size());
      for (std::size_t k = 0; k < iface.size(); ++k) {
        const int ci = static_cast<int>(
            std::find(comps.begin(), comps.end(), comp_of_iface[k]) - comps.begin());
        members[ci].push_back(static_cast<int>(k));
      }
      std::vector<int> group(iface.size());
      for (std::size_t k = 0; k < iface.size(); ++k) {
        group[k] = static_cast<int>(
            std::find(comps.begin(), comps.end(), comp_of_iface[k]) - comps.begin());
      }
      int root_group = -1;
      for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        if (comps[ci] == root_comp) root_group = static_cast<int>(ci);
      }
      std::vector<bool> sink(iface.size(), false);
      const int root_idx = index_of(iface, root);
      if (root_idx >= 0) sink[root_idx] = true;
      std::function<void(std::size_t)> pick = [&](std::size_t ci) {
        if (ci == comps.size()) {
          add_to(out, tree_key(group, sink, root_group, has_root, false), 1);
          return;
        }
        if (static_cast<int>(ci) == root_group) {
          pick(ci + 1);
          return;
        }
        for (int k : members[ci]) {
          sink[k] = true;
          pick(ci + 1);
          sink[k] = false;
        }
      };
      pick(0);
    };
    rec(0);
    return true;
  });
}

// ---------------------------------------------------------------------------
// Combination across a fat split.

// A new separator edge: its endpoints and whether leaving it out would leave
// it flippable.
struct NewEdge {
  VertexId u, v;
  bool must_choose;
};

std::vector<NewEdge> new_separator_edges(const Geometry& g, const Region& r,
                                         const FatSeparator& fs) {
  std::vector<NewEdge> out;
  const auto edges = fs.base.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (r.is_synthetic(e) || sorted_contains(r.annotated, e)) continue;
    bool must = false;
    if (fs.apex[i][0] >= 0 && fs.apex[i][1] >= 0) {
      must = g.flip_improves(e.u, e.v, fs.apex[i][0], fs.apex[i][1]);
    }
    out.push_back({e.u, e.v, must});
  }
  return out;
}

void check_interface(const std::vector<VertexId>& outer_iface,
                     const std::vector<VertexId>& a, const std::vector<VertexId>& b) {
  for (VertexId v : outer_iface) {
    if (index_of(a, v) < 0 && index_of(b, v) < 0) {
      throw std::logic_error("interface vertex lost by a split");
    }
  }
}

Profile matching_combine(const Region& r, const std::vector<NewEdge>& fresh,
                         const std::array<std::vector<VertexId>, 2>& side_iface,
                         const Profile& p0, const Profile& p1) {
  const auto iface = interface_vertices(r);
  check_interface(iface, side_iface[0], side_iface[1]);
  Profile out;
  for (const auto& [k0, c0] : p0) {
    std::uint64_t m0 = 0;
    for (std::size_t i = 0; i < k0.size(); ++i)
      if (k0[i]) m0 |= 1ULL << side_iface[0][i];
    for (const auto& [k1, c1] : p1) {
      std::uint64_t m1 = 0;
      for (std::size_t i = 0; i < k1.size(); ++i)
        if (k1[i]) m1 |= 1ULL << side_iface[1][i];
      if (m0 & m1) continue;
      const Count product = c0 * c1;
      std::uint64_t matched = m0 | m1;
      std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == fresh.size()) {
          ProfileKey key(iface.size());
          for (std::size_t k = 0; k < iface.size(); ++k) key[k] = (matched >> iface[k]) & 1;
          add_to(out, std::move(key), product);
          return;
        }
        const NewEdge& e = fresh[i];
        if (!e.must_choose) rec(i + 1);
        const std::uint64_t ends = (1ULL << e.u) | (1ULL << e.v);
        if (!(matched & ends)) {
          matched |= ends;
          rec(i + 1);
          matched &= ~ends;
        }
      };
      rec(0);
    }
  }
  return out;
}

Profile tree_combine(const Geometry& g, const Region& r, const std::vector<NewEdge>& fresh,
                     const std::array<std::vector<VertexId>, 2>& side_iface,
                     const Profile& p0, const Profile& p1) {
  const auto iface = interface_vertices(r);
  check_interface(iface, side_iface[0], side_iface[1]);
  const VertexId root = tree_root(g);
  const bool has_root = r.has_vertex(root);

  // Node ids: interface vertices of either side, then a stand-in for the
  // root when it is hidden inside one side.
  std::vector<VertexId> nodes = side_iface[0];
  nodes.insert(nodes.end(), side_iface[1].begin(), side_iface[1].end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const int hidden = static_cast<int>(nodes.size());
  const int root_node_visible = index_of(nodes, root);
  const int root_node = root_node_visible >= 0 ? root_node_visible : hidden;
  const bool hidden_active = has_root && root_node_visible < 0;
  const int node_count = hidden + 1;
  std::array<std::vector<int>, 2> to_node;
  for (int s = 0; s < 2; ++s)
    for (VertexId v : side_iface[s]) to_node[s].push_back(index_of(nodes, v));
  std::vector<int> iface_node;
  std::vector<bool> is_iface(node_count, false);
  for (VertexId v : iface) {
    iface_node.push_back(index_of(nodes, v));
    is_iface[iface_node.back()] = true;
  }
  struct FreshNodes {
    int u, v;
    bool must;
  };
  std::vector<FreshNodes> edges;
  for (const NewEdge& e : fresh)
    edges.push_back({index_of(nodes, e.u), index_of(nodes, e.v), e.must_choose});

  std::vector<std::pair<DecodedTreeKey, const Count*>> d0, d1;
  for (const auto& [k, c] : p0) d0.emplace_back(decode(k), &c);
  for (const auto& [k, c] : p1) d1.emplace_back(decode(k), &c);

  Profile out;
  Forest forest(node_count);
  std::vector<int> parents(node_count, 0);
  std::vector<int> first;
  std::vector<int> sink_of(node_count);
  std::vector<int> label(node_count, -1);
  ProfileKey key(iface.size() + 1);

  // Joins the groups of one side; false on a cycle. `joined` counts unions
  // for undo.
  auto join_side = [&](int s, const DecodedTreeKey& k, int& joined) {
    const auto& map = to_node[s];
    for (std::size_t i = 0; i < k.group.size(); ++i)
      if (!k.sink[i]) ++parents[map[i]];
    first.assign(k.group.size() + 1, -1);
    for (std::size_t i = 0; i < k.group.size(); ++i) {
      const int gid = k.group[i];
      if (first[gid] < 0) {
        first[gid] = map[i];
      } else {
        if (!forest.unite(first[gid], map[i])) return false;
        ++joined;
      }
    }
    if (k.root != kNoRoot && k.root != kClosedRoot && root_node_visible < 0) {
      if (!forest.unite(root_node, first[k.root])) return false;
      ++joined;
    }
    return true;
  };
  auto unjoin_side = [&](int s, const DecodedTreeKey& k, int joined) {
    for (int i = 0; i < joined; ++i) forest.undo();
    for (std::size_t i = 0; i < k.group.size(); ++i)
      if (!k.sink[i]) --parents[to_node[s][i]];
  };

  auto finish = [&](const Count& product) {
    // One sink per component: the root, or an interface vertex of r.
    std::fill(sink_of.begin(), sink_of.end(), -1);
    for (int x = 0; x < node_count; ++x) {
      if (x == hidden && !hidden_active) continue;
      if (parents[x] > 1) return;
      if (parents[x] == 1) continue;
      const int c = forest.find(x);
      if (sink_of[c] >= 0) return;
      sink_of[c] = x;
    }
    for (int x = 0; x < hidden; ++x) {
      const int sx = sink_of[forest.find(x)];
      if (sx < 0) return;  // parent cycle
      if (has_root && sx == root_node) continue;
      // A sink strictly inside r would have no parent anywhere.
      if (!is_iface[sx]) return;
    }
    const int root_comp = has_root ? forest.find(root_node) : -1;
    int next = 0;
    bool root_reaches_iface = false;
    for (std::size_t k = 0; k < iface.size(); ++k) {
      const int nd = iface_node[k];
      const int c = forest.find(nd);
      if (label[c] < 0) label[c] = next++;
      key[k] = static_cast<std::uint8_t>(2 * label[c] + (parents[nd] == 0 ? 1 : 0));
      if (c == root_comp) root_reaches_iface = true;
    }
    auto reset = [&]() {
      for (int nd : iface_node) label[forest.find(nd)] = -1;
    };
    bool closed = false;
    if (has_root && !root_reaches_iface) {
      // Only a region without interface may close the tree.
      bool whole = iface.empty();
      for (int x = 0; whole && x < hidden; ++x) whole = forest.find(x) == root_comp;
      if (!whole) {
        reset();
        return;
      }
      closed = true;
    }
    key.back() = !has_root ? kNoRoot
                 : closed  ? kClosedRoot
                           : static_cast<std::uint8_t>(label[root_comp]);
    reset();
    if (auto it = out.find(key); it != out.end()) {
      it->second += product;
    } else {
      out.emplace(key, product);
    }
  };

  auto choose = [&](auto& self, std::size_t i, const Count& product) -> void {
    if (i == edges.size()) {
      finish(product);
      return;
    }
    const FreshNodes& e = edges[i];
    if (!e.must) self(self, i + 1, product);
    for (int dir = 0; dir < 2; ++dir) {
      const int child = dir == 0 ? e.u : e.v;
      const int parent = dir == 0 ? e.v : e.u;
      if (parents[child] > 0 || child == root_node) continue;
      if (!forest.unite(child, parent)) continue;
      ++parents[child];
      self(self, i + 1, product);
      --parents[child];
      forest.undo();
    }
  };

  for (const auto& [k0, c0] : d0) {
    int joined0 = 0;
    if (join_side(0, k0, joined0)) {
      for (const auto& [k1, c1] : d1) {
        int joined1 = 0;
        if (join_side(1, k1, joined1)) choose(choose, 0, *c0 * *c1);
        unjoin_side(1, k1, joined1);
      }
    }
    unjoin_side(0, k0, joined0);
  }
  return out;
}

}  // namespace

VertexId tree_root(const Geometry& g) {
  VertexId best = 0;
  for (VertexId v = 1; v < g.n(); ++v) {
    if (g[v].x < g[best].x || (g[v].x == g[best].x && g[v].y < g[best].y)) best = v;
  }
  return best;
}

std::vector<VertexId> interface_vertices(const Region& r) {
  std::vector<VertexId> out;
  for (const Edge& e : r.annotated) {
    out.push_back(e.u);
    out.push_back(e.v);
  }
  for (const Tri& t : r.filler) out.insert(out.end(), t.begin(), t.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Profile base_profile(const Geometry& g, const Region& r, StructureKind kind) {
  Profile out;
  const auto iface = interface_vertices(r);
  if (kind == StructureKind::kMatching) {
    matching_base(g, r, iface, out);
  } else {
    tree_base(g, r, iface, tree_root(g), out);
  }
  return out;
}

Profile combine_profiles(const Geometry& g, const Region& r, const FatSeparator& fs,
                         const SplitResult& split, const Profile& side0,
                         const Profile& side1, StructureKind kind) {
  const auto fresh = new_separator_edges(g, r, fs);
  const std::array<std::vector<VertexId>, 2> side_iface{
      interface_vertices(split.subregions[0]), interface_vertices(split.subregions[1])};
  if (kind == StructureKind::kMatching) {
    return matching_combine(r, fresh, side_iface, side0, side1);
  }
  return tree_combine(g, r, fresh, side_iface, side0, side1);
}

Count profile_total(const Profile& p, StructureKind kind) {
  Count total = 0;
  for (const auto& [key, c] : p) {
    if (kind == StructureKind::kTree && (key.size() != 1 || key[0] != kClosedRoot)) continue;
    total += c;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Literal annotations.

namespace {

template <typename Map, typename K>
const typename Map::mapped_type* lookup(const Map& m, const K& k) {
  const auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}

}  // namespace

bool locally_consistent(const MatchingAnnotation& a) {
  for (const auto& [v, w] : a.m) {
    if (w == v) return false;
    if (w == kUnmatched) continue;
    if (const auto* back = lookup(a.m, w); back && *back != v) return false;
  }
  std::map<VertexId, int> chosen;
  for (const auto& [e, bit] : a.b) {
    const auto* mu = lookup(a.m, e.u);
    const auto* mv = lookup(a.m, e.v);
    if (bit == 1) {
      if ((mu && *mu != e.v) || (mv && *mv != e.u)) return false;
      if (++chosen[e.u] > 1 || ++chosen[e.v] > 1) return false;
    } else if (bit == 0) {
      if ((mu && *mu == e.v) || (mv && *mv == e.u)) return false;
    } else {
      return false;
    }
  }
  return true;
}

bool locally_consistent(const TreeAnnotation& a) {
  for (const auto& [v, p] : a.par) {
    if (p == v) return false;
    if ((v == a.root) != (p == kNil)) return false;
    if (p == kNil) continue;
    const auto* dv = lookup(a.d, v);
    const auto* dp = lookup(a.d, p);
    if (dv && dp && *dp != *dv - 1) return false;
  }
  for (const auto& [v, depth] : a.d) {
    if (depth < 0) return false;
    if (v == a.root && depth != 0) return false;
  }
  for (const auto& [e, bit] : a.b) {
    const auto* pu = lookup(a.par, e.u);
    const auto* pv = lookup(a.par, e.v);
    const bool up = pu && *pu == e.v;
    const bool vp = pv && *pv == e.u;
    if (bit == 1) {
      if (pu && pv && !up && !vp) return false;
    } else if (bit == 0) {
      if (up || vp) return false;
    } else {
      return false;
    }
  }
  return true;
}

std::vector<Edge> annotation_edges(const Geometry& g, const Region& r,
                                   const FatSeparator& fs) {
  std::vector<Edge> out;
  auto add = [&](const Edge& e) {
    if (r.is_synthetic(e) || sorted_contains(r.annotated, e)) return;
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (const Edge& e : fs.base.edges()) add(e);
  for (const Tri& t : fs.attachments(g)) {
    for (int i = 0; i < 3; ++i) add(Edge(t[i], t[(i + 1) % 3]));
  }
  return out;
}

namespace {

template <typename Annotation, typename AssignVertex>
void enumerate_generic(const Geometry& g, const Region& r, const FatSeparator& fs,
                       Annotation ann, const AssignVertex& assign_vertex,
                       const std::function<bool(const AnnotatedSeparator<Annotation>&)>& visit) {
  std::vector<VertexId> verts = fs.base.sequence;
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  const auto edges = annotation_edges(g, r, fs);
  bool stop = false;
  std::function<void(std::size_t)> bits = [&](std::size_t i) {
    if (stop) return;
    if (i == edges.size()) {
      if (!visit({fs, ann})) stop = true;
      return;
    }
    for (int bit = 0; bit < 2 && !stop; ++bit) {
      ann.b[edges[i]] = bit;
      if (locally_consistent(ann)) bits(i + 1);
      ann.b.erase(edges[i]);
    }
  };
  std::function<void(std::size_t)> vertex = [&](std::size_t i) {
    if (stop) return;
    if (i == verts.size()) {
      bits(0);
      return;
    }
    assign_vertex(ann, verts[i], [&]() {
      if (locally_consistent(ann)) vertex(i + 1);
      return !stop;
    });
  };
  vertex(0);
}

}  // namespace

void enumerate_annotations(
    const Geometry& g, const Region& r, const FatSeparator& fs,
    const std::function<bool(const AnnotatedSeparator<MatchingAnnotation>&)>& visit) {
  const int n = g.n();
  auto assign = [n](MatchingAnnotation& a, VertexId v, const std::function<bool()>& next) {
    for (VertexId w = kUnmatched; w < n; ++w) {
      if (w == v) continue;
      a.m[v] = w;
      const bool go = next();
      a.m.erase(v);
      if (!go) return;
    }
  };
  enumerate_generic<MatchingAnnotation>(g, r, fs, {}, assign, visit);
}

void enumerate_annotations(
    const Geometry& g, const Region& r, const FatSeparator& fs,
    const std::function<bool(const AnnotatedSeparator<TreeAnnotation>&)>& visit) {
  const int n = g.n();
  TreeAnnotation start;
  start.root = tree_root(g);
  auto assign = [n](TreeAnnotation& a, VertexId v, const std::function<bool()>& next) {
    for (VertexId p = kNil; p < n; ++p) {
      if (p == v || (p == kNil) != (v == a.root)) continue;
      a.par[v] = p;
      for (int depth = 0; depth < n; ++depth) {
        a.d[v] = depth;
        const bool go = next();
        a.d.erase(v);
        if (!go) {
          a.par.erase(v);
          return;
        }
      }
      a.par.erase(v);
    }
  };
  enumerate_generic<TreeAnnotation>(g, r, fs, start, assign, visit);
}

bool bfs_depth_consistency(const std::vector<VertexId>& vertices,
                           const std::vector<OrientedEdge>& edges,
                           const std::map<VertexId, int>& anchors) {
  std::map<VertexId, std::vector<std::pair<VertexId, int>>> adj;
  for (const OrientedEdge& e : edges) {
    adj[e.child].emplace_back(e.parent, -1);
    adj[e.parent].emplace_back(e.child, +1);
  }
  std::map<VertexId, int> depth;
  std::vector<VertexId> queue;
  for (const auto& [v, d] : anchors) {
    if (d < 0) return false;
    if (depth.count(v)) continue;
    depth[v] = d;
    queue.push_back(v);
    for (std::size_t head = queue.size() - 1; head < queue.size(); ++head) {
      const VertexId x = queue[head];
      for (const auto& [y, step] : adj[x]) {
        const int dy = depth[x] + step;
        if (const auto* known = lookup(depth, y)) {
          if (*known != dy) return false;
          continue;
        }
        if (dy < 0) return false;
        if (const auto* anchored = lookup(anchors, y); anchored && *anchored != dy) return false;
        depth[y] = dy;
        queue.push_back(y);
      }
    }
  }
  for (VertexId v : vertices) {
    if (!depth.count(v)) return false;
  }
  return true;
}

namespace {

// A triangulation of r with the ghosts appended, for the flippability test
// of annotated boundary edges.
Triangulation with_ghosts(const Region& r, const Triangulation& t) {
  Triangulation full = t;
  full.triangles.insert(full.triangles.end(), r.ghosts.begin(), r.ghosts.end());
  full.rebuild();
  return full;
}

// Per-triangulation data shared by both schemes.
struct LiteralSetup {
  FreeEdges free;
  bool annotated_ok = true;  // no annotated b = 0 edge is flippable
};

template <typename Annotation>
LiteralSetup literal_setup(const Geometry& g, const Region& r, const Triangulation& t,
                           const Annotation& boundary) {
  LiteralSetup s;
  s.free = free_edges(g, r, t);
  // Free edges are checkable only with two triangles in t.
  for (std::size_t i = 0; i < s.free.edges.size(); ++i) {
    if (t.incident(s.free.edges[i]).size() < 2) s.free.flippable[i] = false;
  }
  const Triangulation full = r.ghosts.empty() ? t : with_ghosts(r, t);
  for (const Edge& e : r.annotated) {
    const auto* bit = lookup(boundary.b, e);
    if (!bit) throw std::invalid_argument("annotated edge without a bit");
    if (*bit == 0 && full.incident(e).size() == 2 && is_flippable(g, full, e)) {
      s.annotated_ok = false;
    }
  }
  return s;
}

bool edge_usable(const std::vector<std::uint64_t>& usable, VertexId v, VertexId w) {
  return (usable[v] >> w) & 1U;
}

}  // namespace

Count count_legal_annotated_triangulations(const Geometry& g, const Region& r,
                                           const MatchingAnnotation& boundary) {
  Count total = 0;
  enumerate_legal_annotated_triangulations(
      g, r, boundary, [&](const Triangulation&, const std::vector<Edge>&) { ++total; });
  return total;
}

void enumerate_legal_annotated_triangulations(
    const Geometry& g, const Region& r, const MatchingAnnotation& boundary,
    const std::function<void(const Triangulation&, const std::vector<Edge>&)>& visit) {
  if (!locally_consistent(boundary)) return;
  const auto usable = usable_edges(g, r);
  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    const LiteralSetup s = literal_setup(g, r, t, boundary);
    if (!s.annotated_ok) return true;
    // Vertices already matched across an annotated edge, and vertices whose
    // label forbids or forces an edge here.
    std::uint64_t used = 0;
    for (const Edge& e : r.annotated) {
      if (boundary.b.at(e) == 1) used |= (1ULL << e.u) | (1ULL << e.v);
    }
    std::uint64_t blocked = 0;
    std::vector<Edge> forced;
    for (VertexId v : r.vertices) {
      const auto* w = lookup(boundary.m, v);
      if (!w) continue;
      if (*w == kUnmatched || !r.has_vertex(*w)) {
        blocked |= 1ULL << v;
        continue;
      }
      const Edge e(v, *w);
      if (sorted_contains(r.annotated, e)) continue;  // its bit decides
      if (t.has_edge(e) && !r.is_synthetic(e)) {
        forced.push_back(e);
      } else if (edge_usable(usable, v, *w)) {
        return true;  // the partner edge belongs here but t lacks it
      } else {
        blocked |= 1ULL << v;
      }
    }
    const auto& f = s.free;
    std::uint64_t matched = used;
    std::vector<int> state(f.edges.size(), -1);  // -1 open, 1 forced
    std::vector<Edge> chosen;
    for (std::size_t i = 0; i < f.edges.size(); ++i) {
      const Edge& e = f.edges[i];
      const bool must = f.flippable[i] ||
                        std::find(forced.begin(), forced.end(), e) != forced.end();
      if (!must) continue;
      const std::uint64_t ends = (1ULL << e.u) | (1ULL << e.v);
      if ((matched | blocked) & ends) return true;
      matched |= ends;
      state[i] = 1;
    }
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == f.edges.size()) {
        visit(t, chosen);
        return;
      }
      if (state[i] == 1) {
        chosen.push_back(f.edges[i]);
        rec(i + 1);
        chosen.pop_back();
        return;
      }
      rec(i + 1);
      const Edge& e = f.edges[i];
      const std::uint64_t ends = (1ULL << e.u) | (1ULL << e.v);
      if ((matched | blocked) & ends) return;
      // A labelled endpoint only takes its own partner.
      for (VertexId x : {e.u, e.v}) {
        if (lookup(boundary.m, x)) return;
      }
      matched |= ends;
      chosen.push_back(e);
      rec(i + 1);
      chosen.pop_back();
      matched &= ~ends;
    };
    rec(0);
    return true;
  });
}

Count count_legal_annotated_triangulations(const Geometry& g, const Region& r,
                                           const TreeAnnotation& boundary) {
  Count total = 0;
  enumerate_legal_annotated_triangulations(
      g, r, boundary, [&](const Triangulation&, const std::vector<OrientedEdge>&) { ++total; });
  return total;
}

void enumerate_legal_annotated_triangulations(
    const Geometry& g, const Region& r, const TreeAnnotation& boundary,
    const std::function<void(const Triangulation&, const std::vector<OrientedEdge>&)>& visit) {
  if (!locally_consistent(boundary)) return;
  const auto usable = usable_edges(g, r);
  const int n = g.n();
  for (const auto& [v, depth] : boundary.d) {
    if (depth > n - 1) return;
  }
  // Oriented annotated edges with bit 1, and vertices whose parent is fixed
  // outside the free edges of r.
  std::vector<OrientedEdge> fixed_arcs;
  for (const Edge& e : r.annotated) {
    const auto* bit = lookup(boundary.b, e);
    if (!bit) throw std::invalid_argument("annotated edge without a bit");
    if (*bit != 1) continue;
    const auto* pu = lookup(boundary.par, e.u);
    const auto* pv = lookup(boundary.par, e.v);
    if (pu && *pu == e.v) {
      fixed_arcs.push_back({e.u, e.v});
    } else if (pv && *pv == e.u) {
      fixed_arcs.push_back({e.v, e.u});
    } else {
      return;  // a chosen edge whose direction is not pinned
    }
  }
  std::map<VertexId, int> anchors(boundary.d.begin(), boundary.d.end());
  if (r.has_vertex(boundary.root)) anchors[boundary.root] = 0;

  enumerate_triangulations(g, r, [&](const Triangulation& t) {
    const LiteralSetup s = literal_setup(g, r, t, boundary);
    if (!s.annotated_ok) return true;
    const auto& f = s.free;
    // Parent choices per vertex: an incident free edge of t, or none when the
    // parent is the root marker or lives across the interface.
    std::vector<VertexId> verts = r.vertices;
    std::vector<std::vector<int>> options(verts.size());  // edge indices, -1 = none
    for (std::size_t k = 0; k < verts.size(); ++k) {
      const VertexId v = verts[k];
      const auto* p = lookup(boundary.par, v);
      bool has_fixed_arc = false;
      for (const auto& a : fixed_arcs) has_fixed_arc = has_fixed_arc || a.child == v;
      if (v == boundary.root || has_fixed_arc) {
        options[k] = {-1};
        continue;
      }
      if (p) {
        const Edge e(v, *p);
        if (r.has_vertex(*p) && !sorted_contains(r.annotated, e)) {
          const auto it = std::find(f.edges.begin(), f.edges.end(), e);
          if (it != f.edges.end()) {
            options[k] = {static_cast<int>(it - f.edges.begin())};
          } else if (edge_usable(usable, v, *p) && !t.has_edge(e)) {
            return true;  // the parent edge belongs here but t lacks it
          } else {
            options[k] = {-1};
          }
        } else {
          options[k] = {-1};
        }
        continue;
      }
      for (std::size_t i = 0; i < f.edges.size(); ++i) {
        if (f.edges[i].u == v || f.edges[i].v == v) options[k].push_back(static_cast<int>(i));
      }
    }
    std::vector<int> chosen_by(f.edges.size(), 0);
    std::vector<OrientedEdge> arcs = fixed_arcs;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k == verts.size()) {
        for (std::size_t i = 0; i < f.edges.size(); ++i) {
          if (f.flippable[i] && chosen_by[i] == 0) return;
          if (chosen_by[i] > 1) return;
        }
        if (bfs_depth_consistency(r.vertices, arcs, anchors)) {
          visit(t, std::vector<OrientedEdge>(arcs.begin() + fixed_arcs.size(), arcs.end()));
        }
        return;
      }
      for (int i : options[k]) {
        if (i < 0) {
          rec(k + 1);
          continue;
        }
        const Edge& e = f.edges[i];
        const VertexId v = verts[k];
        const VertexId p = e.u == v ? e.v : e.u;
        ++chosen_by[i];
        arcs.push_back({v, p});
        rec(k + 1);
        arcs.pop_back();
        --chosen_by[i];
      }
    };
    rec(0);
    return true;
  });
}

}  // namespace cfc

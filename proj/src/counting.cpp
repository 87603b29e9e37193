#include "cfc/counting.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "cfc/annotations.hpp"
#include "cfc/separators.hpp"

namespace cfc {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kTriangulations:
      return "triangulations";
    case Scheme::kMatchings:
      return "matchings";
    case Scheme::kSpanningTrees:
      return "spanning-trees";
  }
  return "";
}

std::optional<Scheme> parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::kTriangulations, Scheme::kMatchings, Scheme::kSpanningTrees}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

std::vector<Edge> all_segments(const Geometry& g) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < g.n(); ++u)
    for (VertexId v = u + 1; v < g.n(); ++v) edges.emplace_back(u, v);
  return edges;
}

// Lowest unmatched vertex either stays single or takes a higher partner.
Count count_matchings(const Geometry& g) {
  const int n = g.n();
  std::vector<Edge> chosen;
  std::function<Count(VertexId, std::uint64_t)> rec = [&](VertexId v,
                                                          std::uint64_t done) -> Count {
    while (v < n && ((done >> v) & 1U)) ++v;
    if (v == n) return 1;
    Count total = rec(v + 1, done | (1ULL << v));
    for (VertexId w = v + 1; w < n; ++w) {
      if ((done >> w) & 1U) continue;
      const Edge e(v, w);
      bool ok = true;
      for (const Edge& c : chosen) ok = ok && !g.crosses(e, c);
      if (!ok) continue;
      chosen.push_back(e);
      total += rec(v + 1, done | (1ULL << v) | (1ULL << w));
      chosen.pop_back();
    }
    return total;
  };
  return rec(0, 0);
}

// Include/exclude over all segments with a union-find for acyclicity and a
// per-segment counter of chosen segments crossing it.
Count count_spanning_trees(const Geometry& g) {
  const int n = g.n();
  const auto edges = all_segments(g);
  const int m = static_cast<int>(edges.size());
  std::vector<std::vector<int>> crossing(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (g.crosses(edges[i], edges[j])) crossing[i].push_back(j);
  std::vector<int> blocked(m, 0);
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  Count total = 0;
  std::function<void(int, int)> rec = [&](int i, int chosen) {
    if (chosen == n - 1) {
      ++total;
      return;
    }
    if (m - i < n - 1 - chosen) return;
    if (!blocked[i]) {
      const int a = find(edges[i].u), b = find(edges[i].v);
      if (a != b) {
        parent[a] = b;
        for (int j : crossing[i]) ++blocked[j];
        rec(i + 1, chosen + 1);
        for (int j : crossing[i]) --blocked[j];
        parent[a] = a;
      }
    }
    rec(i + 1, chosen);
  };
  rec(0, 0);
  return total;
}

}  // namespace

Count exact_count(const Geometry& g, Scheme scheme) {
  switch (scheme) {
    case Scheme::kTriangulations:
      return count_triangulations_exact(g, hull_region(g));
    case Scheme::kMatchings:
      return count_matchings(g);
    case Scheme::kSpanningTrees:
      return count_spanning_trees(g);
  }
  return 0;
}

int default_delta(int n) {
  if (n < 3) throw ParameterError("need at least 3 points");
  const double raw = std::sqrt(static_cast<double>(n)) * std::log2(static_cast<double>(n));
  const int delta = std::max(static_cast<int>(std::ceil(raw - 1e-9)), 8);
  return std::min(delta, n);
}

namespace {

// Recursion result for one region: its profile and the statistics of the
// recursion tree below it.
struct Solved {
  Profile profile;
  std::vector<std::uint64_t> separators;  // per level below this region
  std::uint64_t exact = 0;
  int height = 0;
};

void saturating_add(std::uint64_t& a, std::uint64_t b) {
  a = a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

void absorb(Solved& into, const Solved& child) {
  if (into.separators.size() < child.separators.size() + 1)
    into.separators.resize(child.separators.size() + 1, 0);
  for (std::size_t i = 0; i < child.separators.size(); ++i)
    saturating_add(into.separators[i + 1], child.separators[i]);
  saturating_add(into.exact, child.exact);
  into.height = std::max(into.height, child.height + 1);
}

std::vector<int> region_key(const Region& r, int budget) {
  std::vector<int> key;
  auto put = [&](int x) { key.push_back(x); };
  put(budget);
  put(static_cast<int>(r.vertices.size()));
  for (VertexId v : r.vertices) put(v);
  auto outer = r.outer;
  std::rotate(outer.begin(), std::min_element(outer.begin(), outer.end()), outer.end());
  put(static_cast<int>(outer.size()));
  for (VertexId v : outer) put(v);
  for (const auto* edges : {&r.mandatory, &r.synthetic, &r.annotated}) {
    put(static_cast<int>(edges->size()));
    for (const Edge& e : *edges) {
      put(e.u);
      put(e.v);
    }
  }
  for (const auto* tris : {&r.filler, &r.fixed}) {
    auto sorted = *tris;
    std::sort(sorted.begin(), sorted.end());
    put(static_cast<int>(sorted.size()));
    for (const Tri& t : sorted) key.insert(key.end(), t.begin(), t.end());
  }
  return key;
}

struct VectorHash {
  std::size_t operator()(const std::vector<int>& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : k) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ULL;
    return h;
  }
};

class Engine {
 public:
  Engine(const Geometry& g, Scheme scheme, const ApproxOptions& opt)
      : g_(g), scheme_(scheme), opt_(opt) {}

  Solved solve_top(const Region& r) { return solve(r, 0, opt_.jobs); }

 private:
  bool fat() const { return scheme_ != Scheme::kTriangulations; }
  StructureKind kind() const {
    return scheme_ == Scheme::kMatchings ? StructureKind::kMatching : StructureKind::kTree;
  }

  Profile base(const Region& r) const {
    if (!fat()) return {{ProfileKey{}, count_triangulations_exact(g_, r)}};
    return base_profile(g_, r, kind());
  }

  // One branch of the sum: a separator (fat for the annotated schemes).
  struct Branch {
    Separator base;
    std::optional<FatSeparator> fat;
  };

  std::vector<Branch> branches(const Region& r) const {
    std::optional<SeparatorLimits> limits;
    if (opt_.max_separator_size) {
      limits = SeparatorLimits::for_region(r);
      limits->max_size = *opt_.max_separator_size;
    }
    std::vector<Branch> out;
    const auto usable = fat() ? usable_edges(g_, r) : std::vector<std::uint64_t>{};
    enumerate_separators_with_sides(g_, r, [&](const Separator& s, const SideCounts& sides) {
      if (!sides.shrinks()) return true;
      if (!fat()) {
        out.push_back({s, std::nullopt});
      } else {
        enumerate_fattenings(g_, r, s, [&](const FatSeparator& f) {
          out.push_back({s, f});
          return true;
        }, &usable);
      }
      return true;
    }, limits);
    return out;
  }

  Solved branch_value(const Region& r, const Branch& b, int depth) {
    const SplitResult split =
        b.fat ? split_region(g_, r, *b.fat, true) : split_region(g_, r, b.base, true);
    Solved out;
    std::array<Solved, 2> sides;
    for (int i = 0; i < 2; ++i) {
      sides[i] = solve(split.subregions[i], depth + 1, 1);
      absorb(out, sides[i]);
    }
    if (!b.fat) {
      out.profile = {{ProfileKey{}, sides[0].profile.begin()->second *
                                        sides[1].profile.begin()->second}};
    } else {
      out.profile = combine_profiles(g_, r, *b.fat, split, sides[0].profile,
                                     sides[1].profile, kind());
    }
    return out;
  }

  Solved solve(const Region& r, int depth, int jobs) {
    const bool at_limit = opt_.max_depth && depth >= *opt_.max_depth;
    const bool leaf = r.size() <= opt_.delta || at_limit;
    // Leaves share entries whatever the remaining depth.
    const int budget = leaf ? -2 : opt_.max_depth ? *opt_.max_depth - depth : -1;
    auto key = region_key(r, budget);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const auto list = leaf ? std::vector<Branch>{} : branches(r);
    Solved total;
    if (list.empty()) {
      // No separator makes progress here: solve the region directly.
      total.profile = base(r);
      total.exact = 1;
    } else {
      std::vector<Solved> values(list.size());
      if (jobs <= 1 || list.size() == 1) {
        for (std::size_t i = 0; i < list.size(); ++i) values[i] = branch_value(r, list[i], depth);
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (int w = 0; w < jobs; ++w) {
          pool.emplace_back([&]() {
            try {
              for (std::size_t i = next++; i < list.size(); i = next++)
                values[i] = branch_value(r, list[i], depth);
            } catch (...) {
              std::lock_guard<std::mutex> lock(failure_mutex);
              failure = std::current_exception();
            }
          });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
      }
      total.separators.assign(1, list.size());
      for (const Solved& v : values) {
        for (const auto& [k, c] : v.profile) {
          auto [it, fresh] = total.profile.try_emplace(k, c);
          if (!fresh) it->second += c;
        }
        if (total.separators.size() < v.separators.size())
          total.separators.resize(v.separators.size(), 0);
        for (std::size_t i = 1; i < v.separators.size(); ++i)
          saturating_add(total.separators[i], v.separators[i]);
        saturating_add(total.exact, v.exact);
        total.height = std::max(total.height, v.height);
      }
    }
    std::lock_guard<std::mutex> lock(mutex_);
    memo_.insert_or_assign(std::move(key), total);
    return total;
  }

  const Geometry& g_;
  Scheme scheme_;
  ApproxOptions opt_;
  std::mutex mutex_;
  std::unordered_map<std::vector<int>, Solved, VectorHash> memo_;
};

}  // namespace

ApproxResult approx_count(const Geometry& g, Scheme scheme, const ApproxOptions& options) {
  if (options.delta < 3) throw ParameterError("delta must be at least 3");
  if (options.jobs < 1) throw ParameterError("jobs must be at least 1");
  if (options.max_separator_size && *options.max_separator_size < 2)
    throw ParameterError("separator size limit must be at least 2");
  const auto start = std::chrono::steady_clock::now();
  ApproxResult result;
  result.delta_used = options.delta;
  if (g.n() <= options.delta) {
    result.lambda = exact_count(g, scheme);
    result.stats.subproblems_solved_exactly = 1;
  } else {
    Engine engine(g, scheme, options);
    const Solved top = engine.solve_top(hull_region(g));
    result.lambda = scheme == Scheme::kTriangulations
                        ? top.profile.begin()->second
                        : profile_total(top.profile, scheme == Scheme::kMatchings
                                                         ? StructureKind::kMatching
                                                         : StructureKind::kTree);
    result.stats.separators_examined = top.separators;
    result.stats.subproblems_solved_exactly = top.exact;
    result.stats.max_recursion_depth = top.height;
  }
  result.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

OneLevelReport one_level_overcount_report(const Geometry& g) {
  OneLevelReport report;
  ApproxOptions opt;
  opt.delta = 3;
  opt.max_depth = 1;
  report.lambda_one_level = approx_count(g, Scheme::kTriangulations, opt).lambda;

  const Region top = hull_region(g);
  std::vector<std::vector<Edge>> seps;
  enumerate_separators(g, top, [&](const Separator& s) {
    const auto sides = separator_sides(g, top, s);
    if (sides && sides->shrinks()) seps.push_back(s.edges());
    return true;
  });
  Count sum = 0, exact = 0;
  enumerate_triangulations(g, top, [&](const Triangulation& t) {
    ++exact;
    for (const auto& edges : seps) {
      bool inside = true;
      for (const Edge& e : edges) inside = inside && t.has_edge(e);
      if (inside) ++sum;
    }
    return true;
  });
  report.sum_separators_over_triangulations = sum;
  report.exact = exact;
  return report;
}

}  // namespace cfc

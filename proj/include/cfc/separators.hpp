#pragma once
// Candidate cycle and path separators of a region, their fat versions, and
// region splitting.

#include <functional>
#include <optional>
#include <vector>

#include "cfc/triangulation.hpp"

namespace cfc {

enum class SeparatorKind { kCycle, kPath };

/// A simple cycle, or a simple path whose endpoints lie on the region's outer
/// boundary (a cycle through the virtual vertex outside the hull, with that
/// vertex removed).
struct Separator {
  SeparatorKind kind = SeparatorKind::kCycle;
  std::vector<VertexId> sequence;

  int size() const { return static_cast<int>(sequence.size()); }
  std::vector<Edge> edges() const;
  friend bool operator==(const Separator&, const Separator&) = default;
};

/// Cycles start at their smallest id with the smaller neighbour second;
/// paths start at their smaller endpoint.
Separator canonical(Separator s);

/// ceil(sqrt(4m)) and floor(2m/3).
int separator_size_bound(int m);
int separator_balance_bound(int m);

struct SeparatorLimits {
  int max_size = 0;
  int max_side = 0;
  static SeparatorLimits for_region(const Region& r);
};

/// Vertex and triangle counts on the two sides of a separator. For a cycle
/// the first side is its interior; for a path it is the side to the left of
/// the path walked in sequence order.
struct SideCounts {
  std::array<int, 2> strict{0, 0};
  std::array<int, 2> real_triangles{0, 0};

  /// Both sides keep some non-filler area, so splitting makes progress.
  bool proper() const { return real_triangles[0] > 0 && real_triangles[1] > 0; }
  /// Both sides keep a vertex off the separator, so both subregions have
  /// fewer vertices than the region.
  bool shrinks() const { return strict[0] > 0 && strict[1] > 0; }
};

/// Edges that can occur in some triangulation of the region, as adjacency
/// masks indexed by vertex id.
std::vector<std::uint64_t> usable_edges(const Geometry& g, const Region& r);

/// Side counts, or nullopt if `s` is not a simple crossing-free cycle/path of
/// usable edges with the required endpoint placement.
std::optional<SideCounts> separator_sides(const Geometry& g, const Region& r,
                                          const Separator& s);

bool is_valid_separator(const Geometry& g, const Region& r, const Separator& s,
                        std::optional<SeparatorLimits> limits = std::nullopt);

using SeparatorVisitor = std::function<bool(const Separator&)>;
using SeparatorSidesVisitor = std::function<bool(const Separator&, const SideCounts&)>;

/// Every valid separator exactly once, in canonical form: cycles first
/// (by starting vertex, depth-first), then paths.
void enumerate_separators(const Geometry& g, const Region& r,
                          const SeparatorVisitor& visit,
                          std::optional<SeparatorLimits> limits = std::nullopt);

/// As enumerate_separators, also passing each separator's side counts.
void enumerate_separators_with_sides(const Geometry& g, const Region& r,
                                     const SeparatorSidesVisitor& visit,
                                     std::optional<SeparatorLimits> limits = std::nullopt);

std::vector<Separator> collect_separators(
    const Geometry& g, const Region& r,
    std::optional<SeparatorLimits> limits = std::nullopt);

/// A separator with the triangles on each side of every base edge. Side 0 is
/// the interior (cycles) or the left (paths); a side that lies outside the
/// region has no apex.
struct FatSeparator {
  Separator base;
  std::vector<std::array<VertexId, 2>> apex;  // per base edge; -1 when absent

  std::vector<Tri> attachments(const Geometry& g) const;
};

using FatSeparatorVisitor = std::function<bool(const FatSeparator&)>;

/// Every crossing-free choice of attachment apexes for one base separator.
/// `usable`, if given, must be usable_edges(g, r).
void enumerate_fattenings(const Geometry& g, const Region& r,
                          const Separator& base, const FatSeparatorVisitor& visit,
                          const std::vector<std::uint64_t>* usable = nullptr);

/// enumerate_fattenings over every valid separator.
void enumerate_fat_separators(const Geometry& g, const Region& r,
                              const FatSeparatorVisitor& visit,
                              std::optional<SeparatorLimits> limits = std::nullopt);

/// True iff the interiors of two triangles intersect.
bool triangles_overlap(const Geometry& g, const Tri& a, const Tri& b);

class InvalidSeparator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SplitResult {
  /// Side 0 then side 1 (see SideCounts). The outer side of a cycle keeps the
  /// cycle as a filled hole.
  std::vector<Region> subregions;
};

/// Splits along a plain separator; the separator edges become mandatory and
/// annotated in both parts. Throws InvalidSeparator if `s` is not a simple crossing-free
/// walk of usable edges.
/// With `trusted` set, `s` must come from enumeration on `r` and the checks
/// are skipped.
SplitResult split_region(const Geometry& g, const Region& r, const Separator& s,
                         bool trusted = false);

/// As above; each attachment triangle is pinned as a fixed triangle of the
/// subregion on its side.
SplitResult split_region(const Geometry& g, const Region& r, const FatSeparator& s,
                         bool trusted = false);

}  // namespace cfc

#pragma once
// Matching and spanning-tree annotations of triangulations: the literal
// per-vertex/per-edge labels, their consistency checks, the exact counter for
// small annotated regions, and the boundary profiles used by the recursion.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "cfc/count.hpp"
#include "cfc/separators.hpp"
#include "cfc/triangulation.hpp"

namespace cfc {

enum class StructureKind { kMatching, kTree };

inline constexpr VertexId kUnmatched = -1;
inline constexpr VertexId kNil = -1;

/// Root of every spanning tree: the point with lexicographically smallest
/// (x, y). It always lies on the convex hull.
VertexId tree_root(const Geometry& g);

struct MatchingAnnotation {
  std::map<VertexId, VertexId> m;  // partner or kUnmatched
  std::map<Edge, int> b;           // structure bit
};

struct TreeAnnotation {
  VertexId root = 0;
  std::map<VertexId, VertexId> par;  // parent or kNil
  std::map<VertexId, int> d;         // depth
  std::map<Edge, int> b;
};

/// Type invariants on the annotated part: symmetric partners, bits agreeing
/// with partners, at most one chosen edge per vertex (matchings); root at
/// depth 0 without parent, parents one level up, bits agreeing with parents,
/// at most one chosen edge towards a parent (trees).
bool locally_consistent(const MatchingAnnotation& a);
bool locally_consistent(const TreeAnnotation& a);

/// A fat separator with labels on its vertices and on the edges of its base
/// and attachment triangles.
template <typename Annotation>
struct AnnotatedSeparator {
  FatSeparator separator;
  Annotation ann;
};

/// Edges labelled by an annotated separator: base edges, then attachment
/// edges, skipping those already labelled in `r.annotated` or synthetic.
std::vector<Edge> annotation_edges(const Geometry& g, const Region& r,
                                   const FatSeparator& fs);

/// Every locally consistent annotation of the separator's vertices and of
/// annotation_edges. Partners and parents range over the vertices of `r`
/// (plus kUnmatched / kNil for the root); depths over 0..n-1.
void enumerate_annotations(
    const Geometry& g, const Region& r, const FatSeparator& fs,
    const std::function<bool(const AnnotatedSeparator<MatchingAnnotation>&)>& visit);
void enumerate_annotations(
    const Geometry& g, const Region& r, const FatSeparator& fs,
    const std::function<bool(const AnnotatedSeparator<TreeAnnotation>&)>& visit);

/// A chosen, oriented edge: `child` takes `parent` as its parent.
struct OrientedEdge {
  VertexId child;
  VertexId parent;
};

/// Depth propagation over the chosen oriented edges from every anchor. True
/// iff each vertex of `vertices` gets exactly one depth, every anchor depth
/// met agrees, and parents sit one level above their children.
bool bfs_depth_consistency(const std::vector<VertexId>& vertices,
                           const std::vector<OrientedEdge>& edges,
                           const std::map<VertexId, int>& anchors);

/// Number of (triangulation of r, chosen edge set, orientation for trees)
/// tuples that respect the boundary annotation and leave no checkable
/// unchosen edge flippable. Edges in r.annotated take their bit from the
/// annotation; an edge is checkable when both of its triangles are known
/// (inside r, or a ghost for an annotated boundary edge).
Count count_legal_annotated_triangulations(const Geometry& g, const Region& r,
                                           const MatchingAnnotation& boundary);
Count count_legal_annotated_triangulations(const Geometry& g, const Region& r,
                                           const TreeAnnotation& boundary);

/// The tuples counted above, one call each: the triangulation and the edges
/// chosen inside r (annotated edges excluded), oriented child to parent for
/// trees.
void enumerate_legal_annotated_triangulations(
    const Geometry& g, const Region& r, const MatchingAnnotation& boundary,
    const std::function<void(const Triangulation&, const std::vector<Edge>&)>& visit);
void enumerate_legal_annotated_triangulations(
    const Geometry& g, const Region& r, const TreeAnnotation& boundary,
    const std::function<void(const Triangulation&, const std::vector<OrientedEdge>&)>& visit);

/// Shared vertices of a region: endpoints of annotated edges and corners of
/// filler triangles.
std::vector<VertexId> interface_vertices(const Region& r);

/// Counts of legal annotated completions of a region, grouped by what the rest
/// of the point set needs to know about the region's interface vertices.
/// Matchings: which interface vertices are matched inside the region. Trees:
/// which interface vertices are joined inside the region, which of them has
/// its parent outside, and which group holds the root.
using ProfileKey = std::vector<std::uint8_t>;
using Profile = std::map<ProfileKey, Count>;

Profile base_profile(const Geometry& g, const Region& r, StructureKind kind);

/// Profile of `r` from the profiles of the two sides of a fat split. Labels
/// the separator's new edges and checks their flippability against the two
/// attachment triangles.
Profile combine_profiles(const Geometry& g, const Region& r, const FatSeparator& fs,
                         const SplitResult& split, const Profile& side0,
                         const Profile& side1, StructureKind kind);

/// Total over a whole-point-set profile.
Count profile_total(const Profile& p, StructureKind kind);

}  // namespace cfc

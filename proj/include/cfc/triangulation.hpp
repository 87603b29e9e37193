#pragma once
// Regions, triangulation enumeration, constrained Delaunay triangulations.

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cfc/count.hpp"
#include "cfc/geometry.hpp"

namespace cfc {

using Tri = std::array<VertexId, 3>;

/// Counter-clockwise rotation of `t` starting at its smallest id.
Tri canonical_ccw(const Geometry& g, Tri t);

class InvalidRegion : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A recursive sub-problem: a polygonal domain bounded by `outer`, minus the
/// interiors of `holes`, containing the points `vertices`.
///
/// Hole interiors that have been filled by triangulate_holes are recorded as
/// `filler` triangles: they are part of the domain but their triangulation is
/// fixed and carries no structure. Their diagonals are listed in `synthetic`.
/// `fixed` holds real triangles pinned by a fat separator; `ghosts` are real
/// triangles just outside the region, kept so boundary edges can be tested for
/// flippability.
struct Region {
  std::vector<VertexId> vertices;               // sorted
  std::vector<VertexId> outer;                  // counter-clockwise cycle
  std::vector<std::vector<VertexId>> holes;     // counter-clockwise cycles
  std::vector<Edge> mandatory;                  // sorted; includes all boundaries
  std::vector<Edge> synthetic;                  // sorted subset of mandatory
  std::vector<Tri> filler;
  std::vector<Tri> fixed;
  std::vector<Tri> ghosts;
  /// Sorted edges whose structure annotation was fixed by an enclosing
  /// separator; they are never chosen inside the region.
  std::vector<Edge> annotated;

  bool has_vertex(VertexId v) const;
  bool is_mandatory(Edge e) const;
  bool is_synthetic(Edge e) const;
  std::uint64_t vertex_mask() const;
  int size() const { return static_cast<int>(vertices.size()); }
};

/// The whole point set: convex hull boundary, no constraints.
Region hull_region(const Geometry& g);

/// Hull of `vertices` with `constraints` as mandatory edges.
Region constrained_region(const Geometry& g, std::vector<VertexId> vertices,
                          std::vector<Edge> constraints);

/// Throws InvalidRegion if mandatory edges cross or a vertex is missing.
void check_region(const Geometry& g, const Region& r);

/// Number of triangles in any triangulation of the region's domain, and the
/// number of those that are not filler.
int triangle_count(const Region& r);
int real_triangle_count(const Region& r);

struct Triangulation {
  std::vector<VertexId> vertices;                 // sorted
  std::vector<Edge> edges;                        // sorted
  std::vector<Tri> triangles;                     // ccw
  std::vector<std::array<int, 3>> neighbors;      // across edge (t[i], t[i+1])

  bool has_edge(Edge e) const;
  /// Indices of triangles incident to `e` (0, 1 or 2 of them).
  std::vector<int> incident(Edge e) const;
  /// Recomputes `edges` and `neighbors` from `triangles`.
  void rebuild();
};

using TriangulationVisitor = std::function<bool(const Triangulation&)>;

/// Calls `visit` once per triangulation of `r` in a fixed depth-first order.
/// Stops early when `visit` returns false. Pre-placed filler and fixed
/// triangles are included in every triangulation.
void enumerate_triangulations(const Geometry& g, const Region& r,
                              const TriangulationVisitor& visit);

/// Same count as enumerate_triangulations, computed with memoisation over the
/// untriangulated frontier.
Count count_triangulations_exact(const Geometry& g, const Region& r);

class MissingEdge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_flippable(const Geometry& g, const Triangulation& t, Edge e);

/// Replaces edge `e` by the other diagonal of its quadrilateral. Requires the
/// quadrilateral to be strictly convex.
void flip(const Geometry& g, Triangulation& t, Edge e);

/// Lawson flipping to the fixpoint; flips only edges outside `keep`.
void flip_to_fixpoint(const Geometry& g, Triangulation& t,
                      const std::vector<Edge>& keep);

class InvalidConstraints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constrained Delaunay triangulation of the convex hull of `vertices`.
Triangulation cdt(const Geometry& g, std::vector<VertexId> vertices,
                  std::vector<Edge> constraints);

/// Constrained Delaunay triangulation of a region's domain, with every
/// mandatory edge treated as a constraint.
Triangulation cdt(const Geometry& g, const Region& r);

/// True iff no edge of t outside `s` is flippable. Throws MissingEdge if an
/// edge of `s` is not in t.
bool is_legal_cdt(const Geometry& g, const Triangulation& t,
                  const std::vector<Edge>& s);

/// Fills every hole with its constrained Delaunay triangulation.
Region triangulate_holes(const Geometry& g, Region r);

}  // namespace cfc

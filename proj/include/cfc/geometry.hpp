#pragma once
// Exact predicates over integer points. Nothing in here rounds.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfc {

using VertexId = int;

inline constexpr std::int64_t kCoordLimit = std::int64_t{1} << 20;
// Bitmask-based containers throughout the engine cap the point count.
inline constexpr int kMaxPoints = 64;

struct Point {
  VertexId id = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
};

/// Undirected edge, always stored with u < v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  Edge() = default;
  Edge(VertexId a, VertexId b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ViolationKind { kDuplicate, kCollinear, kCocircular };

struct GeneralPositionViolation {
  ViolationKind kind;
  std::vector<VertexId> tuple;  // sorted point indices

  std::string describe() const;
};

class PointSet {
 public:
  PointSet() = default;
  /// Builds a point set from raw coordinates; ids are assigned by position.
  /// Does not validate general position (see validate_general_position).
  explicit PointSet(std::span<const std::array<std::int64_t, 2>> coords);

  int size() const { return static_cast<int>(points_.size()); }
  const Point& operator[](VertexId id) const { return points_[id]; }
  const std::vector<Point>& points() const { return points_; }

 private:
  std::vector<Point> points_;
};

/// +1 counter-clockwise, 0 collinear, -1 clockwise.
int orient(const Point& p, const Point& q, const Point& r);

/// Requires (a, b, c) counter-clockwise. +1 iff d is strictly inside the
/// circumcircle, 0 if cocircular, -1 if strictly outside.
int in_circle(const Point& a, const Point& b, const Point& c, const Point& d);

/// True iff the open segments ab and cd share a point.
bool segments_properly_cross(const Point& a, const Point& b, const Point& c,
                             const Point& d);

/// Hull vertices in counter-clockwise order, starting at the lowest id.
std::vector<VertexId> convex_hull(const PointSet& ps);

std::optional<GeneralPositionViolation> validate_general_position(
    const PointSet& ps);

/// Throws GeometryError if `ps` has fewer than three points, is out of the
/// coordinate range, or violates general position.
void require_valid(const PointSet& ps);

/// Strict point-in-polygon for a point not on the polygon boundary.
/// `polygon` is a closed vertex walk (either orientation).
bool strictly_inside(const PointSet& ps, std::span<const VertexId> polygon,
                     const Point& q);

/// Same as strictly_inside, for the midpoint of segment ab (computed on doubled
/// coordinates so it stays exact).
bool midpoint_strictly_inside(const PointSet& ps,
                              std::span<const VertexId> polygon, VertexId a,
                              VertexId b);

/// Same, for the centroid of triangle t.
bool centroid_strictly_inside(const PointSet& ps,
                              std::span<const VertexId> polygon,
                              const std::array<VertexId, 3>& t);

/// Twice the signed area of a closed polygon walk.
std::int64_t doubled_signed_area(const PointSet& ps,
                                 std::span<const VertexId> polygon);

/// True iff q lies strictly inside the triangle abc (any orientation).
bool strictly_inside_triangle(const Point& a, const Point& b, const Point& c,
                              const Point& q);

/// Compares the smallest angle of triangle set `lhs` with that of `rhs`
/// using exact squared-sine arithmetic. Returns -1, 0 or +1.
int compare_min_angle(const PointSet& ps,
                      std::span<const std::array<VertexId, 3>> lhs,
                      std::span<const std::array<VertexId, 3>> rhs);

/// Immutable point set plus precomputed predicate tables. Shared by every
/// module downstream; all queries are by point id.
class Geometry {
 public:
  explicit Geometry(PointSet ps);

  const PointSet& points() const { return ps_; }
  int n() const { return ps_.size(); }
  const Point& operator[](VertexId id) const { return ps_[id]; }

  int orient(VertexId p, VertexId q, VertexId r) const {
    return cfc::orient(ps_[p], ps_[q], ps_[r]);
  }
  int edge_index(Edge e) const { return edge_base_[e.u] + (e.v - e.u - 1); }
  int edge_count() const { return n() * (n() - 1) / 2; }
  bool crosses(Edge a, Edge b) const {
    const std::size_t i = static_cast<std::size_t>(edge_index(a)) * edge_count() +
                          edge_index(b);
    return (cross_bits_[i >> 6] >> (i & 63)) & 1U;
  }
  /// Bitmask of point ids strictly inside triangle pqr.
  std::uint64_t triangle_interior(VertexId p, VertexId q, VertexId r) const;

  /// True iff the edge ab, with incident triangles abp and abq, is flippable:
  /// the quadrilateral is strictly convex and swapping the diagonal strictly
  /// increases the smallest of the six angles.
  bool flip_improves(VertexId a, VertexId b, VertexId p, VertexId q) const;

 private:
  PointSet ps_;
  std::vector<int> edge_base_;
  std::vector<std::uint64_t> cross_bits_;
  std::vector<std::uint64_t> interior_;
  mutable std::vector<std::int8_t> flip_cache_;
};

}  // namespace cfc

#include "cfc/geometry.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <sstream>

namespace cfc {

namespace {

using boost::multiprecision::cpp_int;
using i128 = __int128;

int sign_of(i128 v) { return (v > 0) - (v < 0); }

std::int64_t cross(const Point& p, const Point& q, const Point& r) {
  return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
}

std::int64_t squared_length(const Point& p, const Point& q) {
  const std::int64_t dx = q.x - p.x;
  const std::int64_t dy = q.y - p.y;
  return dx * dx + dy * dy;
}

// Squared sine of the smallest angle of a triangle, as a fraction.
struct SineSquared {
  cpp_int num;
  cpp_int den;
};

SineSquared smallest_angle(const PointSet& ps, const std::array<VertexId, 3>& t) {
  const Point& a = ps[t[0]];
  const Point& b = ps[t[1]];
  const Point& c = ps[t[2]];
  std::array<std::int64_t, 3> sides = {squared_length(b, c), squared_length(a, c),
                                       squared_length(a, b)};
  std::sort(sides.begin(), sides.end());
  // The smallest angle faces the shortest side; its sine is 2A / (|s1| |s2|)
  // over the two longer sides. It is at most 60 degrees, so sin^2 is monotone.
  const cpp_int twice_area = cross(a, b, c);
  return {twice_area * twice_area, cpp_int(sides[1]) * cpp_int(sides[2])};
}

int compare(const SineSquared& l, const SineSquared& r) {
  const cpp_int lhs = l.num * r.den;
  const cpp_int rhs = r.num * l.den;
  return (lhs > rhs) - (lhs < rhs);
}

SineSquared minimum_of(const PointSet& ps,
                       std::span<const std::array<VertexId, 3>> tris) {
  SineSquared best = smallest_angle(ps, tris.front());
  for (std::size_t i = 1; i < tris.size(); ++i) {
    SineSquared cand = smallest_angle(ps, tris[i]);
    if (compare(cand, best) < 0) best = std::move(cand);
  }
  return best;
}

// Winding number with the polygon scaled by `s`; (qx, qy) is already scaled.
bool inside_scaled(const PointSet& ps, std::span<const VertexId> polygon,
                   std::int64_t qx2, std::int64_t qy2, std::int64_t s) {
  int winding = 0;
  const std::size_t k = polygon.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Point& a = ps[polygon[i]];
    const Point& b = ps[polygon[(i + 1) % k]];
    const std::int64_t ax = s * a.x, ay = s * a.y, bx = s * b.x, by = s * b.y;
    const std::int64_t side = (bx - ax) * (qy2 - ay) - (by - ay) * (qx2 - ax);
    if (ay <= qy2) {
      if (by > qy2 && side > 0) ++winding;
    } else if (by <= qy2 && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

}  // namespace

std::string GeneralPositionViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ViolationKind::kDuplicate: os << "duplicate"; break;
    case ViolationKind::kCollinear: os << "collinear"; break;
    case ViolationKind::kCocircular: os << "cocircular"; break;
  }
  os << " (";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) os << ",";
    os << tuple[i];
  }
  os << ")";
  return os.str();
}

PointSet::PointSet(std::span<const std::array<std::int64_t, 2>> coords) {
  points_.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    points_.push_back({static_cast<VertexId>(i), coords[i][0], coords[i][1]});
  }
}

int orient(const Point& p, const Point& q, const Point& r) {
  const std::int64_t c = cross(p, q, r);
  return (c > 0) - (c < 0);
}

int in_circle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const i128 adx = a.x - d.x, ady = a.y - d.y;
  const i128 bdx = b.x - d.x, bdy = b.y - d.y;
  const i128 cdx = c.x - d.x, cdy = c.y - d.y;
  const i128 alift = adx * adx + ady * ady;
  const i128 blift = bdx * bdx + bdy * bdy;
  const i128 clift = cdx * cdx + cdy * cdy;
  const i128 det = alift * (bdx * cdy - bdy * cdx) -
                   blift * (adx * cdy - ady * cdx) +
                   clift * (adx * bdy - ady * bdx);
  return sign_of(det);
}

bool segments_properly_cross(const Point& a, const Point& b, const Point& c,
                             const Point& d) {
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  // Collinear overlap of the open segments (excluded by general position, but
  // the predicate stays exact for any input).
  auto within = [](const Point& p, const Point& q, const Point& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  if (o1 == 0 && o2 == 0) {
    // Project onto the dominant axis and compare open intervals.
    const bool use_x = a.x != b.x;
    auto key = [use_x](const Point& p) { return use_x ? p.x : p.y; };
    const auto [lo1, hi1] = std::minmax(key(a), key(b));
    const auto [lo2, hi2] = std::minmax(key(c), key(d));
    return std::max(lo1, lo2) < std::min(hi1, hi2);
  }
  auto is_endpoint = [](const Point& p, const Point& q, const Point& r) {
    return (r.x == p.x && r.y == p.y) || (r.x == q.x && r.y == q.y);
  };
  // An endpoint of one segment in the relative interior of the other.
  if (o1 == 0 && within(a, b, c) && !is_endpoint(a, b, c) && o3 * o4 < 0) return true;
  if (o2 == 0 && within(a, b, d) && !is_endpoint(a, b, d) && o3 * o4 < 0) return true;
  if (o3 == 0 && within(c, d, a) && !is_endpoint(c, d, a) && o1 * o2 < 0) return true;
  if (o4 == 0 && within(c, d, b) && !is_endpoint(c, d, b) && o1 * o2 < 0) return true;
  return false;
}

std::vector<VertexId> convex_hull(const PointSet& ps) {
  std::vector<VertexId> order(ps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return ps[a].x != ps[b].x ? ps[a].x < ps[b].x : ps[a].y < ps[b].y;
  });
  // Andrew's monotone chain.
  std::vector<VertexId> hull(2 * order.size());
  std::size_t k = 0;
  for (VertexId id : order) {
    while (k >= 2 && orient(ps[hull[k - 2]], ps[hull[k - 1]], ps[id]) <= 0) --k;
    hull[k++] = id;
  }
  const std::size_t lower = k + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (k >= lower && orient(ps[hull[k - 2]], ps[hull[k - 1]], ps[*it]) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  const auto lowest = std::min_element(hull.begin(), hull.end());
  std::rotate(hull.begin(), lowest, hull.end());
  return hull;
}

std::optional<GeneralPositionViolation> validate_general_position(
    const PointSet& ps) {
  const int n = ps.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (ps[i].x == ps[j].x && ps[i].y == ps[j].y) {
        return GeneralPositionViolation{ViolationKind::kDuplicate, {i, j}};
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        if (orient(ps[i], ps[j], ps[k]) == 0) {
          return GeneralPositionViolation{ViolationKind::kCollinear, {i, j, k}};
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const bool ccw = orient(ps[i], ps[j], ps[k]) > 0;
        const Point& b = ccw ? ps[j] : ps[k];
        const Point& c = ccw ? ps[k] : ps[j];
        for (int l = k + 1; l < n; ++l) {
          if (in_circle(ps[i], b, c, ps[l]) == 0) {
            return GeneralPositionViolation{ViolationKind::kCocircular,
                                            {i, j, k, l}};
          }
        }
      }
    }
  }
  return std::nullopt;
}

void require_valid(const PointSet& ps) {
  if (ps.size() < 3) throw GeometryError("point set needs at least 3 points");
  if (ps.size() > kMaxPoints) {
    throw GeometryError("point set exceeds " + std::to_string(kMaxPoints) +
                        " points");
  }
  for (const Point& p : ps.points()) {
    if (p.x > kCoordLimit || p.x < -kCoordLimit || p.y > kCoordLimit ||
        p.y < -kCoordLimit) {
      throw GeometryError("coordinate out of range at point " +
                          std::to_string(p.id));
    }
  }
  if (auto v = validate_general_position(ps)) {
    throw GeometryError("general position violated: " + v->describe());
  }
}

bool strictly_inside(const PointSet& ps, std::span<const VertexId> polygon,
                     const Point& q) {
  return inside_scaled(ps, polygon, 2 * q.x, 2 * q.y, 2);
}

bool midpoint_strictly_inside(const PointSet& ps,
                              std::span<const VertexId> polygon, VertexId a,
                              VertexId b) {
  return inside_scaled(ps, polygon, ps[a].x + ps[b].x, ps[a].y + ps[b].y, 2);
}

bool centroid_strictly_inside(const PointSet& ps,
                              std::span<const VertexId> polygon,
                              const std::array<VertexId, 3>& t) {
  return inside_scaled(ps, polygon, ps[t[0]].x + ps[t[1]].x + ps[t[2]].x,
                       ps[t[0]].y + ps[t[1]].y + ps[t[2]].y, 3);
}

std::int64_t doubled_signed_area(const PointSet& ps,
                                 std::span<const VertexId> polygon) {
  std::int64_t area = 0;
  const std::size_t k = polygon.size();
  for (std::size_t i = 0; i < k; ++i) {
    const Point& a = ps[polygon[i]];
    const Point& b = ps[polygon[(i + 1) % k]];
    area += a.x * b.y - a.y * b.x;
  }
  return area;
}

bool strictly_inside_triangle(const Point& a, const Point& b, const Point& c,
                              const Point& q) {
  const int o1 = orient(a, b, q);
  const int o2 = orient(b, c, q);
  const int o3 = orient(c, a, q);
  return (o1 > 0 && o2 > 0 && o3 > 0) || (o1 < 0 && o2 < 0 && o3 < 0);
}

int compare_min_angle(const PointSet& ps,
                      std::span<const std::array<VertexId, 3>> lhs,
                      std::span<const std::array<VertexId, 3>> rhs) {
  return compare(minimum_of(ps, lhs), minimum_of(ps, rhs));
}

}  // namespace cfc

namespace cfc {

Geometry::Geometry(PointSet ps) : ps_(std::move(ps)) {
  require_valid(ps_);
  const int n = ps_.size();
  edge_base_.resize(n);
  int base = 0;
  for (int u = 0; u < n; ++u) {
    edge_base_[u] = base;
    base += n - u - 1;
  }
  const std::size_t e = edge_count();
  cross_bits_.assign((e * e + 63) / 64, 0);
  std::vector<Edge> edges;
  edges.reserve(e);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = i + 1; j < e; ++j) {
      const Edge& a = edges[i];
      const Edge& b = edges[j];
      if (segments_properly_cross(ps_[a.u], ps_[a.v], ps_[b.u], ps_[b.v])) {
        const std::size_t k1 = i * e + j, k2 = j * e + i;
        cross_bits_[k1 >> 6] |= std::uint64_t{1} << (k1 & 63);
        cross_bits_[k2 >> 6] |= std::uint64_t{1} << (k2 & 63);
      }
    }
  }
  const std::size_t nn = n;
  interior_.assign(nn * nn * nn, 0);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      for (int r = q + 1; r < n; ++r) {
        std::uint64_t mask = 0;
        for (int s = 0; s < n; ++s) {
          if (s != p && s != q && s != r &&
              strictly_inside_triangle(ps_[p], ps_[q], ps_[r], ps_[s])) {
            mask |= std::uint64_t{1} << s;
          }
        }
        interior_[(p * nn + q) * nn + r] = mask;
      }
    }
  }
  flip_cache_.assign(nn * nn * nn * nn, -1);
}

std::uint64_t Geometry::triangle_interior(VertexId p, VertexId q,
                                          VertexId r) const {
  if (p > q) std::swap(p, q);
  if (q > r) std::swap(q, r);
  if (p > q) std::swap(p, q);
  const std::size_t nn = n();
  return interior_[(p * nn + q) * nn + r];
}

bool Geometry::flip_improves(VertexId a, VertexId b, VertexId p,
                             VertexId q) const {
  if (a > b) std::swap(a, b);
  if (p > q) std::swap(p, q);
  const std::size_t nn = n();
  const std::size_t key = ((a * nn + b) * nn + p) * nn + q;
  // Benign race under concurrent use: every writer stores the same value.
  std::int8_t cached = __atomic_load_n(&flip_cache_[key], __ATOMIC_RELAXED);
  if (cached >= 0) return cached == 1;
  bool result = false;
  if (segments_properly_cross(ps_[a], ps_[b], ps_[p], ps_[q])) {
    const std::array<std::array<VertexId, 3>, 2> before = {
        std::array<VertexId, 3>{a, b, p}, std::array<VertexId, 3>{a, b, q}};
    const std::array<std::array<VertexId, 3>, 2> after = {
        std::array<VertexId, 3>{p, q, a}, std::array<VertexId, 3>{p, q, b}};
    result = compare_min_angle(ps_, after, before) > 0;
  }
  __atomic_store_n(&flip_cache_[key], static_cast<std::int8_t>(result),
                   __ATOMIC_RELAXED);
  return result;
}

}  // namespace cfc

#pragma once
// Exact counters and the recursive separator-based approximate counter.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfc/count.hpp"
#include "cfc/geometry.hpp"
#include "cfc/triangulation.hpp"

namespace cfc {

enum class Scheme { kTriangulations, kMatchings, kSpanningTrees };

std::string scheme_name(Scheme s);
/// Accepts "triangulations", "matchings", "spanning-trees".
std::optional<Scheme> parse_scheme(const std::string& name);

/// Triangulations by enumeration; matchings (including the empty one) and
/// crossing-free spanning trees by backtracking.
Count exact_count(const Geometry& g, Scheme scheme);

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// max(ceil(sqrt(n) * log2(n)), 8), clamped to n.
int default_delta(int n);

struct ApproxOptions {
  int delta = 0;
  int jobs = 1;
  /// Overrides ceil(sqrt(4m)) in every region.
  std::optional<int> max_separator_size;
  /// Regions at this recursion depth are solved exactly.
  std::optional<int> max_depth;
};

/// Statistics of the logical recursion tree (as if nothing were memoised), so
/// they do not depend on scheduling.
struct ApproxStats {
  std::vector<std::uint64_t> separators_examined;  // per level
  std::uint64_t subproblems_solved_exactly = 0;
  int max_recursion_depth = 0;
  double wall_time = 0.0;  // seconds
};

struct ApproxResult {
  Count lambda;
  int delta_used = 0;
  ApproxStats stats;
};

ApproxResult approx_count(const Geometry& g, Scheme scheme, const ApproxOptions& options);

struct OneLevelReport {
  Count lambda_one_level;
  Count sum_separators_over_triangulations;
  Count exact;
};

/// Triangulation scheme, recursion cut after one level with exact sub-solving,
/// against the sum over all triangulations of the number of top-level
/// separators each one contains.
OneLevelReport one_level_overcount_report(const Geometry& g);

}  // namespace cfc

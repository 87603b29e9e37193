#pragma once
// Point-file ingestion, run orchestration and the JSON report.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfc/count.hpp"
#include "cfc/counting.hpp"
#include "cfc/geometry.hpp"

namespace cfc {

enum class InputErrorKind { kParse, kRange, kValidation };

class InputError : public std::runtime_error {
 public:
  InputError(InputErrorKind kind, int line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  InputErrorKind kind() const { return kind_; }
  /// 1-based line number, or 0 when the error concerns the whole set.
  int line() const { return line_; }

 private:
  InputErrorKind kind_;
  int line_;
};

/// One "x y" point per line; '#' starts a comment, blank lines are skipped.
/// Throws InputError on malformed lines, coordinates with |c| > 2^20 and
/// general-position violations.
PointSet parse_points(std::string_view text);

/// Hex FNV-1a digest of the points sorted by (x, y).
std::string input_digest(const PointSet& ps);

enum class Mode { kExact, kApprox };

struct RunOptions {
  Scheme scheme = Scheme::kTriangulations;
  Mode mode = Mode::kExact;
  std::optional<int> delta;
  bool report_stats = false;
  int jobs = 1;
  std::optional<int> max_separator_size;
};

/// Largest n accepted by exact mode.
int exact_cap(Scheme s);

/// Counts `ps` and renders the report as a JSON object. Throws ParameterError
/// on bad options.
std::string run_report(const PointSet& ps, const RunOptions& options);

inline constexpr int kExitInput = 2;
inline constexpr int kExitParameter = 3;

/// Full command line handling. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfc

#include "cfc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cfc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Parses one integer token starting at `pos`, advancing past it.
bool next_int(std::string_view line, std::size_t& pos, std::int64_t& value, bool& overflow) {
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos == line.size()) return false;
  const char* begin = line.data() + pos;
  const char* end = line.data() + line.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ptr == begin) return false;
  if (ptr != end && *ptr != ' ' && *ptr != '\t') return false;
  overflow = ec == std::errc::result_out_of_range;
  pos = static_cast<std::size_t>(ptr - line.data());
  return true;
}

std::string mode_name(Mode m) { return m == Mode::kExact ? "exact" : "approx"; }

}  // namespace

PointSet parse_points(std::string_view text) {
  std::vector<std::array<std::int64_t, 2>> coords;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto stop = text.find('\n', start);
    if (stop == std::string_view::npos) stop = text.size();
    ++line_no;
    std::string_view line = text.substr(start, stop - start);
    start = stop + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto where = " at line " + std::to_string(line_no);
    std::array<std::int64_t, 2> xy{};
    std::size_t pos = 0;
    for (auto& c : xy) {
      bool overflow = false;
      if (!next_int(line, pos, c, overflow))
        throw InputError(InputErrorKind::kParse, line_no, "parse error" + where);
      if (overflow || c > kCoordLimit || c < -kCoordLimit)
        throw InputError(InputErrorKind::kRange, line_no,
                         "coordinate out of range" + where);
    }
    if (!trim(line.substr(pos)).empty())
      throw InputError(InputErrorKind::kParse, line_no, "parse error" + where);
    coords.push_back(xy);
  }
  PointSet ps(coords);
  if (const auto v = validate_general_position(ps))
    throw InputError(InputErrorKind::kValidation, 0, "validation error: " + v->describe());
  return ps;
}

std::string input_digest(const PointSet& ps) {
  std::vector<std::pair<std::int64_t, std::int64_t>> sorted;
  for (const Point& p : ps.points()) sorted.emplace_back(p.x, p.y);
  std::sort(sorted.begin(), sorted.end());
  std::string canon;
  for (const auto& [x, y] : sorted) canon += std::to_string(x) + " " + std::to_string(y) + "\n";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int exact_cap(Scheme s) { return s == Scheme::kTriangulations ? 14 : 9; }

std::string run_report(const PointSet& ps, const RunOptions& options) {
  const Geometry g(ps);
  const int n = g.n();
  nlohmann::ordered_json stats;
  Count count;
  nlohmann::ordered_json delta = nullptr;
  double wall = 0.0;
  if (options.mode == Mode::kExact) {
    if (n > exact_cap(options.scheme)) {
      throw ParameterError("exact mode is capped at n = " +
                           std::to_string(exact_cap(options.scheme)) + " for " +
                           scheme_name(options.scheme));
    }
    const auto t0 = std::chrono::steady_clock::now();
    count = exact_count(g, options.scheme);
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    stats["separators_examined"] = nlohmann::ordered_json::array();
    stats["subproblems_solved_exactly"] = 1;
    stats["max_recursion_depth"] = 0;
  } else {
    ApproxOptions opt;
    opt.delta = options.delta ? *options.delta : default_delta(n);
    opt.jobs = options.jobs;
    opt.max_separator_size = options.max_separator_size;
    const ApproxResult r = approx_count(g, options.scheme, opt);
    count = r.lambda;
    delta = r.delta_used;
    wall = r.stats.wall_time;
    stats["separators_examined"] = r.stats.separators_examined;
    stats["subproblems_solved_exactly"] = r.stats.subproblems_solved_exactly;
    stats["max_recursion_depth"] = r.stats.max_recursion_depth;
  }
  if (options.report_stats) stats["wall_time"] = wall;

  nlohmann::ordered_json report;
  report["n"] = n;
  report["scheme"] = scheme_name(options.scheme);
  report["mode"] = mode_name(options.mode);
  report["delta"] = delta;
  report["count"] = count.str();
  report["log2_count"] = log2_of(count);
  report["stats"] = stats;
  report["input_digest"] = input_digest(ps);
  return report.dump(2);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counts triangulations, crossing-free matchings and spanning trees of a point set."};
  std::string input;
  std::string scheme = "triangulations";
  std::string mode = "exact";
  std::optional<int> delta;
  std::optional<int> max_sep;
  RunOptions options;
  app.add_option("--input", input, "Point file, one \"x y\" per line")->required();
  app.add_option("--scheme", scheme, "triangulations | matchings | spanning-trees");
  app.add_option("--mode", mode, "exact | approx");
  app.add_option("--delta", delta, "Base-case threshold (approx mode)");
  app.add_flag("--report-stats", options.report_stats, "Include wall time in the report");
  app.add_option("--jobs", options.jobs, "Worker threads");
  app.add_option("--max-sep-size", max_sep, "Separator size cap (testing)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParameter;
  }

  const auto parsed = parse_scheme(scheme);
  if (!parsed) {
    err << "error: unknown scheme '" << scheme << "'\n";
    return kExitParameter;
  }
  options.scheme = *parsed;
  if (mode == "exact") {
    options.mode = Mode::kExact;
  } else if (mode == "approx") {
    options.mode = Mode::kApprox;
  } else {
    err << "error: unknown mode '" << mode << "'\n";
    return kExitParameter;
  }
  options.delta = delta;
  options.max_separator_size = max_sep;

  std::ifstream file(input, std::ios::binary);
  if (!file) {
    err << "error: cannot read " << input << "\n";
    return kExitInput;
  }
  std::stringstream buffer;
  buffer << file.rdbuf();

  PointSet ps;
  try {
    ps = parse_points(buffer.str());
    require_valid(ps);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    out << run_report(ps, options) << "\n";
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParameter;
  }
  return 0;
}

}  // namespace cfc

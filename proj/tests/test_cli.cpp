#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfc/cli.hpp"
#include "support/oracles.hpp"

using namespace cfc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("cfc_cli_" + name);
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kHexagon = "# convex hexagon\n0 0\n1 1\n2 4\n3 9\n4 16\n5 25\n";

}  // namespace

TEST_CASE("parse_points: examples") {
  const PointSet ps = parse_points("0 0\n4 1\n2 5\n");
  REQUIRE(ps.size() == 3);
  CHECK(ps[1].x == 4);
  CHECK(ps[2].y == 5);

  try {
    parse_points("0 0\n1 1\n2 2\n9 0\n");
    FAIL("collinear input accepted");
  } catch (const InputError& e) {
    CHECK(e.kind() == InputErrorKind::kValidation);
    CHECK(std::string(e.what()).find("collinear (0,1,2)") != std::string::npos);
  }

  try {
    parse_points("0 0\nfoo\n");
    FAIL("malformed input accepted");
  } catch (const InputError& e) {
    CHECK(e.kind() == InputErrorKind::kParse);
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse_points: comments, blanks and ranges") {
  const PointSet ps = parse_points("# header\n\n  1 2  # first\n\t-3 4\n+5 -6\n");
  REQUIRE(ps.size() == 3);
  CHECK(ps[0].x == 1);
  CHECK(ps[1].x == -3);
  CHECK(ps[2].x == 5);
  CHECK(ps[2].y == -6);

  CHECK(parse_points("1048576 0\n0 -1048576\n-7 3\n").size() == 3);
  for (const char* text : {"1048577 0\n0 1\n2 3\n", "0 0\n0 -1048577\n5 3\n",
                           "0 0\n99999999999999999999 1\n5 3\n"}) {
    CAPTURE(text);
    try {
      parse_points(text);
      FAIL("out of range input accepted");
    } catch (const InputError& e) {
      CHECK(e.kind() == InputErrorKind::kRange);
    }
  }
  for (const char* text : {"1 2 3\n", "1\n", "1 2x\n", "1.5 2\n"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_points(text), InputError);
  }
  CHECK_THROWS_AS(parse_points("0 0\n4 1\n0 0\n"), InputError);
}

TEST_CASE("input digest ignores order and comments") {
  const auto a = parse_points("0 0\n4 1\n2 5\n");
  const auto b = parse_points("2 5 # moved\n0 0\n4 1\n");
  const auto c = parse_points("0 0\n4 1\n2 6\n");
  CHECK(input_digest(a) == input_digest(b));
  CHECK(input_digest(a) != input_digest(c));
  CHECK(input_digest(a).size() == 16);
}

TEST_CASE("log2 of counts") {
  CHECK(log2_of(Count(1)) == 0.0);
  CHECK(log2_of(Count(1024)) == doctest::Approx(10.0));
  CHECK(log2_of(Count(1) << 300) == doctest::Approx(300.0));
  CHECK(log2_of(Count(14)) == doctest::Approx(3.807354922));
}

TEST_CASE("run: hexagon reports") {
  const auto file = write_temp("hexagon.pts", kHexagon).string();
  const auto exact =
      invoke({"--input", file, "--scheme", "triangulations", "--mode", "exact"});
  REQUIRE(exact.code == 0);
  const auto report = nlohmann::json::parse(exact.out);
  CHECK(report["count"] == "14");
  CHECK(report["n"] == 6);
  CHECK(report["delta"].is_null());

  const auto approx =
      invoke({"--input", file, "--scheme", "triangulations", "--mode", "approx", "--delta", "6"});
  REQUIRE(approx.code == 0);
  const auto r2 = nlohmann::json::parse(approx.out);
  CHECK(r2["count"] == "14");
  CHECK(r2["delta"] == 6);
  CHECK(r2["stats"]["max_recursion_depth"] == 0);
  CHECK_FALSE(r2["stats"].contains("wall_time"));

  const auto timed = invoke({"--input", file, "--mode", "approx", "--report-stats"});
  REQUIRE(timed.code == 0);
  const auto r3 = nlohmann::json::parse(timed.out);
  CHECK(r3["stats"].contains("wall_time"));
  CHECK(r3["delta"] == 6);  // default threshold clamps to n
}

TEST_CASE("run: count parses back exactly") {
  const auto file = write_temp("seven.pts", "").string();
  const auto coords = testing::random_coords(7, 4242);
  {
    std::ofstream out(file);
    for (const auto& [x, y] : coords) out << x << " " << y << "\n";
  }
  const auto g = testing::make_geometry(coords);
  for (const char* scheme : {"triangulations", "matchings", "spanning-trees"}) {
    const auto o = invoke({"--input", file, "--scheme", scheme});
    REQUIRE(o.code == 0);
    const auto report = nlohmann::json::parse(o.out);
    CHECK(Count(report["count"].get<std::string>()) == exact_count(g, *parse_scheme(scheme)));
    CHECK(report["input_digest"] == input_digest(g.points()));
  }
}

TEST_CASE("run: output does not depend on jobs") {
  const auto file = write_temp("eight.pts", "").string();
  {
    std::ofstream out(file);
    for (const auto& [x, y] : testing::random_coords(8, 31)) out << x << " " << y << "\n";
  }
  for (const char* scheme : {"triangulations", "spanning-trees"}) {
    const auto a = invoke({"--input", file, "--scheme", scheme, "--mode", "approx", "--delta", "5"});
    const auto b = invoke(
        {"--input", file, "--scheme", scheme, "--mode", "approx", "--delta", "5", "--jobs", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("run: exit codes") {
  const auto collinear = write_temp("collinear.pts", "0 0\n1 1\n2 2\n9 0\n").string();
  auto o = invoke({"--input", collinear});
  CHECK(o.code == kExitInput);
  CHECK(o.out.empty());
  CHECK(o.err.find("collinear") != std::string::npos);

  const auto broken = write_temp("broken.pts", "0 0\nfoo\n").string();
  o = invoke({"--input", broken});
  CHECK(o.code == kExitInput);
  CHECK(o.err.find("line 2") != std::string::npos);

  const auto two = write_temp("two.pts", "0 0\n1 5\n").string();
  CHECK(invoke({"--input", two}).code == kExitInput);
  CHECK(invoke({"--input", "/nonexistent/points.pts"}).code == kExitInput);

  const auto hexagon = write_temp("hexagon2.pts", kHexagon).string();
  CHECK(invoke({"--input", hexagon, "--scheme", "trees"}).code == kExitParameter);
  CHECK(invoke({"--input", hexagon, "--mode", "fast"}).code == kExitParameter);
  CHECK(invoke({"--input", hexagon, "--mode", "approx", "--delta", "2"}).code == kExitParameter);
  CHECK(invoke({"--input", hexagon, "--mode", "approx", "--jobs", "0"}).code == kExitParameter);
  CHECK(invoke({"--input", hexagon, "--delta", "x"}).code == kExitParameter);
  CHECK(invoke({"--scheme", "matchings"}).code == kExitParameter);

  std::string ten;
  for (const auto& [x, y] : testing::random_coords(10, 5)) ten += std::to_string(x) + " " + std::to_string(y) + "\n";
  const auto big = write_temp("ten.pts", ten).string();
  o = invoke({"--input", big, "--scheme", "matchings"});
  CHECK(o.code == kExitParameter);
  CHECK(o.out.empty());
  CHECK(invoke({"--input", big, "--scheme", "triangulations"}).code == 0);
}

TEST_CASE("corpus goldens") {
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(CFC_CORPUS_DIR)) {
    if (entry.path().extension() != ".pts") continue;
    fs::path golden = entry.path();
    golden.replace_extension(".expected.json");
    REQUIRE_MESSAGE(fs::exists(golden), golden.string());
    const auto runs = nlohmann::ordered_json::parse(read_file(golden));
    for (const auto& runspec : runs) {
      std::vector<std::string> args{"--input", entry.path().string()};
      for (const auto& a : runspec["args"]) args.push_back(a.get<std::string>());
      CAPTURE(entry.path().filename().string());
      CAPTURE(runspec["args"].dump());
      const auto o = invoke(args);
      REQUIRE(o.code == 0);
      CHECK(o.out == runspec["report"].dump(2) + "\n");
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("corpus golden exact counts agree with subset enumeration") {
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(CFC_CORPUS_DIR)) {
    if (entry.path().extension() != ".pts") continue;
    const PointSet ps = parse_points(read_file(entry.path()));
    if (ps.size() > 7) continue;
    fs::path golden = entry.path();
    golden.replace_extension(".expected.json");
    for (const auto& runspec : nlohmann::json::parse(read_file(golden))) {
      const auto& report = runspec["report"];
      if (report["mode"] != "exact") continue;
      const Count count(report["count"].get<std::string>());
      const std::string scheme = report["scheme"];
      CAPTURE(entry.path().filename().string());
      CAPTURE(scheme);
      if (scheme == "triangulations") {
        CHECK(count == testing::brute_force_triangulations(ps).size());
      } else if (scheme == "matchings") {
        CHECK(count == testing::brute_force_matchings(ps));
      } else {
        CHECK(count == testing::brute_force_spanning_trees(ps));
      }
      ++checked;
    }
  }
  CHECK(checked >= 15);
}

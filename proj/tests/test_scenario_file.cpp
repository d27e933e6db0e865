#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "conecollapse/audit.hpp"
#include "conecollapse/scenario_file.hpp"

using namespace conecollapse;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const char* kTwoCards = R"({
  "version": 1,
  "dimension": 1,
  "worldlines": [
    {"id": "left", "vertices": [[0, 0]], "initial_velocity": [0], "terminal_velocity": [0]},
    {"id": "right", "vertices": [[0, 1]], "initial_velocity": [0], "terminal_velocity": [0]}
  ],
  "initial_weights": {"left": 0.5, "right": 0.5},
  "measurements": [{"index": 1, "apex": [0, 0], "target": "left", "outcome": "found"}]
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const std::size_t at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

Error parse_error(const std::string& text) {
  try {
    (void)parse_scenario(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a parse failure");
  return Error(Errc::Parse, "");
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal two-card scenario parses", "[scenario_file]") {
  const ScenarioFile f = parse_scenario(kTwoCards);
  REQUIRE(f.worldlines.size() == 2);
  CHECK(f.initial_weights == std::vector<std::pair<std::string, double>>{{"left", 0.5}, {"right", 0.5}});
  CHECK(f.measurements.front().outcome == Outcome::Found);
  const NaturalScenario n = to_natural(f);
  CHECK(n.priors == std::vector<double>{0.5, 0.5});
  CHECK(n.lines[1].contains(Event(-7, 1)));
}

TEST_CASE("weights must sum to one", "[scenario_file]") {
  const Error e = parse_error(replace(kTwoCards, "\"right\": 0.5", "\"right\": 0.4"));
  CHECK(e.code() == Errc::Validation);
  CHECK_THAT(e.what(), ContainsSubstring("weights must sum to 1, found 0.9"));
  CHECK_THAT(e.what(), ContainsSubstring("/initial_weights"));
  CHECK_THAT(e.what(), ContainsSubstring("line 8"));
}

TEST_CASE("segments must respect the causal bound", "[scenario_file]") {
  const Error e = parse_error(replace(kTwoCards, "[[0, 1]]", "[[0, 1], [1, 3]]"));
  CHECK(e.code() == Errc::Validation);
  CHECK_THAT(e.what(), ContainsSubstring("causal bound"));
  CHECK_THAT(e.what(), ContainsSubstring("/worldlines/1/vertices/1"));
}

TEST_CASE("schema violations name the location", "[scenario_file]") {
  CHECK_THAT(parse_error(replace(kTwoCards, "\"dimension\": 1", "\"dimension\": 1, \"colour\": 2")).what(),
             ContainsSubstring("unknown key 'colour'"));
  CHECK_THAT(parse_error(replace(kTwoCards, "\"outcome\": \"found\"", "\"outcome\": \"maybe\"")).what(),
             ContainsSubstring("/measurements/0/outcome"));
  CHECK_THAT(parse_error(replace(kTwoCards, "\"target\": \"left\"", "\"target\": \"middle\"")).what(),
             ContainsSubstring("unknown worldline 'middle'"));
  CHECK_THAT(parse_error(replace(kTwoCards, "\"version\": 1", "\"version\": 2")).what(),
             ContainsSubstring("unsupported version"));
  CHECK_THAT(parse_error(replace(kTwoCards, "\"apex\": [0, 0]", "\"apex\": [0, 0.5]")).what(),
             ContainsSubstring("not on worldline"));
  CHECK_THAT(parse_error(replace(kTwoCards, "\"apex\": [0, 0]", "\"apex\": [0]")).what(),
             ContainsSubstring("expected 2 numbers"));
}

TEST_CASE("syntax errors report line and column", "[scenario_file]") {
  const Error e = parse_error("{\n  \"version\": 1,\n  \"dimension\": ,\n}");
  CHECK(e.code() == Errc::Parse);
  CHECK_THAT(e.what(), ContainsSubstring("line 3"));
}

TEST_CASE("inconsistent outcomes are rejected", "[scenario_file]") {
  const std::string two_found =
      replace(kTwoCards, R"("outcome": "found"}])",
              R"("outcome": "found"}, {"index": 2, "apex": [0, 1], "target": "right", "outcome": "found"}])");
  const Error e = parse_error(two_found);
  CHECK(e.code() == Errc::Validation);
  CHECK_THAT(e.what(), ContainsSubstring("/measurements"));
}

TEST_CASE("SI units convert at the boundary", "[scenario_file]") {
  const std::string si = replace(kTwoCards, "\"dimension\": 1",
                                 R"("units": {"c": 2.0, "time": "s", "length": "m"}, "dimension": 1)");
  const ScenarioFile f = parse_scenario(replace(si, "\"apex\": [0, 0]", "\"apex\": [3, 0]"));
  const NaturalScenario n = to_natural(f);
  CHECK(n.structure[0].apex.t() == 6.0);
  CHECK_THROWS_AS(parse_scenario(replace(si, "[[0, 1]]", "[[0, 1], [1, 3.5]]")), Error);
  CHECK_NOTHROW(parse_scenario(replace(si, "[[0, 1]]", "[[0, 1], [1, 2.9]]")));
}

TEST_CASE("round trip of generated scenarios", "[scenario_file][property]") {
  for (int d = 1; d <= 3; ++d) {
    ScenarioShape shape;
    shape.dim = d;
    for (std::size_t i = 0; i < 60; ++i) {
      const CollapseScenario sc = random_scenario(31, i, shape);
      const ScenarioFile f = scenario_from("random-" + std::to_string(i), sc.lines, sc.priors, sc.structure);
      const std::string text = serialize(f);
      const ScenarioFile back = parse_scenario(text);
      REQUIRE(back == f);
      REQUIRE(serialize(back) == text);
      const NaturalScenario n = to_natural(back);
      REQUIRE(n.lines == sc.lines);
      REQUIRE(n.priors == sc.priors);
    }
  }
}

TEST_CASE("bundled scenario files parse and round trip", "[scenario_file]") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(CONECOLLAPSE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    INFO(entry.path().filename().string());
    const std::string text = read_file(entry.path());
    const ScenarioFile f = parse_scenario(text);
    CHECK(parse_scenario(serialize(f)) == f);
    CHECK(serialize(f) == text);
  }
  CHECK(count >= 14);
}

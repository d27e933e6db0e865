#include <catch_amalgamated.hpp>

#include <algorithm>

#include "conecollapse/collapse.hpp"
#include "conecollapse/rng.hpp"

using namespace conecollapse;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<Worldline> two_lines() {
  return {Worldline::stationary("left", Event(0, 0)), Worldline::stationary("right", Event(0, 1))};
}

std::vector<Worldline> cards(std::size_t n, double spacing = 1.0) {
  std::vector<Worldline> ls;
  for (std::size_t k = 0; k < n; ++k) {
    ls.push_back(Worldline::stationary("c" + std::to_string(k), Event(0, spacing * static_cast<double>(k))));
  }
  return ls;
}

double sum_after(const WeightMap& w) {
  double s = 0.0;
  for (const LineWeights& l : w.lines()) s += l.values.back();
  return s;
}

}  // namespace

TEST_CASE("cell_signature examples", "[collapse]") {
  const CollapseStructure s({{1, Event(0, -2), "a", Outcome::Null}, {2, Event(0, 2), "b", Outcome::Null}});
  CHECK(cell_signature(Event(-3, 0), s).members == std::vector<int>{1, 2});
  CHECK(cell_signature(Event(-1, 0), s).members.empty());
  CHECK_FALSE(cell_signature(Event(-1, 0), s).on_boundary());

  const CollapseStructure one({{1, Event(0, 0), "a", Outcome::Null}});
  CHECK(cell_signature(Event(2, 1), one).members.empty());
}

TEST_CASE("cell_signature flags cone boundary points", "[collapse]") {
  const CollapseStructure one({{1, Event(0, 0), "a", Outcome::Null}});
  const CellSignature on = cell_signature(Event(-1, 1), one);
  CHECK(on.on_boundary());
  CHECK(on.boundary == std::vector<int>{1});
  // Boundary points are not in the open absolute past.
  CHECK(on.members.empty());
}

TEST_CASE("region_of examples", "[collapse]") {
  const CollapseStructure s({{1, Event(-2, 0), "a", Outcome::Null},
                             {2, Event(0, 0.5), "b", Outcome::Null},
                             {3, Event(2, 0), "c", Outcome::Found}});
  CHECK(region_of(Event(-50, 0), s).kind == Region::Kind::Uncollapsed);
  CHECK(region_of(Event(50, 0), s).kind == Region::Kind::FullyCollapsed);

  const CollapseStructure pair({{1, Event(0, -2), "a", Outcome::Null}, {2, Event(0, 2), "b", Outcome::Null}});
  const Region r = region_of(Event(-0.5, 2), pair);
  CHECK(r.kind == Region::Kind::Transitional);
  CHECK(r.signature.members == std::vector<int>{2});
}

TEST_CASE("nested_order examples", "[collapse]") {
  const NestedOrder a = nested_order(CollapseStructure({{1, Event(0, 0), "a", Outcome::Null},
                                                        {2, Event(5, 1), "b", Outcome::Null}}));
  CHECK(a.nested);
  CHECK(a.order == std::vector<int>{1, 2});

  const NestedOrder b = nested_order(CollapseStructure({{1, Event(0, -2), "a", Outcome::Null},
                                                        {2, Event(0, 2), "b", Outcome::Null}}));
  CHECK_FALSE(b.nested);
  CHECK(b.offending == std::pair<int, int>{1, 2});

  const NestedOrder c = nested_order(CollapseStructure({{1, Event(3, 3), "a", Outcome::Null}}));
  CHECK(c.nested);
  CHECK(c.order == std::vector<int>{1});

  CHECK_THROWS_AS(nested_order(CollapseStructure{}), Error);
}

TEST_CASE("nested_order sorts by causal order", "[collapse]") {
  const NestedOrder o = nested_order(CollapseStructure({{1, Event(5, 1), "a", Outcome::Null},
                                                        {2, Event(0, 0), "b", Outcome::Null},
                                                        {3, Event(9, 0), "c", Outcome::Null}}));
  CHECK(o.nested);
  CHECK(o.order == std::vector<int>{2, 1, 3});
}

TEST_CASE("layer_of examples", "[collapse]") {
  const CollapseStructure s({{1, Event(0, 0), "a", Outcome::Null}, {2, Event(5, 1), "b", Outcome::Null}});
  CHECK(layer_of(Event(2, 0), s).index == 1);
  CHECK(layer_of(Event(-10, 0), s).index == 0);
  CHECK(layer_of(Event(100, 0), s).index == 2);
  CHECK(layer_of(Event(-1, 1), s).on_boundary);

  const CollapseStructure flat({{1, Event(0, -2), "a", Outcome::Null}, {2, Event(0, 2), "b", Outcome::Null}});
  CHECK_THROWS_AS(layer_of(Event(0, 0), flat), Error);
}

TEST_CASE("apply_measurement Found on two lines", "[collapse]") {
  const auto lines = two_lines();
  const WeightMap w0 = initial_weights(lines, std::vector<double>{0.5, 0.5});
  const WeightMap w = apply_measurement(lines, w0, {1, Event(0, 0), "left", Outcome::Found}, CollapseStructure{});
  const LineWeights& l = w.line("left");
  const LineWeights& r = w.line("right");
  CHECK(l.values == std::vector<double>{0.5, 1.0});
  CHECK(l.breakpoints.front().t() == 0.0);
  CHECK(r.values == std::vector<double>{0.5, 0.0});
  CHECK_THAT(r.breakpoints.front().t(), WithinAbs(-1.0, 1e-12));
  // The crossing itself keeps the earlier weight.
  CHECK(r.value_at_time(r.breakpoints.front().t()) == 0.5);
  CHECK(r.value_at_time(-0.5) == 0.0);
}

TEST_CASE("apply_measurement Null on 52 cards", "[collapse]") {
  const auto lines = cards(52);
  const std::vector<double> priors(52, 1.0 / 52.0);
  const WeightMap w = apply_measurement(lines, initial_weights(lines, priors),
                                        {1, Event(0, 10), "c10", Outcome::Null}, CollapseStructure{});
  for (std::size_t k = 0; k < 52; ++k) {
    const LineWeights& lw = w.line(lines[k].id());
    if (k == 10) {
      CHECK(lw.values.back() == 0.0);
      CHECK(lw.breakpoints.front().t() == 0.0);
    } else {
      CHECK_THAT(lw.values.back(), WithinAbs(1.0 / 51.0, 1e-15));
      const double d = std::abs(static_cast<double>(k) - 10.0);
      CHECK_THAT(lw.breakpoints.front().t(), WithinAbs(-d, 1e-12));
    }
  }
}

TEST_CASE("apply_measurement Null on a line already at zero", "[collapse]") {
  const auto lines = two_lines();
  const std::vector<double> priors{0.5, 0.5};
  const MeasurementEvent found{1, Event(0, 0), "left", Outcome::Found};
  const CollapseStructure s({found});
  const WeightMap after_found = collapse_weights(lines, priors, s);
  const WeightMap w = apply_measurement(lines, after_found, {2, Event(5, 1), "right", Outcome::Null}, s);
  CHECK(w == after_found);
}

TEST_CASE("apply_measurement errors", "[collapse]") {
  const auto lines = two_lines();
  const std::vector<double> priors{0.5, 0.5};
  const CollapseStructure s({{1, Event(0, 0), "left", Outcome::Found}});
  const WeightMap w = collapse_weights(lines, priors, s);
  try {
    (void)apply_measurement(lines, w, {2, Event(5, 0), "left", Outcome::Null}, s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Inconsistent);
  }
  try {
    (void)apply_measurement(lines, w, {2, Event(5, 0.5), "right", Outcome::Null}, s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotOnWorldline);
  }
  CHECK_THROWS_AS(apply_measurement(lines, w, {2, Event(5, 1), "nowhere", Outcome::Null}, s), Error);
}

TEST_CASE("collapse_weights rejects bad priors and outcomes", "[collapse]") {
  const auto lines = two_lines();
  CHECK_THROWS_AS(collapse_weights(lines, std::vector<double>{0.5, 0.4}, CollapseStructure{}), Error);
  CHECK_THROWS_AS(collapse_weights(lines, std::vector<double>{0.5}, CollapseStructure{}), Error);
  const CollapseStructure two_found({{1, Event(0, 0), "left", Outcome::Found}, {2, Event(0, 1), "right", Outcome::Found}});
  try {
    (void)collapse_weights(lines, std::vector<double>{0.5, 0.5}, two_found);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Inconsistent);
  }
}

TEST_CASE("sequential_apply double inspection", "[collapse]") {
  const auto lines = two_lines();
  const WeightMap w0 = initial_weights(lines, std::vector<double>{0.5, 0.5});
  const MeasurementEvent a{1, Event(0, 0), "left", Outcome::Found};
  const MeasurementEvent b{2, Event(0, 1), "right", Outcome::Null};

  const WeightMap ab = sequential_apply(lines, w0, {a, b});
  const WeightMap ba = sequential_apply(lines, w0, {b, a});
  CHECK(ab == ba);
  CHECK(ab.line("left").values.back() == 1.0);
  CHECK(ab.line("right").values.back() == 0.0);
  // C = (-1, 0) where B's cone meets the left line, D = (-1, 1) for A on the right.
  CHECK(ab.line("left").values == std::vector<double>{0.5, 1.0});
  CHECK_THAT(ab.line("left").breakpoints.front().t(), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(ab.line("right").breakpoints.front().t(), WithinAbs(-1.0, 1e-12));

  // Each apex lies outside the other's absolute past.
  const CollapseStructure s({a, b});
  CHECK(cell_signature(a.apex, s).members == std::vector<int>{});
  CHECK(std::find(cell_signature(b.apex, s).members.begin(), cell_signature(b.apex, s).members.end(), 1) ==
        cell_signature(b.apex, s).members.end());

  CHECK(sequential_apply(lines, w0, {}) == w0);
  CHECK_THROWS_AS(sequential_apply(lines, w0, {a, {2, Event(0, 1), "right", Outcome::Found}}), Error);
}

TEST_CASE("sequential_apply is order independent for spacelike apices", "[collapse][property]") {
  CounterRng rng(314);
  int tested = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    const auto lines = cards(n, 2.0);
    std::vector<double> priors(n);
    double sum = 0.0;
    for (double& p : priors) sum += (p = rng.uniform(0.1, 1.0));
    for (double& p : priors) p /= sum;
    const WeightMap w0 = initial_weights(lines, priors);

    // Up to three spacelike apices on distinct lines, all Null.
    std::vector<MeasurementEvent> ms;
    std::vector<std::size_t> used;
    for (int i = 0; i < 3; ++i) {
      const std::size_t k = rng.below(n);
      if (std::find(used.begin(), used.end(), k) != used.end()) continue;
      const Event apex(rng.uniform(-0.9, 0.9), 2.0 * static_cast<double>(k));
      bool spacelike = true;
      for (const MeasurementEvent& m : ms) spacelike = spacelike && classify(m.apex, apex) == CausalClass::Ambiguous;
      if (!spacelike) continue;
      used.push_back(k);
      ms.push_back({static_cast<int>(ms.size() + 1), apex, lines[k].id(), Outcome::Null});
    }
    if (ms.size() < 2 || ms.size() == n) continue;
    std::vector<MeasurementEvent> rev(ms.rbegin(), ms.rend());
    REQUIRE(sequential_apply(lines, w0, ms) == sequential_apply(lines, w0, rev));
    ++tested;
  }
  CHECK(tested > 100);
}

TEST_CASE("complement rule and K minus monotonicity", "[collapse][property]") {
  CounterRng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const auto lines = cards(n);
    std::vector<double> priors(n, 1.0 / static_cast<double>(n));
    const std::size_t hidden = rng.below(n);
    std::vector<MeasurementEvent> ms;
    const std::size_t m = 1 + rng.below(3);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = rng.below(n);
      ms.push_back({static_cast<int>(i + 1), Event(rng.uniform(-3, 3), static_cast<double>(k)), lines[k].id(),
                    k == hidden ? Outcome::Found : Outcome::Null});
    }
    const CollapseStructure s(ms);
    const WeightMap w = collapse_weights(lines, priors, s);
    REQUIRE_THAT(sum_after(w), WithinAbs(1.0, 1e-12));
    for (std::size_t k = 0; k < n; ++k) {
      const LineWeights& lw = w.line(lines[k].id());
      for (const double v : lw.values) REQUIRE((v >= 0.0 && v <= 1.0));
      // Any point of the line inside every absolute past keeps its prior.
      for (double t = -20.0; t < 5.0; t += 0.37) {
        const Event p(t, static_cast<double>(k));
        const CellSignature sig = cell_signature(p, s);
        if (sig.members.size() == s.size() && !sig.on_boundary()) REQUIRE(lw.value_at_time(t) == priors[k]);
      }
    }
  }
}

TEST_CASE("transit ledger for the two-line Found case", "[collapse]") {
  const CollapseScenario sc = build_collapse(two_lines(), {0.5, 0.5},
                                             CollapseStructure({{1, Event(0, 0), "left", Outcome::Found}}));
  REQUIRE(sc.ledger.entries.size() == 1);
  const TransitEntry& e = sc.ledger.entries.front();
  CHECK(e.line == "right");
  CHECK(e.measurement == 1);
  CHECK_THAT(e.from.t(), WithinAbs(-1.0, 1e-12));
  CHECK_THAT(e.from.x(), WithinAbs(1.0, 1e-12));
  CHECK(e.to.t() == 0.0);
  CHECK_THAT(e.weight, WithinAbs(0.5, 1e-15));
}

TEST_CASE("transit ledger for the two-line Null case", "[collapse]") {
  const CollapseScenario sc = build_collapse(two_lines(), {0.5, 0.5},
                                             CollapseStructure({{1, Event(0, 0), "left", Outcome::Null}}));
  REQUIRE(sc.ledger.entries.size() == 1);
  CHECK_THAT(sc.ledger.entries.front().weight, WithinAbs(-0.5, 1e-15));
}

TEST_CASE("transit ledger is empty for a no-op measurement", "[collapse]") {
  const auto lines = two_lines();
  const std::vector<double> priors{0.5, 0.5};
  const MeasurementEvent found{1, Event(0, 0), "left", Outcome::Found};
  const WeightMap before = collapse_weights(lines, priors, CollapseStructure({found}));
  const CollapseStructure s({found, {2, Event(5, 1), "right", Outcome::Null}});
  const WeightMap after = collapse_weights(lines, priors, s);
  CHECK(after == before);
  const TransitLedger l = transit_ledger(lines, before, after, s);
  CHECK(l.entries.empty());
}

TEST_CASE("transit ledger rejects jumps off every cone", "[collapse]") {
  const auto lines = two_lines();
  const WeightMap before = initial_weights(lines, std::vector<double>{0.5, 0.5});
  const WeightMap bogus({LineWeights{"left", {Event(3, 0)}, {0.5, 1.0}}, LineWeights{"right", {}, {0.5}}});
  try {
    (void)transit_ledger(lines, before, bogus, CollapseStructure({{1, Event(0, 0), "left", Outcome::Found}}));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorruptWeights);
  }
}

TEST_CASE("ledger generators lie on past cones", "[collapse][property]") {
  CounterRng rng(21);
  std::size_t generators = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    const auto lines = cards(n);
    const std::size_t hidden = rng.below(n);
    std::vector<MeasurementEvent> ms;
    for (std::size_t i = 0; i < 1 + rng.below(3); ++i) {
      const std::size_t k = rng.below(n);
      ms.push_back({static_cast<int>(i + 1), Event(rng.uniform(-3, 3), static_cast<double>(k)), lines[k].id(),
                    k == hidden ? Outcome::Found : Outcome::Null});
    }
    const CollapseScenario sc = build_collapse(lines, std::vector<double>(n, 1.0 / static_cast<double>(n)),
                                               CollapseStructure(ms));
    for (const TransitEntry& e : sc.ledger.entries) {
      ++generators;
      const MeasurementEvent& m = *std::find_if(ms.begin(), ms.end(), [&](const auto& x) { return x.index == e.measurement; });
      REQUIRE(e.to == m.apex);
      const double scale = std::max(e.from.magnitude(), e.to.magnitude());
      REQUIRE(std::abs(interval2(e.from, e.to)) <= 1e-9 * scale * scale);
      REQUIRE(e.from.t() < e.to.t());
      for (double s : {0.0, 0.3, 0.7}) {
        REQUIRE(std::abs(interval2(e.at(s), e.to)) <= 1e-9 * scale * scale);
      }
    }
  }
  CHECK(generators > 100);
}

TEST_CASE("weight map guards", "[collapse]") {
  CHECK_THROWS_AS(WeightMap({LineWeights{"x", {Event(0, 0)}, {0.5}}}), Error);
  const WeightMap w = WeightMap::initial({{"a", 0.25}, {"b", 0.75}});
  CHECK(w.priors() == std::vector<double>{0.25, 0.75});
  CHECK_THROWS_AS(w.line("c"), Error);
}

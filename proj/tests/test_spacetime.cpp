#include <catch_amalgamated.hpp>

#include <cmath>

#include "conecollapse/rng.hpp"
#include "conecollapse/spacetime.hpp"

using namespace conecollapse;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Event random_event(CounterRng& rng, int dim, double span) {
  const double t = rng.uniform(-span, span);
  switch (dim) {
    case 1: return Event(t, rng.uniform(-span, span));
    case 2: return Event(t, rng.uniform(-span, span), rng.uniform(-span, span));
    default: return Event(t, rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(-span, span));
  }
}

Boost random_boost(CounterRng& rng, int dim, double v_max) {
  SpaceVec dir{0.0, 0.0, 0.0};
  double n = 0.0;
  while (n < 1e-3) {
    for (int i = 0; i < dim; ++i) dir[i] = rng.normal();
    n = norm(dir);
  }
  return Boost((rng.uniform(0.0, v_max) / n) * dir, dim);
}

}  // namespace

TEST_CASE("interval2 examples", "[spacetime]") {
  CHECK(interval2(Event(0, 0), Event(1, 0)) == 1.0);
  CHECK(interval2(Event(0, 0), Event(3, 4)) == -7.0);
  CHECK(interval2(Event(0, 0), Event(-1, 1)) == 0.0);
  CHECK(interval2(Event(3, 4), Event(0, 0)) == interval2(Event(0, 0), Event(3, 4)));
}

TEST_CASE("interval2 rejects mixed dimensions", "[spacetime]") {
  try {
    (void)interval2(Event(0, 0), Event(0, 0, 0));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionMismatch);
  }
}

TEST_CASE("classify examples", "[spacetime]") {
  const Event o(0, 0);
  CHECK(classify(o, Event(1, 0)) == CausalClass::AbsoluteFuture);
  CHECK(classify(o, Event(0, 1)) == CausalClass::Ambiguous);
  CHECK(classify(o, Event(-1, 1)) == CausalClass::PastLightCone);
  CHECK(classify(o, Event(1, -1)) == CausalClass::FutureLightCone);
  CHECK(classify(o, Event(-2, 1)) == CausalClass::AbsolutePast);
  CHECK(classify(o, Event(0, 0)) == CausalClass::Coincident);
  CHECK(classify(Event(3, 4), Event(3 + 1e-12, 4)) == CausalClass::Coincident);
  CHECK(classify(o, Event(1e-12, 0)) == CausalClass::AbsoluteFuture);
}

TEST_CASE("classify reports near-cone points as the cone class", "[spacetime]") {
  CHECK(classify(Event(0, 0), Event(-1, 1 + 1e-12)) == CausalClass::PastLightCone);
  CHECK(classify(Event(0, 0), Event(-1, 1 + 1e-6)) == CausalClass::Ambiguous);
  CHECK(classify(Event(0, 0), Event(-1, 1 + 1e-6), 1e-5) == CausalClass::PastLightCone);
}

TEST_CASE("boost examples", "[spacetime]") {
  const Event e(0, 1);
  const Event id = Boost::along_x(0.0).apply(e);
  CHECK(id.t() == 0.0);
  CHECK(id.x() == 1.0);

  const Event b = Boost::along_x(0.6).apply(e);
  CHECK_THAT(b.t(), WithinAbs(-0.75, 1e-15));
  CHECK_THAT(b.x(), WithinAbs(1.25, 1e-15));

  const Event twice = Boost::along_x(0.5).apply(Boost::along_x(0.5).apply(Event(0.3, -2.0)));
  const Event once = Boost::along_x(0.8).apply(Event(0.3, -2.0));
  CHECK_THAT(twice.t(), WithinAbs(once.t(), 1e-12));
  CHECK_THAT(twice.x(), WithinAbs(once.x(), 1e-12));
}

TEST_CASE("boost rejects superluminal frames", "[spacetime]") {
  for (double v : {1.0, 1.5, -1.0}) {
    try {
      (void)Boost::along_x(v);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidBoost);
    }
  }
}

TEST_CASE("boost inverse round trip in 3+1", "[spacetime]") {
  const Boost b(SpaceVec{0.3, -0.4, 0.5}, 3);
  const Event e(1.0, 2.0, -3.0, 0.5);
  const Event back = b.inverse().apply(b.apply(e));
  CHECK_THAT(back.t(), WithinAbs(e.t(), 1e-12));
  for (int i = 0; i < 3; ++i) CHECK_THAT(back.x(i), WithinAbs(e.x(i), 1e-12));
}

TEST_CASE("interval2 is boost invariant over 1e5 samples", "[spacetime][property]") {
  CounterRng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const Event a = random_event(rng, dim, 10.0);
    const Event p = random_event(rng, dim, 10.0);
    const Boost b = random_boost(rng, dim, 0.99);
    const double scale = std::max(a.magnitude(), p.magnitude());
    const double before = interval2(a, p);
    const double after = interval2(b.apply(a), b.apply(p));
    const double rel = std::abs(before - after) / (scale * scale);
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("classify is invariant under a common boost", "[spacetime][property]") {
  CounterRng rng(99);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const Event a = random_event(rng, dim, 5.0);
    const Event p = random_event(rng, dim, 5.0);
    const double scale = std::max(a.magnitude(), p.magnitude());
    if (std::abs(interval2(a, p)) <= 1e-6 * scale * scale) continue;
    const Boost b = random_boost(rng, dim, 0.99);
    ++checked;
    REQUIRE(classify(a, p) == classify(b.apply(a), b.apply(p)));
  }
  CHECK(checked > 19000);
}

TEST_CASE("classify exchange antisymmetry", "[spacetime][property]") {
  CounterRng rng(5);
  for (int i = 0; i < 20000; ++i) {
    const Event a = random_event(rng, 2, 3.0);
    const Event p = random_event(rng, 2, 3.0);
    const CausalClass ap = classify(a, p);
    const CausalClass pa = classify(p, a);
    if (ap == CausalClass::AbsolutePast) REQUIRE(pa == CausalClass::AbsoluteFuture);
    if (ap == CausalClass::AbsoluteFuture) REQUIRE(pa == CausalClass::AbsolutePast);
    if (ap == CausalClass::Ambiguous) REQUIRE(pa == CausalClass::Ambiguous);
  }
  CHECK(classify(Event(1, 1), Event(1, 1)) == CausalClass::Coincident);
  CHECK(classify(Event(0, 0), Event(-1, 1)) == CausalClass::PastLightCone);
  CHECK(classify(Event(-1, 1), Event(0, 0)) == CausalClass::FutureLightCone);
}

TEST_CASE("worldline validation", "[spacetime]") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::Parse;
  };
  CHECK(code_of([] { Worldline("w", {Event(0, 0), Event(1, 2)}); }) == Errc::InvalidWorldline);
  CHECK(code_of([] { Worldline("w", {Event(1, 0), Event(0, 0)}); }) == Errc::InvalidWorldline);
  CHECK(code_of([] { Worldline("w", {}); }) == Errc::InvalidWorldline);
  CHECK(code_of([] { Worldline("w", {Event(0, 0), Event(1, 0, 0)}); }) == Errc::DimensionMismatch);
  CHECK_NOTHROW(Worldline("photon", {Event(0, 0), Event(1, 1)}));
}

TEST_CASE("worldline evaluation and extensions", "[spacetime]") {
  const Worldline w("w", {Event(0, 0), Event(2, 1)}, SpaceVec{0, 0, 0}, SpaceVec{-0.5, 0, 0});
  CHECK(w.t_begin() == -kInfinity);
  CHECK(w.t_end() == kInfinity);
  CHECK(w.at_time(-3).x() == 0.0);
  CHECK(w.at_time(1).x() == 0.5);
  CHECK(w.at_time(4).x() == 0.0);
  CHECK(w.contains(Event(1, 0.5)));
  CHECK_FALSE(w.contains(Event(1, 0.6)));

  const Worldline finite("f", {Event(0, 0), Event(1, 0)});
  CHECK(finite.spans(0.5));
  CHECK_FALSE(finite.spans(1.5));
}

TEST_CASE("cone_cross_worldline examples", "[spacetime]") {
  const LightCone a{Event(0, 0), ConeBranch::Past};
  for (double d : {0.5, 1.0, 7.0}) {
    const auto c = cone_cross_worldline(a, Worldline::stationary("s", Event(0, d)));
    REQUIRE(c);
    CHECK_THAT(c->t(), WithinAbs(-d, 1e-12));
    CHECK_THAT(c->x(), WithinAbs(d, 1e-12));
  }

  for (double T : {1e-3, 1.0, 1e3}) {
    const Worldline photon("p", {Event(0, 0), Event(1, -1)}, SpaceVec{0, 0, 0}, SpaceVec{-1, 0, 0});
    const auto c = cone_cross_worldline(LightCone{Event(T, T), ConeBranch::Past}, photon);
    REQUIRE(c);
    CHECK(std::abs(c->t()) <= 1e-12 * T);
    CHECK(std::abs(c->x()) <= 1e-12 * T);
  }

  // A finite line that sits outside the apex's absolute past for all its life.
  const Worldline outside("o", {Event(-1, 5), Event(1, 5)});
  CHECK_FALSE(cone_cross_worldline(a, outside));
}

TEST_CASE("cone_cross_worldline rejects future branches", "[spacetime]") {
  CHECK_THROWS_AS(cone_cross_worldline(LightCone{Event(0, 0), ConeBranch::Future},
                                       Worldline::stationary("s", Event(0, 1))),
                  Error);
}

TEST_CASE("cone crossings classify as the past light cone", "[spacetime][property]") {
  CounterRng rng(11);
  int hits = 0;
  for (int i = 0; i < 5000; ++i) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    const Event apex = random_event(rng, dim, 4.0);
    const Event through = random_event(rng, dim, 4.0);
    SpaceVec v{0, 0, 0};
    for (int k = 0; k < dim; ++k) v[k] = rng.uniform(-0.5, 0.5);
    const Event bend(through.t() + 1.0, through.position() + v, dim);
    const Worldline w("w", {through, bend}, SpaceVec{0, 0, 0}, 0.5 * v);
    const auto c = cone_cross_worldline(LightCone{apex, ConeBranch::Past}, w);
    if (!c) continue;
    ++hits;
    const CausalClass k = classify(apex, *c);
    REQUIRE((k == CausalClass::PastLightCone || k == CausalClass::Coincident));
  }
  CHECK(hits > 4000);
}

TEST_CASE("first_future_contact", "[spacetime]") {
  const auto c = first_future_contact(Event(0, -1), Worldline::stationary("m", Event(0, 0)));
  REQUIRE(c);
  CHECK_THAT(c->t(), WithinAbs(1.0, 1e-12));
  CHECK_FALSE(first_future_contact(Event(0, -1), Worldline("f", {Event(-5, 0), Event(0.5, 0)})));
}

TEST_CASE("proper_time examples", "[spacetime]") {
  const Worldline s = Worldline::stationary("s", Event(0, 3));
  CHECK_THAT(proper_time(s, Event(1, 3), Event(6, 3)), WithinAbs(5.0, 1e-12));

  const Worldline photon("p", {Event(0, 0), Event(2, 2)});
  CHECK_THAT(proper_time(photon, Event(0, 0), Event(2, 2)), WithinAbs(0.0, 1e-12));

  const Worldline moving = Worldline::inertial("m", Event(0, 0), SpaceVec{0.6, 0, 0});
  CHECK_THAT(proper_time(moving, Event(0, 0), Event(1, 0.6)), WithinAbs(0.8, 1e-12));

  CHECK_THROWS_AS(proper_time(s, Event(0, 0), Event(1, 3)), Error);
}

TEST_CASE("proper_time is boost invariant", "[spacetime][property]") {
  CounterRng rng(77);
  for (int i = 0; i < 2000; ++i) {
    const Event a(rng.uniform(-2, 0), rng.uniform(-2, 2));
    const Event b(a.t() + rng.uniform(0.5, 2), a.x() + rng.uniform(-0.4, 0.4));
    const Event c(b.t() + rng.uniform(0.5, 2), b.x() + rng.uniform(-0.4, 0.4));
    const Worldline w("w", {a, b, c});
    const Boost bo = random_boost(rng, 1, 0.99);
    const double tau = proper_time(w, a, c);
    const double tau_b = proper_time(w.boosted(bo), bo.apply(a), bo.apply(c));
    REQUIRE_THAT(tau_b, WithinRel(tau, 1e-9));
  }
}

TEST_CASE("worldline boost and time reversal", "[spacetime]") {
  const Worldline w("w", {Event(0, 0), Event(1, 0.5)}, SpaceVec{0, 0, 0}, SpaceVec{0.5, 0, 0});
  const Boost b = Boost::along_x(0.3);
  const Worldline wb = w.boosted(b);
  CHECK(wb.contains(b.apply(Event(0.5, 0.25))));
  CHECK(wb.contains(b.apply(Event(-4, 0))));

  const Worldline r = w.time_reversed();
  CHECK(r.contains(Event(-0.5, 0.25)));
}

#include <catch_amalgamated.hpp>

#include "conecollapse/surface.hpp"

using namespace conecollapse;
using Catch::Matchers::WithinAbs;

TEST_CASE("surface_cross_worldline examples", "[surface]") {
  const Event a = surface_cross_worldline(FlatSlice{Boost::along_x(0.0), 0.0}, Worldline::stationary("s", Event(0, 5)));
  CHECK_THAT(a.t(), WithinAbs(0.0, 1e-12));
  CHECK(a.x() == 5.0);

  const Event b = surface_cross_worldline(GraphSurface::linear(0.0, 0.5), Worldline::stationary("s", Event(0, 2)));
  CHECK_THAT(b.t(), WithinAbs(1.0, 1e-12));
  CHECK(b.x() == 2.0);

  // gamma (t - v x) = 0 on x = 1
  const Event c = surface_cross_worldline(FlatSlice{Boost::along_x(0.6), 0.0}, Worldline::stationary("s", Event(0, 1)));
  CHECK_THAT(c.t(), WithinAbs(0.6, 1e-12));
  CHECK(c.x() == 1.0);
}

TEST_CASE("surface_cross_worldline on a bent line", "[surface]") {
  const Worldline w("w", {Event(0, 0), Event(1, 0.9), Event(3, 0.9)});
  const Event e = surface_cross_worldline(GraphSurface::linear(0.2, -0.5), w);
  CHECK(w.contains(e));
  CHECK_THAT(e.t(), WithinAbs(0.2 - 0.5 * e.x(), 1e-12));
}

TEST_CASE("surface_cross_worldline requires spanning", "[surface]") {
  const Worldline finite("f", {Event(0, 0), Event(1, 0)});
  try {
    (void)surface_cross_worldline(FlatSlice{Boost::along_x(0.0), 5.0}, finite);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotSpanning);
  }
}

TEST_CASE("validate_spacelike examples", "[surface]") {
  CHECK(validate_spacelike(GraphSurface::linear(0.0, 0.5)).ok);
  const SpacelikeCheck steep = validate_spacelike(GraphSurface::linear(0.0, 1.5));
  CHECK_FALSE(steep.ok);
  CHECK(steep.diagnostic.find("not spacelike") != std::string::npos);

  GraphSurface v;
  v.kinks.push_back({SpaceVec{0, 0, 0}, 0.999});
  CHECK(validate_spacelike(v).ok);
  CHECK_THAT(v.time_at(SpaceVec{2, 0, 0}), WithinAbs(-1.998, 1e-12));
}

TEST_CASE("validate_spacelike on sample grids", "[surface]") {
  GraphSurface g;
  g.grid = SampleGrid{0.0, 0.5, {0.0, 0.4, 0.2, 0.6}};
  CHECK(validate_spacelike(g).ok);
  g.grid->values[3] = 1.0;
  CHECK_FALSE(validate_spacelike(g).ok);
  CHECK_THAT(g.grid_value(0.25), WithinAbs(0.2, 1e-15));
  CHECK(g.grid_value(-3.0) == 0.0);
}

TEST_CASE("validate_spacelike rejects malformed descriptions", "[surface]") {
  GraphSurface g;
  g.grid = SampleGrid{0.0, 1.0, {0.0}};
  CHECK_THROWS_AS(validate_spacelike(g), Error);

  GraphSurface r;
  r.ripples.push_back({SpaceVec{1, 0, 0}, 0.0, 0.1, 0.0});
  try {
    (void)validate_spacelike(r);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedSurface);
  }

  GraphSurface grid2;
  grid2.dim = 2;
  grid2.grid = SampleGrid{0.0, 1.0, {0.0, 0.1}};
  CHECK_THROWS_AS(validate_spacelike(grid2), Error);
}

TEST_CASE("flat slice sides and boosted images", "[surface]") {
  const Hypersurface s = FlatSlice{Boost::along_x(0.5), 1.0};
  CHECK(s.below(Event(-10, 0)));
  CHECK_FALSE(s.below(Event(10, 0)));

  const Boost b = Boost::along_x(-0.3);
  const Hypersurface img = boost_surface(GraphSurface::linear(0.1, 0.4), b);
  CHECK(validate_spacelike(img).ok);
  for (double x : {-3.0, 0.0, 2.5}) {
    const Event on(0.1 + 0.4 * x, x);
    CHECK_THAT(img.side(b.apply(on)), WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("surface descriptors", "[surface]") {
  const Hypersurface s = FlatSlice{Boost::along_x(0.25), -1.5};
  CHECK(s.family() == "boosted_flat");
  CHECK(s.parameters().find(',') == std::string::npos);
  const Hypersurface g = GraphSurface::linear(0.0, 0.5);
  CHECK(g.parameters().find(',') == std::string::npos);
}

#pragma once

// Executable conservation checks: total probability on spacelike surfaces,
// failure of naive equal-time collapse, boost invariance and the c -> inf
// limit of the collapse boundary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "conecollapse/collapse.hpp"
#include "conecollapse/error.hpp"
#include "conecollapse/rng.hpp"
#include "conecollapse/spacetime.hpp"
#include "conecollapse/surface.hpp"

namespace conecollapse {

inline constexpr double kAuditTolerance = 1e-9;

struct LineCrossing {
  std::string line;
  Event at;
  double weight = 0.0;
};

struct GeneratorCrossing {
  std::size_t entry = 0;  // index into the ledger
  Event at;
  double weight = 0.0;
};

struct AuditReport {
  std::string family;
  std::string parameters;
  std::vector<LineCrossing> lines;
  std::vector<GeneratorCrossing> generators;
  double total = 0.0;
  bool pass = false;
};

struct SpatialBox {
  SpaceVec lo{0.0, 0.0, 0.0};
  SpaceVec hi{0.0, 0.0, 0.0};
  int dim = 1;

  SpaceVec center() const { return 0.5 * (lo + hi); }
};

/// Bounding box of the worldline vertices and any extra events.
inline SpatialBox spatial_box(std::span<const Worldline> lines, std::span<const Event> extra = {}) {
  if (lines.empty()) throw Error(Errc::InvalidArgument, "spatial box of an empty scenario");
  SpatialBox b;
  b.dim = lines.front().dim();
  for (int i = 0; i < b.dim; ++i) {
    b.lo[i] = kInfinity;
    b.hi[i] = -kInfinity;
  }
  auto add = [&](const Event& e) {
    for (int i = 0; i < b.dim; ++i) {
      b.lo[i] = std::min(b.lo[i], e.x(i));
      b.hi[i] = std::max(b.hi[i], e.x(i));
    }
  };
  for (const Worldline& w : lines) {
    for (const Event& v : w.vertices()) add(v);
  }
  for (const Event& e : extra) add(e);
  return b;
}

/// Sum of worldline weights on `s` plus the in-transit flux of every ledger
/// generator that `s` cuts. A generator Q -> apex is cut when Q is strictly
/// below the surface and the apex is not.
inline AuditReport audit_slice(const Hypersurface& s, std::span<const Worldline> lines, const WeightMap& weights,
                               const TransitLedger& ledger, double tolerance = kAuditTolerance) {
  const SpacelikeCheck check = validate_spacelike(s);
  if (!check.ok) throw Error(Errc::NonSpacelike, check.diagnostic);
  const SpatialBox box = spatial_box(lines);
  if (!s.spans_box(box.lo, box.hi)) {
    throw Error(Errc::NotSpanning, "surface does not cover the scenario with a 10% margin");
  }

  AuditReport r;
  r.family = s.family();
  r.parameters = s.parameters();
  double total = 0.0;
  for (const LineWeights& lw : weights.lines()) {
    const Worldline& w = lines[detail::line_position(lines, lw.line)];
    const Event at = surface_cross_worldline(s, w);
    const double v = lw.value_on(s);
    r.lines.push_back({lw.line, at, v});
    total += v;
  }
  for (std::size_t e = 0; e < ledger.entries.size(); ++e) {
    const TransitEntry& g = ledger.entries[e];
    if (!s.below(g.from) || s.below(g.to)) continue;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (s.below(g.at(mid))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double flux = g.flux_at(lo);
    r.generators.push_back({e, g.at(lo), flux});
    total += flux;
  }
  r.total = total;
  r.pass = std::abs(total - 1.0) <= tolerance;
  return r;
}

/// Weights for the rejected picture in which each measurement collapses the
/// distribution on the lab equal-time plane through its apex.
inline WeightMap naive_weights(std::span<const Worldline> lines, std::span<const double> priors,
                               const CollapseStructure& s) {
  check_priors(priors);
  check_consistent(lines, priors, s);
  const detail::Resolved r = detail::resolve(lines, s);
  std::vector<std::size_t> order(s.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a].apex.t() < s[b].apex.t(); });

  std::vector<LineWeights> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    LineWeights lw{lines[k].id(), {}, {priors[k]}};
    std::vector<char> active(s.size(), 0);
    for (std::size_t h = 0; h < order.size();) {
      const double t = s[order[h]].apex.t();
      std::size_t e = h;
      while (e < order.size() && s[order[e]].apex.t() == t) active[order[e++]] = 1;
      h = e;
      if (!lines[k].spans(t)) continue;
      const double v = detail::conditional_weight(priors, r, active, k);
      if (v != lw.values.back()) {
        lw.breakpoints.push_back(lines[k].at_time(t));
        lw.values.push_back(v);
      }
    }
    out.push_back(std::move(lw));
  }
  return WeightMap(std::move(out));
}

/// Audits naive equal-time collapse on the boosted-frame equal-time slice
/// through `pivot`. No ledger is used.
inline AuditReport audit_naive_instantaneous(std::span<const Worldline> lines, std::span<const double> priors,
                                             const CollapseStructure& s, const Boost& b, const Event& pivot,
                                             double tolerance = kAuditTolerance) {
  const WeightMap w = naive_weights(lines, priors, s);
  const double tau = b.apply(pivot).t();
  return audit_slice(FlatSlice{b, tau}, lines, w, TransitLedger{}, tolerance);
}

/// Default pivot: mean apex time above the centre of the scenario's spatial box.
inline Event naive_pivot(std::span<const Worldline> lines, const CollapseStructure& s) {
  std::vector<Event> apices;
  double t = 0.0;
  for (const MeasurementEvent& m : s.measurements()) {
    apices.push_back(m.apex);
    t += m.apex.t();
  }
  if (!apices.empty()) t /= static_cast<double>(apices.size());
  const SpatialBox box = spatial_box(lines, apices);
  return Event(t, box.center(), box.dim);
}

inline AuditReport audit_naive_instantaneous(std::span<const Worldline> lines, std::span<const double> priors,
                                             const CollapseStructure& s, const Boost& b,
                                             double tolerance = kAuditTolerance) {
  return audit_naive_instantaneous(lines, priors, s, b, naive_pivot(lines, s), tolerance);
}

struct SurfaceFamily {
  enum class Kind { BoostedFlat, LipschitzGraph };
  Kind kind = Kind::BoostedFlat;
  double bound = 0.99;  // v_max or slope_max

  static SurfaceFamily boosted_flat(double v_max) { return {Kind::BoostedFlat, v_max}; }
  static SurfaceFamily lipschitz_graph(double slope_max) { return {Kind::LipschitzGraph, slope_max}; }
};

/// Region the random surfaces are pinned to: each surface passes through a
/// uniformly drawn point of this window.
struct SurfaceWindow {
  int dim = 1;
  double t_min = -1.0;
  double t_max = 1.0;
  SpaceVec lo{-1.0, -1.0, -1.0};
  SpaceVec hi{1.0, 1.0, 1.0};
};

namespace detail {

inline SpaceVec random_direction(CounterRng& rng, int dim) {
  if (dim == 1) return {rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0, 0.0};
  for (;;) {
    SpaceVec v{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double n = norm(v);
    if (n > 1e-12) return (1.0 / n) * v;
  }
}

inline Hypersurface random_surface(CounterRng& rng, const SurfaceFamily& family, const SurfaceWindow& win) {
  const int d = win.dim;
  SpaceVec px{0.0, 0.0, 0.0};
  double extent = 0.0;
  for (int i = 0; i < d; ++i) {
    px[i] = rng.uniform(win.lo[i], win.hi[i]);
    extent = std::max(extent, win.hi[i] - win.lo[i]);
  }
  const double pt = rng.uniform(win.t_min, win.t_max);
  extent = std::max(extent, 1e-6);

  if (family.kind == SurfaceFamily::Kind::BoostedFlat) {
    const double u = rng.uniform();
    const double speed = family.bound * (1.0 - u * u);  // biased toward v_max
    const Boost b(speed * random_direction(rng, d), d);
    return FlatSlice{b, b.apply(Event(pt, px, d)).t()};
  }

  GraphSurface g;
  g.dim = d;
  const double budget = family.bound;
  const double mode = rng.uniform();
  double share[4] = {0.0, 0.0, 0.0, 0.0};
  if (mode < 0.2) {
    share[3] = 1.0;  // a single near-null V
  } else if (mode < 0.3) {
    share[0] = 1.0;  // a single near-null tilt
  } else {
    double sum = 0.0;
    for (double& s : share) sum += (s = rng.uniform(0.05, 1.0));
    for (double& s : share) s /= sum;
  }
  g.tilt = (budget * share[0]) * random_direction(rng, d);
  for (int k = 1; k <= 2; ++k) {
    if (share[k] == 0.0) continue;
    Ripple r;
    r.direction = random_direction(rng, d);
    r.wavenumber = rng.uniform(0.5, 12.0) / extent;
    r.amplitude = budget * share[k] * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    r.phase = rng.uniform(0.0, 6.283185307179586);
    g.ripples.push_back(r);
  }
  if (share[3] > 0.0) {
    Kink kink;
    for (int i = 0; i < d; ++i) kink.center[i] = rng.uniform(win.lo[i], win.hi[i]);
    kink.slope = budget * share[3] * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    g.kinks.push_back(kink);
  }
  g.offset = 0.0;
  g.offset = pt - g.time_at(px);
  return g;
}

}  // namespace detail

/// Surface `index` of the stream drawn from `seed`.
inline Hypersurface random_surface(std::uint64_t seed, std::size_t index, const SurfaceFamily& family,
                                   const SurfaceWindow& window = {}) {
  if (!(family.bound >= 0.0 && family.bound < 1.0)) {
    throw Error(Errc::InvalidArgument, "surface family bound must lie in [0, 1)");
  }
  CounterRng rng = CounterRng::derive(seed, index);
  return detail::random_surface(rng, family, window);
}

/// `n` spacelike surfaces drawn deterministically from `seed`; surface i
/// depends only on (seed, i).
inline std::vector<Hypersurface> random_surfaces(std::uint64_t seed, std::size_t n, const SurfaceFamily& family,
                                                 const SurfaceWindow& window = {}) {
  if (!(family.bound >= 0.0 && family.bound < 1.0)) {
    throw Error(Errc::InvalidArgument, "surface family bound must lie in [0, 1)");
  }
  std::vector<Hypersurface> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_surface(seed, i, family, window));
  return out;
}

/// Window covering the scenario's vertices, apices and breakpoints.
inline SurfaceWindow window_for(const CollapseScenario& sc, double margin = 0.25) {
  std::vector<Event> pts;
  for (const Worldline& w : sc.lines) pts.insert(pts.end(), w.vertices().begin(), w.vertices().end());
  for (const MeasurementEvent& m : sc.structure.measurements()) pts.push_back(m.apex);
  for (const LineWeights& l : sc.weights.lines()) pts.insert(pts.end(), l.breakpoints.begin(), l.breakpoints.end());
  SurfaceWindow win;
  win.dim = sc.lines.front().dim();
  win.t_min = kInfinity;
  win.t_max = -kInfinity;
  for (int i = 0; i < win.dim; ++i) {
    win.lo[i] = kInfinity;
    win.hi[i] = -kInfinity;
  }
  for (const Event& e : pts) {
    win.t_min = std::min(win.t_min, e.t());
    win.t_max = std::max(win.t_max, e.t());
    for (int i = 0; i < win.dim; ++i) {
      win.lo[i] = std::min(win.lo[i], e.x(i));
      win.hi[i] = std::max(win.hi[i], e.x(i));
    }
  }
  const double span = std::max(1.0, win.t_max - win.t_min);
  win.t_min -= margin * span;
  win.t_max += margin * span;
  return win;
}

/// Audits every surface, evaluating batches on worker threads; the result
/// order follows the surface order.
inline std::vector<AuditReport> audit_batch(std::span<const Hypersurface> surfaces, const CollapseScenario& sc,
                                            double tolerance = kAuditTolerance, unsigned workers = 0) {
  std::vector<AuditReport> out(surfaces.size());
  if (workers == 0) workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  const std::size_t n = surfaces.size();
  if (workers <= 1 || n < 16) {
    for (std::size_t i = 0; i < n; ++i) out[i] = audit_slice(surfaces[i], sc.lines, sc.weights, sc.ledger, tolerance);
    return out;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    jobs.push_back(std::async(std::launch::async, [&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        out[i] = audit_slice(surfaces[i], sc.lines, sc.weights, sc.ledger, tolerance);
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

/// The same scenario described in the frame moving with `b`. Weights and
/// outcomes are scalars and are carried over unchanged.
inline CollapseScenario boost_scenario(const CollapseScenario& sc, const Boost& b) {
  CollapseScenario out;
  for (const Worldline& w : sc.lines) out.lines.push_back(w.boosted(b));
  out.priors = sc.priors;
  std::vector<MeasurementEvent> ms = sc.structure.measurements();
  for (MeasurementEvent& m : ms) m.apex = b.apply(m.apex);
  out.structure = CollapseStructure(std::move(ms));
  out.weights = sc.weights.boosted(b);
  out.ledger = sc.ledger.boosted(b);
  return out;
}

struct ScenarioShape {
  int dim = 1;
  std::size_t min_lines = 2;
  std::size_t max_lines = 52;
  std::size_t min_measurements = 1;
  std::size_t max_measurements = 5;
  double half_width = 5.0;   // lines start inside [-half_width, half_width]^d
  double time_span = 3.0;    // apices lie in [-time_span, time_span]
  double max_speed = 0.7;
};

/// Randomized collapse scenario: static and bent worldlines, random priors,
/// and outcomes read off a hidden placement so they are always consistent.
inline CollapseScenario random_scenario(std::uint64_t seed, std::size_t index, const ScenarioShape& shape = {}) {
  CounterRng rng = CounterRng::derive(seed, index);
  const int d = shape.dim;
  const std::size_t n = shape.min_lines + rng.below(shape.max_lines - shape.min_lines + 1);
  const std::size_t m = shape.min_measurements + rng.below(shape.max_measurements - shape.min_measurements + 1);

  auto random_velocity = [&] {
    return rng.uniform(0.0, shape.max_speed) * detail::random_direction(rng, d);
  };
  std::vector<Worldline> lines;
  for (std::size_t k = 0; k < n; ++k) {
    SpaceVec x{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) x[i] = rng.uniform(-shape.half_width, shape.half_width);
    const std::string id = "w" + std::to_string(k);
    if (rng.uniform() < 0.5) {
      lines.push_back(Worldline::stationary(id, Event(0.0, x, d)));
      continue;
    }
    std::vector<Event> vs;
    double t = -shape.time_span;
    for (int j = 0; j < 3; ++j) {
      vs.emplace_back(t, x, d);
      const double dt = shape.time_span * rng.uniform(0.3, 1.0);
      x = x + dt * random_velocity();
      t += dt;
    }
    lines.emplace_back(id, std::move(vs), random_velocity(), random_velocity());
  }

  std::vector<double> priors(n);
  double sum = 0.0;
  for (double& p : priors) sum += (p = rng.uniform(0.05, 1.0));
  for (double& p : priors) p /= sum;

  double u = rng.uniform();
  std::size_t hidden = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (u < priors[k]) {
      hidden = k;
      break;
    }
    u -= priors[k];
  }

  std::vector<MeasurementEvent> ms;
  for (std::size_t i = 0; i < m; ++i) {
    // Favour the hidden line now and then so Found outcomes are common.
    const std::size_t k = rng.uniform() < 0.3 ? hidden : rng.below(n);
    const double t = rng.uniform(-shape.time_span, shape.time_span);
    ms.push_back({static_cast<int>(i + 1), lines[k].at_time(t), lines[k].id(),
                  k == hidden ? Outcome::Found : Outcome::Null});
  }
  return build_collapse(std::move(lines), std::move(priors), CollapseStructure(std::move(ms)));
}

struct NewtonianRow {
  double c = 0.0;
  double boundary_time = 0.0;  // apex time minus |offset| / c
  double lead = 0.0;           // |offset| / c
};

/// Collapse-boundary time at spatial distance `offset` from an apex at
/// `apex_time`, for each signal speed in `c_values`.
inline std::vector<NewtonianRow> newtonian_limit(double apex_time, double offset, const std::vector<double>& c_values) {
  std::vector<NewtonianRow> rows;
  for (std::size_t i = 0; i < c_values.size(); ++i) {
    const double c = c_values[i];
    if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "signal speed must be positive");
    if (i > 0 && !(c > c_values[i - 1])) throw Error(Errc::InvalidArgument, "signal speeds must increase");
    const double lead = std::abs(offset) / c;
    rows.push_back({c, apex_time - lead, lead});
  }
  return rows;
}

/// CSV with one row per report: surface_id,family,parameters,total,pass.
inline std::string audit_csv(const std::vector<AuditReport>& reports) {
  std::string out = "surface_id,family,parameters,total,pass\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const AuditReport& r = reports[i];
    out += std::to_string(i) + "," + r.family + "," + r.parameters + "," + detail::fmt12(r.total) + "," +
           (r.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace conecollapse

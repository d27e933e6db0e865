#pragma once

// The Queen-of-Spades game: cards mailed to static locations, inspections
// that collapse the location distribution, an exact enumeration oracle, a
// Monte Carlo cross-check and the fairness rule for inspection schedules.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conecollapse/collapse.hpp"
#include "conecollapse/error.hpp"
#include "conecollapse/rng.hpp"
#include "conecollapse/spacetime.hpp"
#include "conecollapse/surface.hpp"

namespace conecollapse {

inline std::string card_id(std::size_t k) { return "card-" + std::to_string(k); }

struct Deal {
  std::size_t n_cards = 0;
  std::vector<Worldline> lines;
  std::size_t queen_index = 0;
  std::uint64_t seed = 0;

  std::vector<double> priors() const { return std::vector<double>(n_cards, 1.0 / static_cast<double>(n_cards)); }
  WeightMap initial() const { return initial_weights(lines, priors()); }
};

/// Cards at rest at `locations`; the queen's card is drawn uniformly from
/// `seed`.
inline Deal deal(std::size_t n, const std::vector<SpaceVec>& locations, int dim, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::InvalidArgument, "a game needs at least two cards");
  if (locations.size() != n) throw Error(Errc::InvalidArgument, "one location per card required");
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (locations[a] == locations[b]) {
        throw Error(Errc::InvalidArgument, "cards " + std::to_string(a) + " and " + std::to_string(b) +
                                               " share a location");
      }
    }
  }
  Deal d;
  d.n_cards = n;
  d.seed = seed;
  for (std::size_t k = 0; k < n; ++k) d.lines.push_back(Worldline::stationary(card_id(k), Event(0.0, locations[k], dim)));
  d.queen_index = CounterRng(seed).below(n);
  return d;
}

/// Cards on the x axis at x = 0, 1, ..., n-1.
inline Deal deal(std::size_t n, std::uint64_t seed) {
  std::vector<SpaceVec> xs;
  for (std::size_t k = 0; k < n; ++k) xs.push_back({static_cast<double>(k), 0.0, 0.0});
  return deal(n, xs, 1, seed);
}

struct Inspection {
  Event at;
  std::string line;
};

struct InspectionSchedule {
  std::vector<Inspection> inspections;

  /// Every card inspected at lab time `t`.
  static InspectionSchedule all_at(const Deal& d, double t) {
    InspectionSchedule s;
    for (const Worldline& w : d.lines) s.inspections.push_back({w.at_time(t), w.id()});
    return s;
  }
};

// Fairness ------------------------------------------------------------------

struct FairnessVerdict {
  enum class Kind { Fair, FairBoundary, Unfair };
  Kind kind = Kind::Fair;
  std::string details;
  std::optional<std::pair<std::size_t, std::size_t>> pair;  // offending inspections
  std::optional<Event> apex;                                 // common cone, FairBoundary only
  std::optional<GraphSurface> witness;                       // Fair only
};

inline const char* to_string(FairnessVerdict::Kind k) noexcept {
  switch (k) {
    case FairnessVerdict::Kind::Fair: return "fair";
    case FairnessVerdict::Kind::FairBoundary: return "fair-boundary";
    case FairnessVerdict::Kind::Unfair: return "unfair";
  }
  return "unknown";
}

namespace detail {

inline bool on_past_cone_of(const Event& apex, std::span<const Event> pts, double eps) {
  for (const Event& p : pts) {
    const CausalClass c = classify(apex, p, eps);
    if (c != CausalClass::PastLightCone && c != CausalClass::Coincident) return false;
  }
  return true;
}

// Apex of a single past cone through all points, if one exists. In one
// space dimension the cone's two arms are lines of constant t - x and t + x,
// so the apex follows from the outermost points; in higher dimensions only
// the inspection points themselves are tried as apices.
inline std::optional<Event> common_past_cone(std::span<const Event> pts, double eps) {
  for (const Event& a : pts) {
    if (on_past_cone_of(a, pts, eps)) return a;
  }
  if (pts.front().dim() != 1) return std::nullopt;

  const double scale = std::max_element(pts.begin(), pts.end(), [](const Event& a, const Event& b) {
                         return a.magnitude() < b.magnitude();
                       })->magnitude();
  const double tol = eps * std::max(1.0, scale);
  auto all_equal = [&](auto key) {
    for (const Event& p : pts) {
      if (std::abs(key(p) - key(pts.front())) > tol) return false;
    }
    return true;
  };
  const auto u = [](const Event& p) { return p.t() - p.x(); };
  const auto w = [](const Event& p) { return p.t() + p.x(); };
  if (all_equal(u)) {
    // A single left arm; any apex far enough up the line's right end works.
    const Event& right = *std::max_element(pts.begin(), pts.end(), [](const Event& a, const Event& b) { return a.x() < b.x(); });
    return Event(right.t() + 1.0, right.x() + 1.0);
  }
  if (all_equal(w)) {
    const Event& left = *std::min_element(pts.begin(), pts.end(), [](const Event& a, const Event& b) { return a.x() < b.x(); });
    return Event(left.t() + 1.0, left.x() - 1.0);
  }
  const Event& left = *std::min_element(pts.begin(), pts.end(), [](const Event& a, const Event& b) { return a.x() < b.x(); });
  const Event& right = *std::max_element(pts.begin(), pts.end(), [](const Event& a, const Event& b) { return a.x() < b.x(); });
  const double u0 = u(left);
  const double w0 = w(right);
  const Event apex(0.5 * (u0 + w0), 0.5 * (w0 - u0));
  if (on_past_cone_of(apex, pts, eps)) return apex;
  return std::nullopt;
}

}  // namespace detail

/// Fair when all inspections are pairwise spacelike (a witness surface
/// through them is returned), FairBoundary when they all sit on one past
/// light cone, Unfair otherwise with the first timelike pair, or failing
/// that the first lightlike pair.
inline FairnessVerdict fairness_check(const InspectionSchedule& schedule, double eps = kDefaultEps) {
  std::vector<Event> pts;
  for (const Inspection& i : schedule.inspections) pts.push_back(i.at);
  if (pts.empty()) throw Error(Errc::InvalidArgument, "empty inspection schedule");
  for (const Event& p : pts) require_same_dim(pts.front(), p);

  std::optional<std::pair<std::size_t, std::size_t>> timelike;
  std::optional<std::pair<std::size_t, std::size_t>> lightlike;
  double ratio = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const CausalClass c = classify(pts[a], pts[b], eps);
      if (c == CausalClass::Coincident) continue;
      if ((c == CausalClass::AbsolutePast || c == CausalClass::AbsoluteFuture) && !timelike) timelike = {a, b};
      if ((c == CausalClass::PastLightCone || c == CausalClass::FutureLightCone) && !lightlike) lightlike = {a, b};
      if (c == CausalClass::Ambiguous) {
        ratio = std::max(ratio, std::abs(pts[b].t() - pts[a].t()) / spatial_distance(pts[a], pts[b]));
      }
    }
  }

  FairnessVerdict v;
  if (!timelike && !lightlike) {
    v.kind = FairnessVerdict::Kind::Fair;
    v.details = "all inspections are pairwise spacelike";
    GraphSurface g;
    g.dim = pts.front().dim();
    g.envelope = LowerEnvelope{pts, std::max(0.99, 0.5 * (1.0 + ratio))};
    v.witness = std::move(g);
    return v;
  }
  if (!timelike) {
    if (auto apex = detail::common_past_cone(pts, eps)) {
      v.kind = FairnessVerdict::Kind::FairBoundary;
      v.apex = apex;
      v.details = "all inspections lie on one past light cone";
      return v;
    }
  }
  v.kind = FairnessVerdict::Kind::Unfair;
  v.pair = timelike ? timelike : lightlike;
  v.details = std::string(timelike ? "timelike" : "lightlike, not on a common past cone,") + " pair: inspections " +
              std::to_string(v.pair->first) + " and " + std::to_string(v.pair->second);
  return v;
}

// Playing a schedule ---------------------------------------------------------

enum class ScheduleMode { RequireFair, Forced };

struct GameRun {
  std::vector<WeightMap> trajectory;  // initial map, then one per applied inspection
  CollapseStructure structure;
  TransitLedger ledger;
  std::optional<std::string> found_on;
  bool halted_early = false;
};

/// Applies the inspections in schedule order with outcomes read from the
/// hidden queen; stops at the first Found.
inline GameRun run_schedule(const Deal& d, const InspectionSchedule& schedule,
                            ScheduleMode mode = ScheduleMode::RequireFair, double eps = kDefaultEps) {
  for (const Inspection& i : schedule.inspections) {
    const Worldline& w = d.lines[detail::line_position(d.lines, i.line)];
    if (!w.contains(i.at, eps)) {
      throw Error(Errc::NotOnWorldline, "inspection of '" + i.line + "' is not on its worldline");
    }
  }
  if (mode == ScheduleMode::RequireFair && schedule.inspections.size() >= 2) {
    const FairnessVerdict f = fairness_check(schedule, eps);
    if (f.kind == FairnessVerdict::Kind::Unfair) throw Error(Errc::InvalidArgument, "unfair schedule, " + f.details);
  }

  GameRun run;
  run.trajectory.push_back(d.initial());
  const std::string queen = card_id(d.queen_index);
  for (std::size_t k = 0; k < schedule.inspections.size(); ++k) {
    const Inspection& i = schedule.inspections[k];
    const Outcome o = i.line == queen ? Outcome::Found : Outcome::Null;
    const MeasurementEvent m{static_cast<int>(k + 1), i.at, i.line, o};
    run.trajectory.push_back(apply_measurement(d.lines, run.trajectory.back(), m, run.structure, eps));
    run.structure = run.structure.with(m);
    if (o == Outcome::Found) {
      run.found_on = i.line;
      run.halted_early = k + 1 < schedule.inspections.size();
      break;
    }
  }
  run.ledger = transit_ledger(d.lines, run.trajectory.front(), run.trajectory.back(), run.structure, eps);
  return run;
}

// Exact oracle ---------------------------------------------------------------

/// Exact fraction in lowest terms with positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw Error(Errc::InvalidArgument, "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(Errc::InvalidArgument, "division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Posterior queen distribution after the cards in `null_set` were found
/// empty, by enumerating every placement of the queen.
inline std::vector<Rational> oracle_posterior(std::size_t n, const std::vector<std::size_t>& null_set) {
  if (n < 1) throw Error(Errc::InvalidArgument, "no cards");
  std::vector<char> excluded(n, 0);
  for (std::size_t k : null_set) {
    if (k >= n) throw Error(Errc::InvalidArgument, "card index out of range");
    excluded[k] = 1;
  }
  const Rational each(1, static_cast<std::int64_t>(n));
  Rational evidence;
  std::vector<Rational> joint(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (excluded[q]) continue;
    joint[q] = each;
    evidence = evidence + each;
  }
  if (evidence.num() == 0) throw Error(Errc::Inconsistent, "every card is excluded");
  for (Rational& r : joint) r = r / evidence;
  return joint;
}

// Monte Carlo ---------------------------------------------------------------

struct FrequencyRow {
  std::string line;
  double frequency = 0.0;
  double weight = 0.0;     // engine probability of Found on this line
  double bound = 0.0;      // 3 sigma binomial
  bool within = true;
};

struct MonteCarloResult {
  std::size_t trials = 0;
  std::size_t undetermined = 0;  // trials whose schedule cannot locate the queen
  std::vector<FrequencyRow> rows;
  double max_deviation = 0.0;
  bool pass = true;
};

/// Plays `trials` deals of an n-card game through the schedule template.
/// The queen of trial i is drawn from (seed, i); the Found location of each
/// possible queen comes from the engine, so trials only look it up.
inline MonteCarloResult monte_carlo(std::size_t n, const InspectionSchedule& schedule_template, std::size_t trials,
                                    std::uint64_t seed) {
  if (trials < 1) throw Error(Errc::InvalidArgument, "at least one trial required");
  Deal base = deal(n, seed);

  // Found location for each queen placement, and the engine's probability
  // of finding the queen on each line before any inspection.
  std::vector<std::optional<std::size_t>> located(n);
  for (std::size_t q = 0; q < n; ++q) {
    Deal d = base;
    d.queen_index = q;
    const GameRun run = run_schedule(d, schedule_template, ScheduleMode::Forced);
    if (run.found_on) {
      located[q] = detail::line_position(d.lines, *run.found_on);
    } else if (run.trajectory.back().lines().size() == n) {
      // Every other card came up empty: the queen is pinned to the survivor.
      const WeightMap& last = run.trajectory.back();
      for (std::size_t k = 0; k < n; ++k) {
        const LineWeights& lw = last.line(d.lines[k].id());
        if (lw.values.back() == 1.0 && lw.values.size() > 1) located[q] = k;
      }
    }
  }
  const WeightMap initial = base.initial();

  std::vector<std::size_t> counts(n, 0);
  MonteCarloResult r;
  r.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    const std::size_t q = CounterRng::derive(seed, i).below(n);
    if (located[q]) {
      ++counts[*located[q]];
    } else {
      ++r.undetermined;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    bool reachable = false;
    for (std::size_t q = 0; q < n; ++q) reachable = reachable || (located[q] && *located[q] == k);
    if (!reachable) continue;
    FrequencyRow row;
    row.line = base.lines[k].id();
    row.frequency = static_cast<double>(counts[k]) / static_cast<double>(trials);
    row.weight = initial.line(row.line).prior();
    row.bound = 3.0 * std::sqrt(row.weight * (1.0 - row.weight) / static_cast<double>(trials));
    const double dev = std::abs(row.frequency - row.weight);
    row.within = dev <= row.bound;
    r.max_deviation = std::max(r.max_deviation, dev);
    r.pass = r.pass && row.within;
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace conecollapse

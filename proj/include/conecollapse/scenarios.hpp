#pragma once

// Builders and timing analyses for EPR pairs, delayed-choice fibre layouts,
// linked detectors, extended measurement regions and the atom interferometer.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "conecollapse/collapse.hpp"
#include "conecollapse/error.hpp"
#include "conecollapse/spacetime.hpp"

namespace conecollapse {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

// EPR pair -------------------------------------------------------------------

struct EprScenario {
  Event source;
  double speed = 1.0;
  std::vector<Worldline> lines;  // "left" moves toward -x, "right" toward +x
  MeasurementEvent a;            // on "left"
  MeasurementEvent b;            // on "right"
  CollapseStructure structure;
  std::optional<Event> a_cone_on_right;  // where A's past cone leaves the partner line
  std::optional<Event> b_cone_on_left;
};

/// Two particles leaving the origin P at +-v, detected at lab times t_a (left)
/// and t_b (right). `a_outcome` says whether the left detector fires; the
/// right one reports the complement.
inline EprScenario epr_pair(double v, double t_a, double t_b, Outcome a_outcome = Outcome::Found) {
  if (!(v > 0.0 && v <= 1.0)) throw Error(Errc::InvalidArgument, "EPR speed must lie in (0, 1]");
  if (!(t_a > 0.0 && t_b > 0.0)) throw Error(Errc::InvalidArgument, "detection before the source event");
  EprScenario sc;
  sc.source = Event(0.0, 0.0);
  sc.speed = v;
  // Before P both particles sit in the source at rest.
  const SpaceVec rest{0.0, 0.0, 0.0};
  sc.lines.emplace_back("left", std::vector<Event>{sc.source, Event(1.0, -v)}, rest, SpaceVec{-v, 0.0, 0.0});
  sc.lines.emplace_back("right", std::vector<Event>{sc.source, Event(1.0, v)}, rest, SpaceVec{v, 0.0, 0.0});
  sc.a = {1, Event(t_a, -v * t_a), "left", a_outcome};
  sc.b = {2, Event(t_b, v * t_b), "right", a_outcome == Outcome::Found ? Outcome::Null : Outcome::Found};
  sc.structure = CollapseStructure({sc.a, sc.b});
  sc.a_cone_on_right = cone_cross_worldline(LightCone{sc.a.apex, ConeBranch::Past}, sc.lines[1]);
  sc.b_cone_on_left = cone_cross_worldline(LightCone{sc.b.apex, ConeBranch::Past}, sc.lines[0]);
  return sc;
}

inline EprScenario epr_pair(double v, double t_detect) { return epr_pair(v, t_detect, t_detect); }

// Delayed choice --------------------------------------------------------------

struct FibreDetector {
  double position = 0.0;     // along the line through the source
  double path_length = 0.0;  // fibre length from the source
  double speed = 0.0;        // effective propagation speed; 0 means c
};

struct DelayedChoiceGeometry {
  double source = 0.0;
  std::vector<FibreDetector> detectors;
  double c = 1.0;
};

enum class DelayedChoiceVerdict { CollapseAboveSource, CollapseAtSource };

inline const char* to_string(DelayedChoiceVerdict v) noexcept {
  return v == DelayedChoiceVerdict::CollapseAboveSource ? "collapse-above-source" : "collapse-at-source";
}

struct DelayedChoiceResult {
  double detection_time = 0.0;
  double margin = 0.0;  // time by which the detector's past cone clears the source
  DelayedChoiceVerdict verdict = DelayedChoiceVerdict::CollapseAtSource;
  Event detection;      // in (c t, x) coordinates, source at the origin
};

inline std::vector<DelayedChoiceResult> delayed_choice_check(const DelayedChoiceGeometry& g) {
  if (!(g.c > 0.0)) throw Error(Errc::InvalidArgument, "light speed must be positive");
  std::vector<DelayedChoiceResult> out;
  for (std::size_t i = 0; i < g.detectors.size(); ++i) {
    const FibreDetector& d = g.detectors[i];
    const double speed = d.speed > 0.0 ? d.speed : g.c;
    if (speed > g.c) throw Error(Errc::InvalidArgument, "propagation faster than light");
    const double distance = std::abs(d.position - g.source);
    if (!(d.path_length >= 0.0)) throw Error(Errc::InvalidArgument, "negative path length");
    DelayedChoiceResult r;
    r.detection_time = d.path_length / speed;
    r.margin = r.detection_time - distance / g.c;
    const double tol = kDefaultEps * std::max(1.0, r.detection_time);
    if (r.margin < -tol) {
      throw Error(Errc::Validation, "detector " + std::to_string(i) +
                                        " path is shorter than its straight-line distance to the source");
    }
    r.verdict = r.margin > tol ? DelayedChoiceVerdict::CollapseAboveSource : DelayedChoiceVerdict::CollapseAtSource;
    r.detection = Event(g.c * r.detection_time, d.position - g.source);
    out.push_back(r);
  }
  return out;
}

// Interferometer --------------------------------------------------------------

inline constexpr double kReferenceBeamSeparation = 2e-3;  // m, the existing apparatus

struct InterferometerTiming {
  double beam_separation = 3.0;   // m
  double atom_speed = 3000.0;     // m/s
  double laser_transit = 2e-9;    // s
  double half_life = 17e-9;       // s
  double decay_window = 8e-9;     // s
  double c = kSpeedOfLight;       // m/s
};

struct InterferometerReport {
  double precollapse_time = 0.0;     // s
  double decay_fraction = 0.0;
  double required_separation = 0.0;  // m
  double upgrade_factor = 0.0;
  bool feasible = false;
};

inline InterferometerReport interferometer_report(const InterferometerTiming& t) {
  for (double v : {t.beam_separation, t.atom_speed, t.laser_transit, t.half_life, t.decay_window, t.c}) {
    if (!(v > 0.0)) throw Error(Errc::InvalidArgument, "interferometer parameters must be positive");
  }
  InterferometerReport r;
  r.precollapse_time = t.beam_separation / t.c;
  r.decay_fraction = 1.0 - std::exp2(-t.decay_window / t.half_life);
  r.required_separation = t.c * (t.laser_transit + t.decay_window);
  r.upgrade_factor = r.required_separation / kReferenceBeamSeparation;
  r.feasible = r.precollapse_time >= t.laser_transit + t.decay_window;
  return r;
}

// Linked detectors -----------------------------------------------------------

/// Replaces measurements whose outputs are brought together on
/// `combiner` by one measurement at the earliest combiner event that has
/// received a signal from every detector.
inline MeasurementEvent reduce_linked_measurement(const std::vector<Event>& detectors, const Worldline& combiner,
                                                  Outcome outcome = Outcome::Found, int index = 1,
                                                  double eps = kDefaultEps) {
  if (detectors.empty()) throw Error(Errc::InvalidArgument, "no detector events");
  std::optional<Event> latest;
  for (const Event& d : detectors) {
    const std::optional<Event> c = first_future_contact(d, combiner);
    if (!c) throw Error(Errc::NotSpanning, "combiner worldline never receives a signal from a detector");
    if (!latest || c->t() > latest->t()) latest = c;
  }
  for (const Event& d : detectors) {
    const CausalClass k = classify(d, *latest, eps);
    if (k != CausalClass::AbsoluteFuture && k != CausalClass::FutureLightCone && k != CausalClass::Coincident) {
      throw Error(Errc::Inconsistent, "combined apex is not in the causal future of every detector");
    }
  }
  return {index, *latest, combiner.id(), outcome};
}

// Extended measurement region ---------------------------------------------------

struct ExtendedRegion {
  CollapseStructure structure;
  double diameter = 0.0;   // spatial, in the samples' length unit
  double lead_time = 0.0;  // diameter / c
};

/// One measurement per sample point of an extended detector region. All
/// samples sit on `target` and share `outcome`.
inline ExtendedRegion extended_region_collapse(const std::vector<Event>& samples, const std::string& target,
                                               Outcome outcome = Outcome::Null, double c = 1.0) {
  if (samples.empty()) throw Error(Errc::InvalidArgument, "no sample points");
  if (!(c > 0.0)) throw Error(Errc::InvalidArgument, "light speed must be positive");
  ExtendedRegion r;
  std::vector<MeasurementEvent> ms;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ms.push_back({static_cast<int>(i + 1), samples[i], target, outcome});
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      r.diameter = std::max(r.diameter, spatial_distance(samples[i], samples[j]));
    }
  }
  r.structure = CollapseStructure(std::move(ms));
  r.lead_time = r.diameter / c;
  return r;
}

}  // namespace conecollapse

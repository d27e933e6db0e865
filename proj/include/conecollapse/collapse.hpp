#pragma once

// Past-light-cone collapse of discrete per-worldline probability weights.
//
// A point p on worldline k is collapsed by measurement i when p lies strictly
// above the past light cone of the measurement apex (outside the closed
// absolute past). The weight at p is the conditional probability of the
// object being on line k given the outcomes of exactly those measurements.
// Weights are therefore piecewise constant with jumps where the line crosses
// a cone, and the result does not depend on the order in which measurements
// are supplied.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conecollapse/error.hpp"
#include "conecollapse/spacetime.hpp"
#include "conecollapse/surface.hpp"

namespace conecollapse {

enum class Outcome { Found, Null };

inline const char* to_string(Outcome o) noexcept { return o == Outcome::Found ? "found" : "null"; }

struct MeasurementEvent {
  int index = 0;
  Event apex;
  std::string target;
  Outcome outcome = Outcome::Null;

  friend bool operator==(const MeasurementEvent&, const MeasurementEvent&) = default;
};

class CollapseStructure {
 public:
  CollapseStructure() = default;
  explicit CollapseStructure(std::vector<MeasurementEvent> ms) : ms_(std::move(ms)) {}

  const std::vector<MeasurementEvent>& measurements() const noexcept { return ms_; }
  std::size_t size() const noexcept { return ms_.size(); }
  bool empty() const noexcept { return ms_.empty(); }
  const MeasurementEvent& operator[](std::size_t i) const { return ms_.at(i); }

  CollapseStructure with(MeasurementEvent m) const {
    CollapseStructure s = *this;
    s.ms_.push_back(std::move(m));
    return s;
  }

  /// p in the open absolute past of apex i (the uncollapsed side).
  bool in_absolute_past(std::size_t i, const Event& p, double eps = kDefaultEps) const {
    return classify(ms_.at(i).apex, p, eps) == CausalClass::AbsolutePast;
  }

  friend bool operator==(const CollapseStructure&, const CollapseStructure&) = default;

 private:
  std::vector<MeasurementEvent> ms_;
};

/// Indices of the measurements whose absolute past contains the point.
struct CellSignature {
  std::vector<int> members;
  std::vector<int> boundary;  // apices whose cone passes within tolerance of the point

  bool on_boundary() const noexcept { return !boundary.empty(); }
  friend bool operator==(const CellSignature&, const CellSignature&) = default;
};

inline CellSignature cell_signature(const Event& point, const CollapseStructure& s, double eps = kDefaultEps) {
  CellSignature sig;
  for (const MeasurementEvent& m : s.measurements()) {
    const CausalClass c = classify(m.apex, point, eps);
    if (c == CausalClass::AbsolutePast) sig.members.push_back(m.index);
    if (c == CausalClass::PastLightCone || c == CausalClass::Coincident) sig.boundary.push_back(m.index);
  }
  std::sort(sig.members.begin(), sig.members.end());
  std::sort(sig.boundary.begin(), sig.boundary.end());
  return sig;
}

struct Region {
  enum class Kind { Uncollapsed, FullyCollapsed, Transitional };
  Kind kind = Kind::Uncollapsed;
  CellSignature signature;
};

inline const char* to_string(Region::Kind k) noexcept {
  switch (k) {
    case Region::Kind::Uncollapsed: return "Uncollapsed";
    case Region::Kind::FullyCollapsed: return "FullyCollapsed";
    case Region::Kind::Transitional: return "Transitional";
  }
  return "?";
}

inline Region region_of(const Event& point, const CollapseStructure& s, double eps = kDefaultEps) {
  Region r;
  r.signature = cell_signature(point, s, eps);
  if (r.signature.members.size() == s.size()) {
    r.kind = Region::Kind::Uncollapsed;
  } else if (r.signature.members.empty()) {
    r.kind = Region::Kind::FullyCollapsed;
  } else {
    r.kind = Region::Kind::Transitional;
  }
  return r;
}

struct NestedOrder {
  bool nested = false;
  std::vector<int> order;                 // measurement indices, causal order
  std::pair<int, int> offending{0, 0};    // first pair not timelike-ordered
};

/// Causal order of the apices when each lies in the absolute past of the next.
inline NestedOrder nested_order(const CollapseStructure& s, double eps = kDefaultEps) {
  if (s.empty()) throw Error(Errc::InvalidArgument, "nested_order needs at least one measurement");
  std::vector<std::size_t> pos(s.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
  std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) { return s[a].apex.t() < s[b].apex.t(); });
  NestedOrder out;
  for (std::size_t k = 0; k + 1 < pos.size(); ++k) {
    const MeasurementEvent& earlier = s[pos[k]];
    const MeasurementEvent& later = s[pos[k + 1]];
    if (classify(later.apex, earlier.apex, eps) != CausalClass::AbsolutePast) {
      out.offending = {earlier.index, later.index};
      return out;
    }
  }
  out.nested = true;
  for (std::size_t p : pos) out.order.push_back(s[p].index);
  return out;
}

struct Layer {
  int index = 0;
  bool on_boundary = false;
};

/// Number of nested cones whose absolute past does not contain the point.
inline Layer layer_of(const Event& point, const CollapseStructure& s, double eps = kDefaultEps) {
  const NestedOrder order = nested_order(s, eps);
  if (!order.nested) {
    throw Error(Errc::InvalidArgument, "layer_of requires nested apices; measurements " +
                                           std::to_string(order.offending.first) + " and " +
                                           std::to_string(order.offending.second) + " are not timelike-ordered");
  }
  const CellSignature sig = cell_signature(point, s, eps);
  return {static_cast<int>(s.size() - sig.members.size()), sig.on_boundary()};
}

/// Piecewise-constant weight history of one worldline. values[0] holds on
/// the earliest piece; values[j + 1] holds strictly after breakpoints[j]. A
/// breakpoint itself carries the earlier value.
struct LineWeights {
  std::string line;
  std::vector<Event> breakpoints;
  std::vector<double> values{0.0};

  double prior() const { return values.front(); }

  double value_at_time(double t) const {
    std::size_t j = 0;
    while (j < breakpoints.size() && breakpoints[j].t() < t) ++j;
    return values[j];
  }

  double value_on(const Hypersurface& s) const {
    std::size_t j = 0;
    while (j < breakpoints.size() && s.below(breakpoints[j])) ++j;
    return values[j];
  }

  friend bool operator==(const LineWeights&, const LineWeights&) = default;
};

class WeightMap {
 public:
  WeightMap() = default;
  explicit WeightMap(std::vector<LineWeights> lines) : lines_(std::move(lines)) {
    for (const LineWeights& l : lines_) {
      if (l.values.size() != l.breakpoints.size() + 1) {
        throw Error(Errc::CorruptWeights, "line '" + l.line + "' has mismatched breakpoints and values");
      }
    }
  }

  /// Uncollapsed map with one constant weight per line.
  static WeightMap initial(const std::vector<std::pair<std::string, double>>& weights) {
    std::vector<LineWeights> ls;
    for (const auto& [id, w] : weights) ls.push_back({id, {}, {w}});
    return WeightMap(std::move(ls));
  }

  const std::vector<LineWeights>& lines() const noexcept { return lines_; }
  std::size_t size() const noexcept { return lines_.size(); }

  const LineWeights& line(const std::string& id) const {
    for (const LineWeights& l : lines_) {
      if (l.line == id) return l;
    }
    throw Error(Errc::InvalidArgument, "no weights for worldline '" + id + "'");
  }

  std::vector<double> priors() const {
    std::vector<double> p;
    p.reserve(lines_.size());
    for (const LineWeights& l : lines_) p.push_back(l.prior());
    return p;
  }

  WeightMap boosted(const Boost& b) const {
    WeightMap out = *this;
    for (LineWeights& l : out.lines_) {
      for (Event& e : l.breakpoints) e = b.apply(e);
    }
    return out;
  }

  friend bool operator==(const WeightMap&, const WeightMap&) = default;

 private:
  std::vector<LineWeights> lines_;
};

namespace detail {

inline std::size_t line_position(std::span<const Worldline> lines, const std::string& id) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].id() == id) return i;
  }
  throw Error(Errc::InvalidArgument, "unknown worldline '" + id + "'");
}

// Measurement outcomes expressed against worldline positions.
struct Resolved {
  std::vector<std::size_t> target;
  std::vector<Outcome> outcome;
};

inline Resolved resolve(std::span<const Worldline> lines, const CollapseStructure& s) {
  Resolved r;
  for (const MeasurementEvent& m : s.measurements()) {
    r.target.push_back(line_position(lines, m.target));
    r.outcome.push_back(m.outcome);
  }
  return r;
}

// Weight of line k conditioned on the measurements flagged in `active`.
inline double conditional_weight(std::span<const double> priors, const Resolved& r, const std::vector<char>& active,
                                 std::size_t k) {
  std::optional<std::size_t> found;
  std::vector<char> excluded(priors.size(), 0);
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    if (r.outcome[i] == Outcome::Found) {
      if (found && *found != r.target[i]) throw Error(Errc::Inconsistent, "two Found outcomes on different lines");
      found = r.target[i];
    } else {
      excluded[r.target[i]] = 1;
    }
  }
  if (found) {
    if (excluded[*found] || !(priors[*found] > 0.0)) {
      throw Error(Errc::Inconsistent, "Found outcome on a line already known to be empty");
    }
    return k == *found ? 1.0 : 0.0;
  }
  double denom = 0.0;
  for (std::size_t q = 0; q < priors.size(); ++q) {
    if (!excluded[q]) denom += priors[q];
  }
  if (!(denom > 0.0)) throw Error(Errc::Inconsistent, "null outcomes exclude every line");
  return excluded[k] ? 0.0 : priors[k] / denom;
}

// Where each line leaves the closed past of each apex; empty when the line
// never does (such lines are left untouched by that measurement).
inline std::vector<std::vector<std::optional<Event>>> crossings(std::span<const Worldline> lines,
                                                                const CollapseStructure& s, const Resolved& r,
                                                                double eps) {
  std::vector<std::vector<std::optional<Event>>> out(lines.size(), std::vector<std::optional<Event>>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const MeasurementEvent& m = s[i];
    const Worldline& target = lines[r.target[i]];
    if (!target.contains(m.apex, eps)) {
      throw Error(Errc::NotOnWorldline, "measurement " + std::to_string(m.index) + " apex is not on worldline '" +
                                            m.target + "'");
    }
    for (std::size_t k = 0; k < lines.size(); ++k) {
      out[k][i] = (k == r.target[i]) ? std::optional<Event>(m.apex)
                                     : cone_cross_worldline(LightCone{m.apex, ConeBranch::Past}, lines[k]);
    }
  }
  return out;
}

}  // namespace detail

/// Throws unless some placement of the object is compatible with every outcome.
inline void check_consistent(std::span<const Worldline> lines, std::span<const double> priors,
                             const CollapseStructure& s) {
  const detail::Resolved r = detail::resolve(lines, s);
  std::optional<std::size_t> found;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (r.outcome[i] != Outcome::Found) continue;
    if (found && *found != r.target[i]) {
      throw Error(Errc::Inconsistent, "measurements " + std::to_string(s[i].index) +
                                          " and an earlier one both report Found on different lines");
    }
    found = r.target[i];
  }
  for (std::size_t q = 0; q < priors.size(); ++q) {
    if (!(priors[q] > 0.0)) continue;
    if (found && *found != q) continue;
    bool ok = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (r.outcome[i] == Outcome::Null && r.target[i] == q) ok = false;
    }
    if (ok) return;
  }
  throw Error(Errc::Inconsistent, "no placement of the object is compatible with all outcomes");
}

inline void check_priors(std::span<const double> priors) {
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, "prior weights must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(Errc::InvalidArgument, "prior weights must sum to 1");
}

/// Full weight map for the given priors and measurement structure.
inline WeightMap collapse_weights(std::span<const Worldline> lines, std::span<const double> priors,
                                  const CollapseStructure& s, double eps = kDefaultEps) {
  if (lines.size() != priors.size()) throw Error(Errc::InvalidArgument, "one prior weight per worldline required");
  check_priors(priors);
  check_consistent(lines, priors, s);
  const detail::Resolved r = detail::resolve(lines, s);
  const auto cross = detail::crossings(lines, s, r, eps);

  std::vector<LineWeights> out;
  out.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    std::vector<std::pair<Event, std::size_t>> hits;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (cross[k][i]) hits.emplace_back(*cross[k][i], i);
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const auto& a, const auto& b) { return a.first.t() < b.first.t(); });
    LineWeights lw{lines[k].id(), {}, {priors[k]}};
    std::vector<char> active(s.size(), 0);
    for (std::size_t h = 0; h < hits.size();) {
      // Coincident crossings form a single breakpoint.
      std::size_t e = h;
      while (e < hits.size() && hits[e].first.t() == hits[h].first.t()) active[hits[e++].second] = 1;
      const double v = detail::conditional_weight(priors, r, active, k);
      if (v != lw.values.back()) {
        lw.breakpoints.push_back(hits[h].first);
        lw.values.push_back(v);
      }
      h = e;
    }
    out.push_back(std::move(lw));
  }
  return WeightMap(std::move(out));
}

namespace detail {

inline std::vector<double> priors_for(std::span<const Worldline> lines, const WeightMap& w) {
  std::vector<double> p;
  p.reserve(lines.size());
  for (const Worldline& l : lines) p.push_back(w.line(l.id()).prior());
  return p;
}

}  // namespace detail

/// Adds one measurement to `so_far` and returns the collapsed weights.
/// `weights` must be the map produced by `so_far`; its earliest values are
/// taken as the uncollapsed priors.
inline WeightMap apply_measurement(std::span<const Worldline> lines, const WeightMap& weights,
                                   const MeasurementEvent& m, const CollapseStructure& so_far,
                                   double eps = kDefaultEps) {
  const std::size_t t = detail::line_position(lines, m.target);
  if (!lines[t].contains(m.apex, eps)) {
    throw Error(Errc::NotOnWorldline, "measurement " + std::to_string(m.index) + " apex is not on worldline '" +
                                          m.target + "'");
  }
  const double at_apex = weights.line(m.target).value_at_time(m.apex.t());
  if (m.outcome == Outcome::Null && at_apex == 1.0) {
    throw Error(Errc::Inconsistent, "null outcome on worldline '" + m.target + "' which holds weight 1 at the apex");
  }
  if (m.outcome == Outcome::Found && at_apex == 0.0) {
    throw Error(Errc::Inconsistent, "found outcome on worldline '" + m.target + "' which holds weight 0 at the apex");
  }
  const std::vector<double> priors = detail::priors_for(lines, weights);
  return collapse_weights(lines, priors, so_far.with(m), eps);
}

/// Folds apply_measurement over `ms`. Nested (timelike-ordered) apices are
/// applied in causal order.
inline WeightMap sequential_apply(std::span<const Worldline> lines, const WeightMap& weights,
                                  const std::vector<MeasurementEvent>& ms, double eps = kDefaultEps) {
  if (ms.empty()) return weights;
  std::vector<MeasurementEvent> ordered = ms;
  const NestedOrder order = nested_order(CollapseStructure(ms), eps);
  if (order.nested) {
    std::vector<MeasurementEvent> sorted;
    for (int idx : order.order) {
      for (const MeasurementEvent& m : ms) {
        if (m.index == idx) {
          sorted.push_back(m);
          break;
        }
      }
    }
    if (sorted.size() == ms.size()) ordered = std::move(sorted);
  }
  const std::vector<double> priors = detail::priors_for(lines, weights);
  check_consistent(lines, priors, CollapseStructure(ordered));
  WeightMap w = weights;
  CollapseStructure s;
  for (const MeasurementEvent& m : ordered) {
    w = apply_measurement(lines, w, m, s, eps);
    s = s.with(m);
  }
  return w;
}

/// Piece of a generator, valid for parameters s in [s_begin, next s_begin).
struct FluxPiece {
  double s_begin = 0.0;
  double weight = 0.0;
  friend bool operator==(const FluxPiece&, const FluxPiece&) = default;
};

/// Probability in transit along the null generator from a jump point Q on a
/// worldline up to the apex of the measurement that caused the jump. The flux
/// starts at -jump(Q) and changes only where the generator passes into the
/// collapsed side of another measurement's cone.
struct TransitEntry {
  int measurement = 0;
  std::string line;
  Event from;
  Event to;
  double weight = 0.0;
  std::vector<FluxPiece> pieces;

  Event at(double s) const {
    return Event(from.t() + s * (to.t() - from.t()), from.position() + s * (to.position() - from.position()),
                 from.dim());
  }

  double flux_at(double s) const {
    double w = pieces.front().weight;
    for (const FluxPiece& p : pieces) {
      if (p.s_begin <= s) w = p.weight;
    }
    return w;
  }

  friend bool operator==(const TransitEntry&, const TransitEntry&) = default;
};

struct TransitLedger {
  std::vector<TransitEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  TransitLedger boosted(const Boost& b) const {
    TransitLedger out = *this;
    for (TransitEntry& e : out.entries) {
      e.from = b.apply(e.from);
      e.to = b.apply(e.to);
    }
    return out;
  }
  friend bool operator==(const TransitLedger&, const TransitLedger&) = default;
};

namespace detail {

inline bool same_event(const Event& a, const Event& b, double eps) {
  const double scale = std::max({1.0, a.magnitude(), b.magnitude()});
  return std::abs(a.t() - b.t()) <= eps * scale && norm(a.position() - b.position()) <= eps * scale;
}

}  // namespace detail

namespace detail {

// Generators for every jump of `s` measured from the priors.
inline TransitLedger ledger_from_priors(std::span<const Worldline> lines, const std::vector<double>& priors,
                                        const CollapseStructure& s, double eps) {
  const Resolved r = resolve(lines, s);
  const auto cross = crossings(lines, s, r, eps);
  TransitLedger ledger;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Event& apex = s[i].apex;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      if (k == r.target[i] || !cross[k][i]) continue;
      const Event& q = *cross[k][i];
      if (same_event(q, apex, eps)) continue;

      // Parameter along Q -> apex beyond which measurement j is active.
      const Worldline generator("generator", {q, apex});
      std::vector<std::pair<double, std::size_t>> switches;
      std::vector<char> active(s.size(), 0);
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j == i || !cross[k][j]) continue;
        const auto c = past_cone_crossing(s[j].apex, generator);
        if (c.kind == CrossingKind::Never) {
          active[j] = 1;
        } else if (c.kind == CrossingKind::Exits) {
          const double sp = (c.at.t() - q.t()) / (apex.t() - q.t());
          if (sp <= 0.0) {
            active[j] = 1;
          } else if (sp < 1.0) {
            switches.emplace_back(sp, j);
          }
        }
      }
      std::stable_sort(switches.begin(), switches.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });

      auto flux = [&]() {
        std::vector<char> with_i = active;
        with_i[i] = 1;
        return conditional_weight(priors, r, active, k) - conditional_weight(priors, r, with_i, k);
      };
      TransitEntry e{s[i].index, lines[k].id(), q, apex, 0.0, {{0.0, flux()}}};
      for (const auto& [sp, j] : switches) {
        active[j] = 1;
        const double w = flux();
        if (w != e.pieces.back().weight) e.pieces.push_back({sp, w});
      }
      e.weight = e.pieces.front().weight;
      bool all_zero = true;
      for (const FluxPiece& p : e.pieces) all_zero = all_zero && p.weight == 0.0;
      if (!all_zero) ledger.entries.push_back(std::move(e));
    }
  }
  return ledger;
}

inline bool weights_close(const WeightMap& a, const WeightMap& b, double eps) {
  if (a.lines().size() != b.lines().size()) return false;
  for (std::size_t k = 0; k < a.lines().size(); ++k) {
    const LineWeights& x = a.lines()[k];
    const LineWeights& y = b.lines()[k];
    if (x.line != y.line || x.values.size() != y.values.size() || x.breakpoints.size() != y.breakpoints.size()) {
      return false;
    }
    for (std::size_t j = 0; j < x.values.size(); ++j) {
      if (std::abs(x.values[j] - y.values[j]) > 1e-12) return false;
    }
    for (std::size_t j = 0; j < x.breakpoints.size(); ++j) {
      if (!same_event(x.breakpoints[j], y.breakpoints[j], eps)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// In-transit ledger explaining the jumps between `before` and `after`.
/// `before` must be the collapse under some index-ordered prefix of `s`
/// (usually the empty one); only the remaining jumps get generators.
inline TransitLedger transit_ledger(std::span<const Worldline> lines, const WeightMap& before, const WeightMap& after,
                                   const CollapseStructure& s, double eps = kDefaultEps) {
  const std::vector<double> priors = detail::priors_for(lines, before);
  const WeightMap expected = collapse_weights(lines, priors, s, eps);
  for (const LineWeights& got : after.lines()) {
    const LineWeights& want = expected.line(got.line);
    for (std::size_t j = 0; j < got.breakpoints.size(); ++j) {
      const Event& bp = got.breakpoints[j];
      bool on_cone = false;
      for (std::size_t b = 0; b < want.breakpoints.size(); ++b) {
        if (detail::same_event(bp, want.breakpoints[b], eps)) on_cone = true;
      }
      if (!on_cone) {
        throw Error(Errc::CorruptWeights, "jump on worldline '" + got.line + "' at t = " + std::to_string(bp.t()) +
                                              " does not lie on any collapse cone");
      }
    }
    if (got.values.size() != want.values.size()) {
      throw Error(Errc::CorruptWeights, "worldline '" + got.line + "' is missing collapse jumps");
    }
    for (std::size_t j = 0; j < got.values.size(); ++j) {
      if (std::abs(got.values[j] - want.values[j]) > 1e-12) {
        throw Error(Errc::CorruptWeights, "worldline '" + got.line + "' carries weights the outcomes do not imply");
      }
    }
  }

  std::vector<MeasurementEvent> ordered = s.measurements();
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const MeasurementEvent& a, const MeasurementEvent& b) { return a.index < b.index; });
  std::size_t done = ordered.size() + 1;
  for (std::size_t p = ordered.size() + 1; p-- > 0;) {
    const CollapseStructure prefix(std::vector<MeasurementEvent>(ordered.begin(), ordered.begin() + p));
    if (detail::weights_close(collapse_weights(lines, priors, prefix, eps), before, eps)) {
      done = p;
      break;
    }
  }
  if (done > ordered.size()) {
    throw Error(Errc::CorruptWeights, "weights before are not the collapse of any prefix of the measurements");
  }

  TransitLedger ledger = detail::ledger_from_priors(lines, priors, s, eps);
  if (done == 0) return ledger;
  const TransitLedger earlier = detail::ledger_from_priors(
      lines, priors, CollapseStructure(std::vector<MeasurementEvent>(ordered.begin(), ordered.begin() + done)), eps);
  for (TransitEntry e : earlier.entries) {
    const auto same = std::find(ledger.entries.begin(), ledger.entries.end(), e);
    if (same != ledger.entries.end()) {
      ledger.entries.erase(same);
      continue;
    }
    e.weight = -e.weight;
    for (FluxPiece& piece : e.pieces) piece.weight = -piece.weight;
    ledger.entries.push_back(std::move(e));
  }
  return ledger;
}

/// Worldlines, priors, outcomes and the derived weights and ledger.
struct CollapseScenario {
  std::vector<Worldline> lines;
  std::vector<double> priors;
  CollapseStructure structure;
  WeightMap weights;
  TransitLedger ledger;
};

inline WeightMap initial_weights(std::span<const Worldline> lines, std::span<const double> priors) {
  std::vector<std::pair<std::string, double>> ws;
  for (std::size_t k = 0; k < lines.size(); ++k) ws.emplace_back(lines[k].id(), priors[k]);
  return WeightMap::initial(ws);
}

inline CollapseScenario build_collapse(std::vector<Worldline> lines, std::vector<double> priors,
                                       CollapseStructure structure, double eps = kDefaultEps) {
  CollapseScenario sc{std::move(lines), std::move(priors), std::move(structure), {}, {}};
  sc.weights = collapse_weights(sc.lines, sc.priors, sc.structure, eps);
  sc.ledger = transit_ledger(sc.lines, initial_weights(sc.lines, sc.priors), sc.weights, sc.structure, eps);
  return sc;
}

}  // namespace conecollapse

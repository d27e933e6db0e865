#pragma once

// Flat (1+d)-dimensional Minkowski geometry in natural units (c = 1).
// Signature convention: interval2 = dt^2 - |dx|^2, so timelike pairs are
// positive.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conecollapse/error.hpp"

namespace conecollapse {

inline constexpr int kMaxSpaceDim = 3;
inline constexpr double kDefaultEps = 1e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Spatial vector; components past the scenario dimension are kept at zero.
using SpaceVec = std::array<double, kMaxSpaceDim>;

inline double dot(const SpaceVec& a, const SpaceVec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const SpaceVec& a) { return std::sqrt(dot(a, a)); }

inline SpaceVec operator+(const SpaceVec& a, const SpaceVec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline SpaceVec operator-(const SpaceVec& a, const SpaceVec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline SpaceVec operator*(double s, const SpaceVec& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

inline SpaceVec make_vec(std::span<const double> xs) {
  if (xs.size() > static_cast<std::size_t>(kMaxSpaceDim)) {
    throw Error(Errc::DimensionMismatch, "at most 3 spatial components supported");
  }
  SpaceVec v{0.0, 0.0, 0.0};
  std::copy(xs.begin(), xs.end(), v.begin());
  return v;
}

/// A point in (1+d)-dimensional flat spacetime, d in {1, 2, 3}.
class Event {
 public:
  Event() = default;
  Event(double t, double x) : Event(t, SpaceVec{x, 0.0, 0.0}, 1) {}
  Event(double t, double x, double y) : Event(t, SpaceVec{x, y, 0.0}, 2) {}
  Event(double t, double x, double y, double z) : Event(t, SpaceVec{x, y, z}, 3) {}
  Event(double t, std::span<const double> x) : Event(t, make_vec(x), static_cast<int>(x.size())) {}

  Event(double t, const SpaceVec& x, int dim) : t_(t), x_(x), dim_(dim) {
    if (dim < 1 || dim > kMaxSpaceDim) {
      throw Error(Errc::DimensionMismatch, "spatial dimension must be 1, 2 or 3");
    }
    for (int i = dim; i < kMaxSpaceDim; ++i) x_[i] = 0.0;
    if (!std::isfinite(t_)) throw Error(Errc::InvalidArgument, "non-finite time coordinate");
    for (int i = 0; i < dim; ++i) {
      if (!std::isfinite(x_[i])) throw Error(Errc::InvalidArgument, "non-finite spatial coordinate");
    }
  }

  double t() const noexcept { return t_; }
  double x(int i = 0) const noexcept { return x_[i]; }
  const SpaceVec& position() const noexcept { return x_; }
  std::span<const double> space() const noexcept { return {x_.data(), static_cast<std::size_t>(dim_)}; }
  int dim() const noexcept { return dim_; }

  /// Largest absolute coordinate, used to scale tolerances.
  double magnitude() const noexcept {
    double m = std::abs(t_);
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(x_[i]));
    return m;
  }

  friend bool operator==(const Event&, const Event&) = default;

 private:
  double t_ = 0.0;
  SpaceVec x_{0.0, 0.0, 0.0};
  int dim_ = 1;
};

inline void require_same_dim(const Event& a, const Event& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch,
                "events of dimension " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

inline double spatial_distance(const Event& a, const Event& b) {
  require_same_dim(a, b);
  return norm(b.position() - a.position());
}

/// Signed squared interval (dt)^2 - |dx|^2 between two events.
inline double interval2(const Event& o, const Event& p) {
  require_same_dim(o, p);
  const double dt = p.t() - o.t();
  const SpaceVec dx = p.position() - o.position();
  return dt * dt - dot(dx, dx);
}

enum class CausalClass {
  AbsolutePast,
  PastLightCone,
  Ambiguous,
  FutureLightCone,
  AbsoluteFuture,
  Coincident,
};

inline const char* to_string(CausalClass c) noexcept {
  switch (c) {
    case CausalClass::AbsolutePast: return "AbsolutePast";
    case CausalClass::PastLightCone: return "PastLightCone";
    case CausalClass::Ambiguous: return "Ambiguous";
    case CausalClass::FutureLightCone: return "FutureLightCone";
    case CausalClass::AbsoluteFuture: return "AbsoluteFuture";
    case CausalClass::Coincident: return "Coincident";
  }
  return "?";
}

/// Causal class of p relative to o. Points within eps (relative to the
/// pair's coordinate scale) of the light cone are reported as the cone
/// class rather than being bucketed into the interior or the ambiguous region.
inline CausalClass classify(const Event& o, const Event& p, double eps = kDefaultEps) {
  if (eps < 0.0) throw Error(Errc::InvalidArgument, "classification tolerance must be non-negative");
  require_same_dim(o, p);
  const double scale = std::max(o.magnitude(), p.magnitude());
  const double dt = p.t() - o.t();
  const double dx = spatial_distance(o, p);
  if (std::abs(dt) <= eps * scale && dx <= eps * scale) return CausalClass::Coincident;
  const double s = dt * dt - dx * dx;
  if (std::abs(s) <= eps * scale * scale) {
    return dt < 0.0 ? CausalClass::PastLightCone : CausalClass::FutureLightCone;
  }
  if (s < 0.0) return CausalClass::Ambiguous;
  return dt < 0.0 ? CausalClass::AbsolutePast : CausalClass::AbsoluteFuture;
}

/// Pure Lorentz boost with velocity |v| < 1.
class Boost {
 public:
  Boost() = default;

  Boost(const SpaceVec& velocity, int dim) : v_(velocity), dim_(dim) {
    if (dim < 1 || dim > kMaxSpaceDim) throw Error(Errc::DimensionMismatch, "boost dimension must be 1, 2 or 3");
    for (int i = dim; i < kMaxSpaceDim; ++i) {
      if (v_[i] != 0.0) throw Error(Errc::DimensionMismatch, "boost velocity has components beyond its dimension");
    }
    const double speed2 = dot(v_, v_);
    if (!(speed2 < 1.0)) throw Error(Errc::InvalidBoost, "boost speed must satisfy |v| < 1");
    gamma_ = 1.0 / std::sqrt(1.0 - speed2);
  }

  static Boost along_x(double v, int dim = 1) { return Boost(SpaceVec{v, 0.0, 0.0}, dim); }

  const SpaceVec& velocity() const noexcept { return v_; }
  double speed() const noexcept { return norm(v_); }
  double gamma() const noexcept { return gamma_; }
  int dim() const noexcept { return dim_; }
  Boost inverse() const { return Boost(-1.0 * v_, dim_); }

  // t' = gamma (t - v.x),  x' = x + ((gamma - 1) (v.x) / v^2 - gamma t) v
  Event apply(const Event& e) const {
    if (e.dim() != dim_) throw Error(Errc::DimensionMismatch, "boost and event dimensions differ");
    const double v2 = dot(v_, v_);
    if (v2 == 0.0) return e;
    const double vx = dot(v_, e.position());
    const double tp = gamma_ * (e.t() - vx);
    const double k = (gamma_ - 1.0) * vx / v2 - gamma_ * e.t();
    return Event(tp, e.position() + k * v_, dim_);
  }

  /// Transforms a coordinate velocity (|u| <= 1) into the boosted frame.
  SpaceVec apply_velocity(const SpaceVec& u) const {
    const Event a = apply(Event(0.0, SpaceVec{0.0, 0.0, 0.0}, dim_));
    const Event b = apply(Event(1.0, u, dim_));
    const double dt = b.t() - a.t();
    return (1.0 / dt) * (b.position() - a.position());
  }

 private:
  SpaceVec v_{0.0, 0.0, 0.0};
  int dim_ = 1;
  double gamma_ = 1.0;
};

inline Event boost(const Event& e, const Boost& b) { return b.apply(e); }

/// One straight piece of a worldline, possibly semi-infinite in time.
struct WorldlinePiece {
  Event anchor;      // a point on the piece (the finite end for extensions)
  SpaceVec velocity;
  double t_begin;    // may be -inf
  double t_end;      // may be +inf

  Event at_time(double t) const {
    return Event(t, anchor.position() + (t - anchor.t()) * velocity, anchor.dim());
  }
};

/// Piecewise-linear causal (timelike or lightlike) future-directed worldline.
class Worldline {
 public:
  Worldline() = default;

  Worldline(std::string id, std::vector<Event> vertices, std::optional<SpaceVec> initial_velocity = std::nullopt,
            std::optional<SpaceVec> terminal_velocity = std::nullopt)
      : id_(std::move(id)),
        vertices_(std::move(vertices)),
        initial_velocity_(initial_velocity),
        terminal_velocity_(terminal_velocity) {
    validate();
  }

  /// Static line through `at`, extended to t = -inf and t = +inf.
  static Worldline stationary(std::string id, const Event& at) {
    const SpaceVec zero{0.0, 0.0, 0.0};
    return Worldline(std::move(id), {at}, zero, zero);
  }

  /// Inertial line through `through` with constant velocity, unbounded both ways.
  static Worldline inertial(std::string id, const Event& through, const SpaceVec& velocity) {
    return Worldline(std::move(id), {through}, velocity, velocity);
  }

  const std::string& id() const noexcept { return id_; }
  const std::vector<Event>& vertices() const noexcept { return vertices_; }
  const std::optional<SpaceVec>& initial_velocity() const noexcept { return initial_velocity_; }
  const std::optional<SpaceVec>& terminal_velocity() const noexcept { return terminal_velocity_; }
  int dim() const noexcept { return vertices_.front().dim(); }

  double t_begin() const noexcept { return initial_velocity_ ? -kInfinity : vertices_.front().t(); }
  double t_end() const noexcept { return terminal_velocity_ ? kInfinity : vertices_.back().t(); }
  bool spans(double t) const noexcept { return t >= t_begin() && t <= t_end(); }

  /// Pieces in time order: optional initial extension, the finite segments,
  /// optional terminal extension. A single vertex with no extensions yields
  /// one degenerate piece.
  std::vector<WorldlinePiece> pieces() const {
    std::vector<WorldlinePiece> out;
    if (initial_velocity_) {
      out.push_back({vertices_.front(), *initial_velocity_, -kInfinity, vertices_.front().t()});
    }
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      const Event& a = vertices_[i];
      const Event& b = vertices_[i + 1];
      const double dt = b.t() - a.t();
      out.push_back({a, (1.0 / dt) * (b.position() - a.position()), a.t(), b.t()});
    }
    if (terminal_velocity_) {
      out.push_back({vertices_.back(), *terminal_velocity_, vertices_.back().t(), kInfinity});
    }
    if (out.empty()) {
      out.push_back({vertices_.front(), SpaceVec{0.0, 0.0, 0.0}, vertices_.front().t(), vertices_.front().t()});
    }
    return out;
  }

  Event at_time(double t) const {
    if (!spans(t)) {
      throw Error(Errc::NotSpanning, "worldline '" + id_ + "' does not reach t = " + std::to_string(t));
    }
    for (const Event& v : vertices_) {
      if (v.t() == t) return v;
    }
    for (const WorldlinePiece& p : pieces()) {
      if (t >= p.t_begin && t <= p.t_end) return p.at_time(t);
    }
    return vertices_.back();
  }

  bool contains(const Event& e, double eps = kDefaultEps) const {
    if (e.dim() != dim()) return false;
    const double scale = std::max(1.0, e.magnitude());
    if (!spans(e.t())) {
      // Allow for the time coordinate being a hair outside a finite end.
      const double t = std::clamp(e.t(), t_begin(), t_end());
      if (std::abs(t - e.t()) > eps * scale) return false;
      return norm(at_time(t).position() - e.position()) <= eps * scale;
    }
    return norm(at_time(e.t()).position() - e.position()) <= eps * scale;
  }

  Worldline boosted(const Boost& b) const {
    std::vector<Event> vs;
    vs.reserve(vertices_.size());
    for (const Event& v : vertices_) vs.push_back(b.apply(v));
    std::optional<SpaceVec> iv;
    std::optional<SpaceVec> tv;
    if (initial_velocity_) iv = b.apply_velocity(*initial_velocity_);
    if (terminal_velocity_) tv = b.apply_velocity(*terminal_velocity_);
    return Worldline(id_, std::move(vs), iv, tv);
  }

  /// Same path traversed with t -> -t.
  Worldline time_reversed() const {
    std::vector<Event> vs;
    vs.reserve(vertices_.size());
    for (auto it = vertices_.rbegin(); it != vertices_.rend(); ++it) {
      vs.push_back(Event(-it->t(), it->position(), it->dim()));
    }
    std::optional<SpaceVec> iv;
    std::optional<SpaceVec> tv;
    if (terminal_velocity_) iv = -1.0 * *terminal_velocity_;
    if (initial_velocity_) tv = -1.0 * *initial_velocity_;
    return Worldline(id_, std::move(vs), iv, tv);
  }

  friend bool operator==(const Worldline&, const Worldline&) = default;

 private:
  void validate() const {
    if (vertices_.empty()) throw Error(Errc::InvalidWorldline, "worldline '" + id_ + "' has no vertices");
    const int d = vertices_.front().dim();
    for (const Event& v : vertices_) {
      if (v.dim() != d) throw Error(Errc::DimensionMismatch, "worldline '" + id_ + "' mixes dimensions");
    }
    constexpr double kSlack = 1e-12;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
      const Event& a = vertices_[i];
      const Event& b = vertices_[i + 1];
      const double dt = b.t() - a.t();
      if (!(dt > 0.0)) {
        throw Error(Errc::InvalidWorldline, "worldline '" + id_ + "' vertex times must be strictly increasing");
      }
      const double dx = spatial_distance(a, b);
      if (dx > dt * (1.0 + kSlack)) {
        throw Error(Errc::InvalidWorldline, "worldline '" + id_ + "' segment " + std::to_string(i) +
                                                " violates the causal bound |dx| <= dt");
      }
    }
    for (const auto* ext : {&initial_velocity_, &terminal_velocity_}) {
      if (!*ext) continue;
      for (int i = d; i < kMaxSpaceDim; ++i) {
        if ((**ext)[i] != 0.0) throw Error(Errc::DimensionMismatch, "extension velocity exceeds dimension");
      }
      if (norm(**ext) > 1.0 + kSlack) {
        throw Error(Errc::InvalidWorldline, "worldline '" + id_ + "' extension exceeds the speed of light");
      }
    }
  }

  std::string id_;
  std::vector<Event> vertices_{Event()};
  std::optional<SpaceVec> initial_velocity_;
  std::optional<SpaceVec> terminal_velocity_;
};

enum class ConeBranch { Past, Future };

struct LightCone {
  Event apex;
  ConeBranch branch = ConeBranch::Past;
};

namespace detail {

// g(t) = (t - t_a) + |x(t) - x_a| is nondecreasing along any causal
// future-directed line and vanishes on the past cone of the apex.
inline double past_cone_gap(const Event& apex, const Event& e) {
  return (e.t() - apex.t()) + norm(e.position() - apex.position());
}

// Limit of the gap at the open end of a semi-infinite piece.
inline double gap_limit_at_minus_infinity(const Event& apex, const WorldlinePiece& p) {
  const double u2 = dot(p.velocity, p.velocity);
  if (u2 < 1.0 - 1e-15) return -kInfinity;
  const SpaceVec y0 = p.anchor.position() - apex.position() + (apex.t() - p.anchor.t()) * p.velocity;
  return -dot(y0, p.velocity) / std::sqrt(u2);
}

enum class CrossingKind { Never, Exits, NeverExits };

struct Crossing {
  CrossingKind kind = CrossingKind::Never;
  Event at;
};

// Time of the past-cone crossing on the infinite line carrying `p`, or
// nullopt when the closed-form root degenerates.
inline std::optional<double> solve_piece(const Event& apex, const WorldlinePiece& p) {
  // y(tau) = y0 + u tau with tau = t - t_a; solve tau = -|y(tau)|.
  const SpaceVec y0 = p.anchor.position() - apex.position() + (apex.t() - p.anchor.t()) * p.velocity;
  const double b = dot(y0, p.velocity);
  const double y2 = dot(y0, y0);
  const double k = std::max(0.0, 1.0 - dot(p.velocity, p.velocity));
  if (y2 == 0.0) return apex.t();
  const double denom = b + std::sqrt(b * b + k * y2);
  if (!(denom > 0.0)) return std::nullopt;
  return apex.t() - y2 / denom;
}

inline Crossing past_cone_crossing(const Event& apex, const Worldline& w) {
  require_same_dim(apex, w.vertices().front());
  const auto pieces = w.pieces();
  const double scale = std::max(1.0, apex.magnitude());
  const double touch = 1e-12 * scale;

  const WorldlinePiece& first = pieces.front();
  const double g_start = std::isfinite(first.t_begin) ? past_cone_gap(apex, first.at_time(first.t_begin))
                                                      : gap_limit_at_minus_infinity(apex, first);
  if (g_start > touch) return {CrossingKind::Never, {}};

  for (const WorldlinePiece& p : pieces) {
    double g_end = kInfinity;
    if (std::isfinite(p.t_end)) g_end = past_cone_gap(apex, w.at_time(p.t_end));
    if (g_end <= touch) continue;

    double lo = p.t_begin;
    double hi = p.t_end;
    std::optional<double> t = solve_piece(apex, p);
    if (t && (!std::isfinite(lo) || *t >= lo) && (!std::isfinite(hi) || *t <= hi)) {
      return {CrossingKind::Exits, w.at_time(*t)};
    }
    if (t) {
      // Round-off put the root just outside the piece.
      double clamped = *t;
      if (std::isfinite(lo)) clamped = std::max(clamped, lo);
      if (std::isfinite(hi)) clamped = std::min(clamped, hi);
      return {CrossingKind::Exits, w.at_time(clamped)};
    }
    // Degenerate closed form: bisect on the monotone gap.
    if (!std::isfinite(lo)) {
      lo = std::isfinite(hi) ? hi - 1.0 : apex.t() - 1.0;
      while (past_cone_gap(apex, p.at_time(lo)) > 0.0) lo -= 2.0 * (hi - lo);
    }
    if (!std::isfinite(hi)) {
      hi = lo + 1.0;
      while (past_cone_gap(apex, p.at_time(hi)) <= 0.0) hi += 2.0 * (hi - lo);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * scale; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (past_cone_gap(apex, p.at_time(mid)) <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return {CrossingKind::Exits, w.at_time(lo)};
  }
  return {CrossingKind::NeverExits, {}};
}

}  // namespace detail

/// Event where `w` leaves the closed causal past of the cone apex, i.e. the
/// last point of the worldline on or inside the past light cone. Empty when
/// the worldline never reaches the closed past or never leaves it.
inline std::optional<Event> cone_cross_worldline(const LightCone& cone, const Worldline& w) {
  if (cone.branch != ConeBranch::Past) {
    throw Error(Errc::InvalidArgument, "cone_cross_worldline expects a past light cone");
  }
  const detail::Crossing c = detail::past_cone_crossing(cone.apex, w);
  if (c.kind == detail::CrossingKind::Exits) return c.at;
  return std::nullopt;
}

/// Earliest event of `w` in the closed causal future of `apex`.
inline std::optional<Event> first_future_contact(const Event& apex, const Worldline& w) {
  const Worldline reversed = w.time_reversed();
  const Event mirrored(-apex.t(), apex.position(), apex.dim());
  const detail::Crossing c = detail::past_cone_crossing(mirrored, reversed);
  switch (c.kind) {
    case detail::CrossingKind::Never: return std::nullopt;
    case detail::CrossingKind::Exits: return Event(-c.at.t(), c.at.position(), c.at.dim());
    case detail::CrossingKind::NeverExits: {
      const double t0 = w.t_begin();
      if (!std::isfinite(t0)) return std::nullopt;
      return w.vertices().front();
    }
  }
  return std::nullopt;
}

/// Elapsed proper time along `w` between two of its events.
inline double proper_time(const Worldline& w, const Event& e1, const Event& e2, double eps = kDefaultEps) {
  if (!w.contains(e1, eps) || !w.contains(e2, eps)) {
    throw Error(Errc::NotOnWorldline, "proper_time endpoints must lie on worldline '" + w.id() + "'");
  }
  if (e1.t() > e2.t()) throw Error(Errc::InvalidArgument, "proper_time requires t(e1) <= t(e2)");
  double total = 0.0;
  for (const WorldlinePiece& p : w.pieces()) {
    const double a = std::max(p.t_begin, e1.t());
    const double b = std::min(p.t_end, e2.t());
    if (!(b > a)) continue;
    const double dt = b - a;
    const SpaceVec dx = dt * p.velocity;
    total += std::sqrt(std::max(0.0, dt * dt - dot(dx, dx)));
  }
  return total;
}

}  // namespace conecollapse

#pragma once

// Spacelike hypersurfaces used as global "instants" for conservation audits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "conecollapse/error.hpp"
#include "conecollapse/spacetime.hpp"

namespace conecollapse {

/// Equal-time hyperplane tau = const of the inertial frame moving with `frame`.
struct FlatSlice {
  Boost frame;
  double tau = 0.0;

  /// Lab time of the slice above spatial point x: t = tau / gamma + v.x
  double time_at(const SpaceVec& x) const { return tau / frame.gamma() + dot(frame.velocity(), x); }
};

/// amplitude * sin(k (direction . x) + phase) / k; gradient bounded by |amplitude|.
struct Ripple {
  SpaceVec direction{1.0, 0.0, 0.0};
  double wavenumber = 1.0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// -slope * |x - center|; a negative slope gives an upward V.
struct Kink {
  SpaceVec center{0.0, 0.0, 0.0};
  double slope = 0.0;
};

/// min_i (t_i + slope * |x - x_i|): the lower envelope of relaxed future cones.
struct LowerEnvelope {
  std::vector<Event> points;
  double slope = 0.99;
};

/// Uniformly spaced samples in one spatial dimension, linearly interpolated
/// and held constant beyond the end samples.
struct SampleGrid {
  double x0 = 0.0;
  double spacing = 1.0;
  std::vector<double> values;

  double x_end() const { return x0 + spacing * static_cast<double>(values.size() - 1); }
};

/// Spacelike graph t = f(x) built from analytic terms (summed) and an
/// optional sample grid. The Lipschitz bound is the sum of the terms' bounds.
struct GraphSurface {
  int dim = 1;
  double offset = 0.0;
  SpaceVec tilt{0.0, 0.0, 0.0};
  std::vector<Ripple> ripples;
  std::vector<Kink> kinks;
  std::optional<LowerEnvelope> envelope;
  std::optional<SampleGrid> grid;

  double time_at(const SpaceVec& x) const {
    double t = offset + dot(tilt, x);
    for (const Ripple& r : ripples) {
      t += r.amplitude * std::sin(r.wavenumber * dot(r.direction, x) + r.phase) / r.wavenumber;
    }
    for (const Kink& k : kinks) t -= k.slope * norm(x - k.center);
    if (envelope) {
      double m = kInfinity;
      for (const Event& p : envelope->points) m = std::min(m, p.t() + envelope->slope * norm(x - p.position()));
      t += m;
    }
    if (grid) t += grid_value(x[0]);
    return t;
  }

  double grid_value(double x) const {
    const SampleGrid& g = *grid;
    if (x <= g.x0) return g.values.front();
    if (x >= g.x_end()) return g.values.back();
    const double u = (x - g.x0) / g.spacing;
    const auto i = std::min(static_cast<std::size_t>(u), g.values.size() - 2);
    const double f = u - static_cast<double>(i);
    return g.values[i] + f * (g.values[i + 1] - g.values[i]);
  }

  double lipschitz_bound() const {
    double b = norm(tilt);
    for (const Ripple& r : ripples) b += std::abs(r.amplitude);
    for (const Kink& k : kinks) b += std::abs(k.slope);
    if (envelope) b += envelope->slope;
    if (grid) {
      double m = 0.0;
      for (std::size_t i = 0; i + 1 < grid->values.size(); ++i) {
        m = std::max(m, std::abs(grid->values[i + 1] - grid->values[i]) / grid->spacing);
      }
      b += m;
    }
    return b;
  }

  static GraphSurface linear(double offset, double slope) {
    GraphSurface g;
    g.offset = offset;
    g.tilt = {slope, 0.0, 0.0};
    return g;
  }
};

class Hypersurface;

/// Image of another surface under a boost.
struct BoostedSurface {
  std::shared_ptr<const Hypersurface> base;
  Boost boost;
};

class Hypersurface {
 public:
  using Shape = std::variant<FlatSlice, GraphSurface, BoostedSurface>;

  Hypersurface(FlatSlice s) : shape_(std::move(s)) {}           // NOLINT(google-explicit-constructor)
  Hypersurface(GraphSurface s) : shape_(std::move(s)) {}        // NOLINT(google-explicit-constructor)
  Hypersurface(BoostedSurface s) : shape_(std::move(s)) {       // NOLINT(google-explicit-constructor)
    if (!std::get<BoostedSurface>(shape_).base) throw Error(Errc::MalformedSurface, "boosted surface without base");
    inverse_ = std::get<BoostedSurface>(shape_).boost.inverse();
  }

  const Shape& shape() const noexcept { return shape_; }

  int dim() const {
    if (const auto* f = std::get_if<FlatSlice>(&shape_)) return f->frame.dim();
    if (const auto* g = std::get_if<GraphSurface>(&shape_)) return g->dim;
    return std::get<BoostedSurface>(shape_).boost.dim();
  }

  /// Signed offset of `e` from the surface: negative below, positive above.
  /// For boosted images only the sign is meaningful.
  double side(const Event& e) const {
    if (const auto* f = std::get_if<FlatSlice>(&shape_)) return e.t() - f->time_at(e.position());
    if (const auto* g = std::get_if<GraphSurface>(&shape_)) return e.t() - g->time_at(e.position());
    const auto& b = std::get<BoostedSurface>(shape_);
    return b.base->side(inverse_.apply(e));
  }

  bool below(const Event& e) const { return side(e) < 0.0; }

  /// Lab time of the surface above spatial point x.
  double time_at(const SpaceVec& x) const {
    if (const auto* f = std::get_if<FlatSlice>(&shape_)) return f->time_at(x);
    if (const auto* g = std::get_if<GraphSurface>(&shape_)) return g->time_at(x);
    // The vertical line through x is timelike, so it meets the image once.
    const int d = dim();
    auto h = [&](double t) { return side(Event(t, x, d)); };
    double lo = -1.0;
    double hi = 1.0;
    for (int i = 0; i < 2000 && h(lo) >= 0.0; ++i) lo *= 2.0;
    for (int i = 0; i < 2000 && h(hi) < 0.0; ++i) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (h(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  /// True when the surface is defined over [lo, hi] widened by `margin` of its width.
  bool spans_box(const SpaceVec& lo, const SpaceVec& hi, double margin = 0.1) const {
    if (const auto* g = std::get_if<GraphSurface>(&shape_)) {
      if (!g->grid) return true;
      const double w = hi[0] - lo[0];
      return g->grid->x0 <= lo[0] - margin * w && g->grid->x_end() >= hi[0] + margin * w;
    }
    return true;
  }

  std::string family() const {
    if (std::holds_alternative<FlatSlice>(shape_)) return "boosted_flat";
    if (std::holds_alternative<GraphSurface>(shape_)) return "lipschitz_graph";
    return "boosted_image";
  }

  std::string parameters() const;

 private:
  Shape shape_;
  Boost inverse_;
};

namespace detail {

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt_vec(const SpaceVec& v, int dim) {
  std::string s = "(";
  for (int i = 0; i < dim; ++i) {
    if (i) s += ' ';
    s += fmt12(v[i]);
  }
  return s + ")";
}

}  // namespace detail

inline std::string Hypersurface::parameters() const {
  using detail::fmt12;
  using detail::fmt_vec;
  if (const auto* f = std::get_if<FlatSlice>(&shape_)) {
    return "v=" + fmt_vec(f->frame.velocity(), f->frame.dim()) + ";tau=" + fmt12(f->tau);
  }
  if (const auto* g = std::get_if<GraphSurface>(&shape_)) {
    std::string s = "offset=" + fmt12(g->offset) + ";tilt=" + fmt_vec(g->tilt, g->dim);
    for (const Ripple& r : g->ripples) {
      s += ";ripple=" + fmt_vec(r.direction, g->dim) + " k=" + fmt12(r.wavenumber) + " a=" + fmt12(r.amplitude) +
           " phi=" + fmt12(r.phase);
    }
    for (const Kink& k : g->kinks) s += ";kink=" + fmt_vec(k.center, g->dim) + " s=" + fmt12(k.slope);
    if (g->envelope) {
      s += ";envelope=" + std::to_string(g->envelope->points.size()) + " s=" + fmt12(g->envelope->slope);
    }
    if (g->grid) s += ";grid=" + std::to_string(g->grid->values.size()) + " dx=" + fmt12(g->grid->spacing);
    return s;
  }
  const auto& b = std::get<BoostedSurface>(shape_);
  return "boost=" + fmt_vec(b.boost.velocity(), b.boost.dim()) + ";base=[" + b.base->family() + ";" +
         b.base->parameters() + "]";
}

struct SpacelikeCheck {
  bool ok = false;
  double slope_bound = 0.0;
  std::string diagnostic;
};

inline void check_well_formed(const GraphSurface& g) {
  if (g.dim < 1 || g.dim > kMaxSpaceDim) throw Error(Errc::MalformedSurface, "graph dimension must be 1, 2 or 3");
  if (!std::isfinite(g.offset)) throw Error(Errc::MalformedSurface, "non-finite offset");
  for (const Ripple& r : g.ripples) {
    if (!(r.wavenumber > 0.0) || !std::isfinite(r.amplitude) || !std::isfinite(r.phase)) {
      throw Error(Errc::MalformedSurface, "ripple needs a positive wavenumber and finite amplitude/phase");
    }
    if (std::abs(norm(r.direction) - 1.0) > 1e-9) throw Error(Errc::MalformedSurface, "ripple direction not unit");
  }
  if (g.envelope) {
    if (g.envelope->points.empty()) throw Error(Errc::MalformedSurface, "envelope without points");
    if (!(g.envelope->slope >= 0.0)) throw Error(Errc::MalformedSurface, "envelope slope must be non-negative");
  }
  if (g.grid) {
    if (g.dim != 1) throw Error(Errc::MalformedSurface, "sample grids are one-dimensional");
    if (g.grid->values.size() < 2) throw Error(Errc::MalformedSurface, "sample grid needs at least two samples");
    if (!(g.grid->spacing > 0.0)) throw Error(Errc::MalformedSurface, "sample grid spacing must be positive");
    for (double v : g.grid->values) {
      if (!std::isfinite(v)) throw Error(Errc::MalformedSurface, "non-finite grid sample");
    }
  }
}

/// Spacelike iff the declared slope bound (or every adjacent grid slope) is < 1.
inline SpacelikeCheck validate_spacelike(const Hypersurface& s) {
  if (const auto* f = std::get_if<FlatSlice>(&s.shape())) {
    return {true, f->frame.speed(), "flat slice, |v| = " + detail::fmt12(f->frame.speed())};
  }
  if (const auto* g = std::get_if<GraphSurface>(&s.shape())) {
    check_well_formed(*g);
    const double b = g->lipschitz_bound();
    if (b < 1.0) return {true, b, "slope bound " + detail::fmt12(b) + " < 1"};
    return {false, b, "slope bound " + detail::fmt12(b) + " >= 1: surface is not spacelike"};
  }
  const auto& b = std::get<BoostedSurface>(s.shape());
  SpacelikeCheck c = validate_spacelike(*b.base);
  c.diagnostic = "boosted image; base " + c.diagnostic;
  return c;
}

/// The unique event where causal worldline `w` meets spacelike surface `s`.
inline Event surface_cross_worldline(const Hypersurface& s, const Worldline& w) {
  if (s.dim() != w.dim()) throw Error(Errc::DimensionMismatch, "surface and worldline dimensions differ");
  auto h = [&](double t) { return s.side(w.at_time(t)); };
  const auto& verts = w.vertices();

  // Bracket the crossing between consecutive sample times.
  double lo = 0.0;
  double hi = 0.0;
  std::size_t first_above = verts.size();
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (s.side(verts[i]) >= 0.0) {
      first_above = i;
      break;
    }
  }
  if (first_above == verts.size()) {
    if (!w.terminal_velocity()) {
      throw Error(Errc::NotSpanning, "worldline '" + w.id() + "' ends below the surface");
    }
    lo = verts.back().t();
    double step = std::max(1.0, std::abs(lo));
    hi = lo + step;
    for (int i = 0; h(hi) < 0.0; ++i) {
      if (i > 2000) throw Error(Errc::NotSpanning, "worldline '" + w.id() + "' never reaches the surface");
      lo = hi;
      step *= 2.0;
      hi = lo + step;
    }
  } else if (first_above == 0) {
    if (s.side(verts[0]) == 0.0) return verts[0];
    if (!w.initial_velocity()) {
      throw Error(Errc::NotSpanning, "worldline '" + w.id() + "' starts above the surface");
    }
    hi = verts[0].t();
    double step = std::max(1.0, std::abs(hi));
    lo = hi - step;
    for (int i = 0; h(lo) >= 0.0; ++i) {
      if (i > 2000) throw Error(Errc::NotSpanning, "worldline '" + w.id() + "' never reaches the surface");
      hi = lo;
      step *= 2.0;
      lo = hi - step;
    }
  } else {
    lo = verts[first_above - 1].t();
    hi = verts[first_above].t();
  }

  if (const auto* f = std::get_if<FlatSlice>(&s.shape())) {
    // Linear on a single piece: solve t = tau/gamma + v.(x0 + u (t - t0)).
    const Event a = w.at_time(lo);
    const Event b = w.at_time(hi);
    const SpaceVec u = (1.0 / (hi - lo)) * (b.position() - a.position());
    const SpaceVec& v = f->frame.velocity();
    const double denom = 1.0 - dot(v, u);
    if (denom > 0.0) {
      const double t = (f->tau / f->frame.gamma() + dot(v, a.position()) - dot(v, u) * a.t()) / denom;
      return w.at_time(std::clamp(t, lo, hi));
    }
  }

  for (int i = 0; i < 400 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (h(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return w.at_time(0.5 * (lo + hi));
}

/// Image of `s` under boost `b`. Flat slices map to flat slices exactly.
inline Hypersurface boost_surface(const Hypersurface& s, const Boost& b) {
  if (const auto* f = std::get_if<FlatSlice>(&s.shape())) {
    // Covector n = (1, -v) with n.E = tau/gamma maps to Lambda(-b) n.
    const int d = f->frame.dim();
    const Event n(1.0, -1.0 * f->frame.velocity(), d);
    const Event np = b.inverse().apply(n);
    const SpaceVec w = (-1.0 / np.t()) * np.position();
    const Boost frame(w, d);
    const double level = f->tau / f->frame.gamma() / np.t();
    return FlatSlice{frame, level * frame.gamma()};
  }
  return BoostedSurface{std::make_shared<const Hypersurface>(s), b};
}

}  // namespace conecollapse

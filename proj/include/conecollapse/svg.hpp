#pragma once

// Spacetime diagrams in 1+1 dimensions: time up, space to the right, equal
// scales so light rays run at 45 degrees. Output is byte-stable: elements in
// fixed order, every coordinate printed with three decimals.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "conecollapse/collapse.hpp"
#include "conecollapse/error.hpp"
#include "conecollapse/scenario_file.hpp"
#include "conecollapse/spacetime.hpp"

namespace conecollapse {

struct DiagramSpec {
  Viewport view;  // natural units
  int grid = 400;
  bool cones = true;
  bool weight_labels = true;
  double plot_size = 400.0;  // pixels along the longer axis
  double margin = 24.0;
  std::vector<FlatSlice> slices;
  std::vector<Annotation> annotations;  // natural units
};

namespace svg_detail {

inline constexpr const char* kWhite = "#ffffff";
inline constexpr const char* kGray = "#b4b4b4";
inline constexpr const char* kDarkGray = "#6e6e6e";

inline std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Canvas {
  Viewport v;
  double scale = 1.0;
  double margin = 0.0;

  double px(double x) const { return margin + (x - v.x_min) * scale; }
  double py(double t) const { return margin + (v.t_max - t) * scale; }
  double width() const { return (v.x_max - v.x_min) * scale + 2.0 * margin; }
  double height() const { return (v.t_max - v.t_min) * scale + 2.0 * margin; }
};

// Liang-Barsky clip of the segment a-b (as (t, x) pairs) to the viewport.
inline std::optional<std::pair<std::pair<double, double>, std::pair<double, double>>> clip(
    const Viewport& v, double t0, double x0, double t1, double x1) {
  double lo = 0.0;
  double hi = 1.0;
  const double dt = t1 - t0;
  const double dx = x1 - x0;
  const double p[4] = {-dx, dx, -dt, dt};
  const double q[4] = {x0 - v.x_min, v.x_max - x0, t0 - v.t_min, v.t_max - t0};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      lo = std::max(lo, r);
    } else {
      hi = std::min(hi, r);
    }
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(std::make_pair(t0 + lo * dt, x0 + lo * dx), std::make_pair(t0 + hi * dt, x0 + hi * dx));
}

inline void line(std::string& out, const Canvas& c, double t0, double x0, double t1, double x1, const char* style) {
  const auto seg = clip(c.v, t0, x0, t1, x1);
  if (!seg) return;
  out += "<line x1=\"" + f3(c.px(seg->first.second)) + "\" y1=\"" + f3(c.py(seg->first.first)) + "\" x2=\"" +
         f3(c.px(seg->second.second)) + "\" y2=\"" + f3(c.py(seg->second.first)) + "\" " + style + "/>\n";
}

inline const char* shade(const Event& p, const CollapseStructure& s, bool nested) {
  const Region r = region_of(p, s);
  if (nested) {
    const int layer = static_cast<int>(s.size() - r.signature.members.size());
    if (layer == 0) return kWhite;
    return layer % 2 == 1 ? kGray : kDarkGray;
  }
  switch (r.kind) {
    case Region::Kind::Uncollapsed: return kWhite;
    case Region::Kind::Transitional: return kDarkGray;
    case Region::Kind::FullyCollapsed: return kGray;
  }
  return kWhite;
}

inline std::string label(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", w);
  return buf;
}

}  // namespace svg_detail

/// Default viewport: every finite vertex and apex with a unit border,
/// widened to a square.
inline Viewport default_viewport(std::span<const Worldline> lines, const CollapseStructure& s) {
  double t0 = kInfinity, t1 = -kInfinity, x0 = kInfinity, x1 = -kInfinity;
  auto add = [&](const Event& e) {
    t0 = std::min(t0, e.t());
    t1 = std::max(t1, e.t());
    x0 = std::min(x0, e.x());
    x1 = std::max(x1, e.x());
  };
  for (const Worldline& w : lines) {
    for (const Event& e : w.vertices()) add(e);
  }
  for (const MeasurementEvent& m : s.measurements()) add(m.apex);
  const double side = std::max({t1 - t0, x1 - x0, 1.0}) + 2.0;
  const double tc = 0.5 * (t0 + t1);
  const double xc = 0.5 * (x0 + x1);
  return {tc - 0.5 * side, tc + 0.5 * side, xc - 0.5 * side, xc + 0.5 * side};
}

inline std::string emit_svg(const CollapseScenario& sc, const DiagramSpec& spec) {
  for (const Worldline& w : sc.lines) {
    if (w.dim() != 1) throw Error(Errc::InvalidArgument, "diagrams support one space dimension only");
  }
  if (spec.grid < 2) throw Error(Errc::InvalidArgument, "diagram grid must be at least 2");
  using namespace svg_detail;
  const Viewport& v = spec.view;
  const double extent = std::max(v.x_max - v.x_min, v.t_max - v.t_min);
  Canvas c{v, spec.plot_size / extent, spec.margin};

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f3(c.width()) + "\" height=\"" +
         f3(c.height()) + "\" viewBox=\"0 0 " + f3(c.width()) + " " + f3(c.height()) + "\">\n";
  out += "<rect x=\"0.000\" y=\"0.000\" width=\"" + f3(c.width()) + "\" height=\"" + f3(c.height()) +
         "\" fill=\"#ffffff\"/>\n";

  // Region shading, one run-length merged row of cells at a time.
  out += "<g id=\"regions\" stroke=\"none\">\n";
  const double h = extent / spec.grid;
  const int nx = std::max(1, static_cast<int>(std::lround((v.x_max - v.x_min) / h)));
  const int nt = std::max(1, static_cast<int>(std::lround((v.t_max - v.t_min) / h)));
  const double cw = (v.x_max - v.x_min) / nx;
  const double ch = (v.t_max - v.t_min) / nt;
  const bool nested = sc.structure.size() >= 2 && nested_order(sc.structure).nested;
  if (!sc.structure.empty()) {
    for (int j = 0; j < nt; ++j) {
      const double t = v.t_max - (j + 0.5) * ch;
      int i = 0;
      while (i < nx) {
        const char* fill = shade(Event(t, v.x_min + (i + 0.5) * cw), sc.structure, nested);
        int k = i + 1;
        while (k < nx && shade(Event(t, v.x_min + (k + 0.5) * cw), sc.structure, nested) == fill) ++k;
        if (fill != kWhite) {
          out += "<rect x=\"" + f3(c.px(v.x_min + i * cw)) + "\" y=\"" + f3(c.py(v.t_max - j * ch)) + "\" width=\"" +
                 f3((k - i) * cw * c.scale) + "\" height=\"" + f3(ch * c.scale) + "\" fill=\"" + fill + "\"/>\n";
        }
        i = k;
      }
    }
  }
  out += "</g>\n";

  out += "<rect x=\"" + f3(c.px(v.x_min)) + "\" y=\"" + f3(c.py(v.t_max)) + "\" width=\"" +
         f3((v.x_max - v.x_min) * c.scale) + "\" height=\"" + f3((v.t_max - v.t_min) * c.scale) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";

  const double reach = 2.0 * extent + std::abs(v.t_max) + std::abs(v.t_min) + std::abs(v.x_max) + std::abs(v.x_min);
  if (spec.cones) {
    out += "<g id=\"cones\" stroke=\"#000000\" stroke-width=\"0.8\" stroke-dasharray=\"4 2\">\n";
    for (const MeasurementEvent& m : sc.structure.measurements()) {
      const double ta = m.apex.t();
      const double xa = m.apex.x();
      line(out, c, ta, xa, ta - reach, xa - reach, "");
      line(out, c, ta, xa, ta - reach, xa + reach, "");
    }
    out += "</g>\n";
  }

  out += "<g id=\"slices\" stroke=\"#000000\" stroke-width=\"0.5\">\n";
  for (const FlatSlice& s : spec.slices) {
    line(out, c, s.time_at({-reach, 0.0, 0.0}), -reach, s.time_at({reach, 0.0, 0.0}), reach, "");
  }
  out += "</g>\n";

  out += "<g id=\"transit\" stroke=\"#000000\" stroke-width=\"2.5\">\n";
  for (const TransitEntry& e : sc.ledger.entries) line(out, c, e.from.t(), e.from.x(), e.to.t(), e.to.x(), "");
  out += "</g>\n";

  out += "<g id=\"worldlines\" stroke=\"#000000\" stroke-width=\"1.5\">\n";
  for (const Worldline& w : sc.lines) {
    for (const WorldlinePiece& p : w.pieces()) {
      const double a = std::max(p.t_begin, v.t_min - 1.0);
      const double b = std::min(p.t_end, v.t_max + 1.0);
      if (!(a < b)) continue;
      const Event ea = p.at_time(a);
      const Event eb = p.at_time(b);
      line(out, c, ea.t(), ea.x(), eb.t(), eb.x(), "");
    }
  }
  out += "</g>\n";

  if (spec.weight_labels) {
    out += "<g id=\"weights\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#000000\">\n";
    for (const Worldline& w : sc.lines) {
      const LineWeights& lw = sc.weights.line(w.id());
      for (std::size_t j = 0; j < lw.values.size(); ++j) {
        double a = j == 0 ? v.t_min : lw.breakpoints[j - 1].t();
        double b = j < lw.breakpoints.size() ? lw.breakpoints[j].t() : v.t_max;
        a = std::max({a, v.t_min, w.t_begin()});
        b = std::min({b, v.t_max, w.t_end()});
        if (!(a < b)) continue;
        const Event mid = w.at_time(0.5 * (a + b));
        if (mid.x() < v.x_min || mid.x() > v.x_max) continue;
        out += "<text x=\"" + f3(c.px(mid.x()) + 4.0) + "\" y=\"" + f3(c.py(mid.t())) + "\">" + label(lw.values[j]) +
               "</text>\n";
      }
    }
    out += "</g>\n";
  }

  out += "<g id=\"apices\" fill=\"#000000\">\n";
  for (const MeasurementEvent& m : sc.structure.measurements()) {
    out += "<circle cx=\"" + f3(c.px(m.apex.x())) + "\" cy=\"" + f3(c.py(m.apex.t())) + "\" r=\"3.000\"/>\n";
  }
  out += "</g>\n";

  out += "<g id=\"annotations\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n";
  for (const Annotation& a : spec.annotations) {
    out += "<text x=\"" + f3(c.px(a.at[1]) + 5.0) + "\" y=\"" + f3(c.py(a.at[0]) - 5.0) + "\">" + escape(a.text) +
           "</text>\n";
  }
  out += "</g>\n";
  out += "</svg>\n";
  return out;
}

/// Diagram for a scenario file, using its render hints.
inline std::string emit_svg(const ScenarioFile& f) {
  if (f.dimension != 1) throw Error(Errc::InvalidArgument, "diagrams support one space dimension only");
  NaturalScenario n = to_natural(f);
  const CollapseScenario sc = build_collapse(std::move(n.lines), std::move(n.priors), std::move(n.structure));
  DiagramSpec spec;
  if (f.render.viewport) {
    const Viewport& v = *f.render.viewport;
    spec.view = {f.units.c * v.t_min, f.units.c * v.t_max, v.x_min, v.x_max};
  } else {
    spec.view = default_viewport(sc.lines, sc.structure);
  }
  spec.grid = f.render.grid;
  spec.cones = f.render.cones;
  spec.weight_labels = f.worldlines.size() <= 16;
  for (const SliceHint& h : f.render.slices) {
    spec.slices.push_back(FlatSlice{Boost::along_x(h.boost / f.units.c, 1), f.units.c * h.tau});
  }
  for (const Annotation& a : f.render.annotations) spec.annotations.push_back({{f.units.c * a.at[0], a.at[1]}, a.text});
  return emit_svg(sc, spec);
}

}  // namespace conecollapse

#pragma once

// Versioned JSON scenario files. Values are kept in file units so that
// serialize(parse(text)) reproduces the same document; to_natural() converts
// to c = 1 coordinates for the engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conecollapse/collapse.hpp"
#include "conecollapse/error.hpp"
#include "conecollapse/spacetime.hpp"

namespace conecollapse {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kScenarioVersion = 1;

struct Units {
  double c = 1.0;
  std::string time = "natural";
  std::string length = "natural";
  friend bool operator==(const Units&, const Units&) = default;
};

struct WorldlineSpec {
  std::string id;
  std::vector<std::vector<double>> vertices;  // [t, x, ...] in file units
  std::optional<std::vector<double>> initial_velocity;
  std::optional<std::vector<double>> terminal_velocity;
  friend bool operator==(const WorldlineSpec&, const WorldlineSpec&) = default;
};

struct MeasurementSpec {
  int index = 0;
  std::vector<double> apex;
  std::string target;
  Outcome outcome = Outcome::Null;
  friend bool operator==(const MeasurementSpec&, const MeasurementSpec&) = default;
};

struct FamilySpec {
  std::string kind;  // "boosted_flat" or "lipschitz_graph"
  double bound = 0.99;
  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

struct AuditConfig {
  std::uint64_t seed = 7;
  std::size_t surfaces = 100;
  std::vector<FamilySpec> families;
  double tolerance = 1e-9;
  friend bool operator==(const AuditConfig&, const AuditConfig&) = default;
};

struct Viewport {
  double t_min = -1.0;
  double t_max = 1.0;
  double x_min = -1.0;
  double x_max = 1.0;
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct Annotation {
  std::vector<double> at;
  std::string text;
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct SliceHint {
  double boost = 0.0;  // velocity in file units
  double tau = 0.0;    // time in the boosted frame, file units
  friend bool operator==(const SliceHint&, const SliceHint&) = default;
};

struct RenderHints {
  std::optional<Viewport> viewport;
  int grid = 400;
  bool cones = true;
  std::vector<SliceHint> slices;
  std::vector<Annotation> annotations;
  friend bool operator==(const RenderHints&, const RenderHints&) = default;
};

struct ScenarioFile {
  int version = kScenarioVersion;
  std::string name;
  std::string description;
  Units units;
  int dimension = 1;
  std::vector<WorldlineSpec> worldlines;
  std::vector<std::pair<std::string, double>> initial_weights;
  std::vector<MeasurementSpec> measurements;
  AuditConfig audit;
  RenderHints render;
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

namespace detail {

// Source positions of every value in a JSON document, keyed by JSON pointer.
// Only run on text nlohmann has already accepted.
class PositionIndex {
 public:
  explicit PositionIndex(std::string_view text) : text_(text) {
    line_starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') line_starts_.push_back(i + 1);
    }
    value("");
  }

  std::pair<std::size_t, std::size_t> line_col(std::size_t offset) const {
    const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
    return {line, offset - line_starts_[line - 1] + 1};
  }

  /// Position of `pointer`, or of its nearest ancestor present in the text.
  std::pair<std::size_t, std::size_t> locate(std::string pointer) const {
    for (;;) {
      const auto it = at_.find(pointer);
      if (it != at_.end()) return line_col(it->second);
      if (pointer.empty()) return {1, 1};
      pointer.erase(pointer.rfind('/'));
    }
  }

 private:
  void ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) ++pos_;
  }

  std::string string() {
    std::string out;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        out += text_[pos_++];
      }
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void value(const std::string& path) {
    ws();
    at_[path] = pos_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      for (;;) {
        ws();
        if (text_[pos_] == '}') break;
        const std::string key = string();
        ws();
        ++pos_;  // ':'
        value(path + "/" + escape(key));
        ws();
        if (text_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      for (std::size_t i = 0;; ++i) {
        ws();
        if (text_[pos_] == ']') break;
        value(path + "/" + std::to_string(i));
        ws();
        if (text_[pos_] == ',') ++pos_;
      }
      ++pos_;
    } else if (c == '"') {
      string();
    } else {
      while (pos_ < text_.size() && std::string_view(",}] \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::size_t> line_starts_;
  std::map<std::string, std::size_t> at_;
};

class ScenarioReader {
 public:
  ScenarioReader(const ordered_json& doc, const PositionIndex& index) : doc_(doc), index_(index) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    const auto [line, col] = index_.locate(pointer);
    throw Error(Errc::Validation, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                      (pointer.empty() ? "/" : pointer) + ": " + what);
  }

  const ordered_json& object(const ordered_json& j, const std::string& p, std::initializer_list<std::string_view> keys) const {
    if (!j.is_object()) fail(p, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) fail(p + "/" + it.key(), "unknown key '" + it.key() + "'");
    }
    return j;
  }

  const ordered_json& require(const ordered_json& j, const std::string& p, const std::string& key) const {
    if (!j.contains(key)) fail(p, "missing required key '" + key + "'");
    return j.at(key);
  }

  double number(const ordered_json& j, const std::string& p) const {
    if (!j.is_number()) fail(p, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(p, "expected a finite number");
    return v;
  }

  std::int64_t integer(const ordered_json& j, const std::string& p) const {
    if (!j.is_number_integer()) fail(p, "expected an integer");
    return j.get<std::int64_t>();
  }

  std::string text(const ordered_json& j, const std::string& p) const {
    if (!j.is_string()) fail(p, "expected a string");
    return j.get<std::string>();
  }

  std::vector<double> numbers(const ordered_json& j, const std::string& p, std::size_t size) const {
    if (!j.is_array()) fail(p, "expected an array of numbers");
    if (j.size() != size) fail(p, "expected " + std::to_string(size) + " numbers, found " + std::to_string(j.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], p + "/" + std::to_string(i)));
    return out;
  }

  const ordered_json& array(const ordered_json& j, const std::string& p) const {
    if (!j.is_array()) fail(p, "expected an array");
    return j;
  }

  ScenarioFile read() const {
    ScenarioFile s;
    object(doc_, "", {"version", "name", "description", "units", "dimension", "worldlines", "initial_weights",
                      "measurements", "audit", "render"});
    const std::int64_t version = integer(require(doc_, "", "version"), "/version");
    if (version != kScenarioVersion) fail("/version", "unsupported version " + std::to_string(version));
    s.version = static_cast<int>(version);
    if (doc_.contains("name")) s.name = text(doc_["name"], "/name");
    if (doc_.contains("description")) s.description = text(doc_["description"], "/description");
    if (doc_.contains("units")) read_units(s);
    const std::int64_t d = integer(require(doc_, "", "dimension"), "/dimension");
    if (d < 1 || d > kMaxSpaceDim) fail("/dimension", "dimension must be 1, 2 or 3");
    s.dimension = static_cast<int>(d);
    read_worldlines(s);
    read_weights(s);
    if (doc_.contains("measurements")) read_measurements(s);
    if (doc_.contains("audit")) read_audit(s);
    if (doc_.contains("render")) read_render(s);
    return s;
  }

 private:
  void read_units(ScenarioFile& s) const {
    const ordered_json& u = object(doc_["units"], "/units", {"c", "time", "length"});
    if (u.contains("c")) s.units.c = number(u["c"], "/units/c");
    if (!(s.units.c > 0.0)) fail("/units/c", "light speed must be positive");
    if (u.contains("time")) s.units.time = text(u["time"], "/units/time");
    if (u.contains("length")) s.units.length = text(u["length"], "/units/length");
  }

  void read_worldlines(ScenarioFile& s) const {
    const ordered_json& ws = array(require(doc_, "", "worldlines"), "/worldlines");
    if (ws.empty()) fail("/worldlines", "at least one worldline required");
    const std::size_t d = static_cast<std::size_t>(s.dimension);
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const std::string p = "/worldlines/" + std::to_string(k);
      object(ws[k], p, {"id", "vertices", "initial_velocity", "terminal_velocity"});
      WorldlineSpec w;
      w.id = text(require(ws[k], p, "id"), p + "/id");
      if (w.id.empty()) fail(p + "/id", "empty worldline id");
      for (const WorldlineSpec& other : s.worldlines) {
        if (other.id == w.id) fail(p + "/id", "duplicate worldline id '" + w.id + "'");
      }
      const ordered_json& vs = array(require(ws[k], p, "vertices"), p + "/vertices");
      if (vs.empty()) fail(p + "/vertices", "at least one vertex required");
      for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string vp = p + "/vertices/" + std::to_string(i);
        w.vertices.push_back(numbers(vs[i], vp, d + 1));
        if (i == 0) continue;
        const std::vector<double>& a = w.vertices[i - 1];
        const std::vector<double>& b = w.vertices[i];
        const double dt = b[0] - a[0];
        if (!(dt > 0.0)) fail(vp, "vertex times must strictly increase");
        double dx2 = 0.0;
        for (std::size_t j = 1; j <= d; ++j) dx2 += (b[j] - a[j]) * (b[j] - a[j]);
        if (std::sqrt(dx2) > s.units.c * dt * (1.0 + 1e-12)) {
          fail(vp, "segment violates the causal bound |dx| <= c dt");
        }
      }
      for (const char* key : {"initial_velocity", "terminal_velocity"}) {
        if (!ws[k].contains(key)) continue;
        const std::string vp = p + "/" + key;
        std::vector<double> v = numbers(ws[k][key], vp, d);
        double v2 = 0.0;
        for (double c : v) v2 += c * c;
        if (std::sqrt(v2) > s.units.c * (1.0 + 1e-12)) fail(vp, "extension faster than light");
        (std::string_view(key) == "initial_velocity" ? w.initial_velocity : w.terminal_velocity) = std::move(v);
      }
      s.worldlines.push_back(std::move(w));
    }
  }

  void read_weights(ScenarioFile& s) const {
    const ordered_json& ws = require(doc_, "", "initial_weights");
    if (!ws.is_object()) fail("/initial_weights", "expected an object mapping worldline ids to weights");
    double sum = 0.0;
    for (auto it = ws.begin(); it != ws.end(); ++it) {
      const std::string p = "/initial_weights/" + it.key();
      const bool known = std::any_of(s.worldlines.begin(), s.worldlines.end(),
                                     [&](const WorldlineSpec& w) { return w.id == it.key(); });
      if (!known) fail(p, "unknown worldline '" + it.key() + "'");
      const double v = number(it.value(), p);
      if (v < 0.0 || v > 1.0) fail(p, "weight must lie in [0, 1]");
      s.initial_weights.emplace_back(it.key(), v);
      sum += v;
    }
    for (const WorldlineSpec& w : s.worldlines) {
      if (!ws.contains(w.id)) fail("/initial_weights", "no weight for worldline '" + w.id + "'");
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", sum);
      fail("/initial_weights", std::string("weights must sum to 1, found ") + buf);
    }
  }

  void read_measurements(ScenarioFile& s) const {
    const ordered_json& ms = array(doc_["measurements"], "/measurements");
    const std::size_t d = static_cast<std::size_t>(s.dimension);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string p = "/measurements/" + std::to_string(i);
      object(ms[i], p, {"index", "apex", "target", "outcome"});
      MeasurementSpec m;
      m.index = static_cast<int>(integer(require(ms[i], p, "index"), p + "/index"));
      for (const MeasurementSpec& other : s.measurements) {
        if (other.index == m.index) fail(p + "/index", "duplicate measurement index");
      }
      m.apex = numbers(require(ms[i], p, "apex"), p + "/apex", d + 1);
      m.target = text(require(ms[i], p, "target"), p + "/target");
      if (std::none_of(s.worldlines.begin(), s.worldlines.end(), [&](const WorldlineSpec& w) { return w.id == m.target; })) {
        fail(p + "/target", "unknown worldline '" + m.target + "'");
      }
      const std::string o = text(require(ms[i], p, "outcome"), p + "/outcome");
      if (o == "found") {
        m.outcome = Outcome::Found;
      } else if (o == "null") {
        m.outcome = Outcome::Null;
      } else {
        fail(p + "/outcome", "outcome must be \"found\" or \"null\"");
      }
      s.measurements.push_back(std::move(m));
    }
  }

  void read_audit(ScenarioFile& s) const {
    const ordered_json& a = object(doc_["audit"], "/audit", {"seed", "surfaces", "families", "tolerance"});
    if (a.contains("seed")) {
      const std::int64_t seed = integer(a["seed"], "/audit/seed");
      if (seed < 0) fail("/audit/seed", "seed must be non-negative");
      s.audit.seed = static_cast<std::uint64_t>(seed);
    }
    if (a.contains("surfaces")) {
      const std::int64_t n = integer(a["surfaces"], "/audit/surfaces");
      if (n < 0) fail("/audit/surfaces", "surface count must be non-negative");
      s.audit.surfaces = static_cast<std::size_t>(n);
    }
    if (a.contains("families")) {
      const ordered_json& fs = array(a["families"], "/audit/families");
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::string p = "/audit/families/" + std::to_string(i);
        object(fs[i], p, {"kind", "bound"});
        FamilySpec f;
        f.kind = text(require(fs[i], p, "kind"), p + "/kind");
        if (f.kind != "boosted_flat" && f.kind != "lipschitz_graph") fail(p + "/kind", "unknown surface family");
        f.bound = number(require(fs[i], p, "bound"), p + "/bound");
        if (f.bound < 0.0 || f.bound >= 1.0) fail(p + "/bound", "family bound must lie in [0, 1)");
        s.audit.families.push_back(f);
      }
    }
    if (a.contains("tolerance")) {
      s.audit.tolerance = number(a["tolerance"], "/audit/tolerance");
      if (!(s.audit.tolerance > 0.0)) fail("/audit/tolerance", "tolerance must be positive");
    }
  }

  void read_render(ScenarioFile& s) const {
    const ordered_json& r = object(doc_["render"], "/render", {"viewport", "grid", "cones", "slices", "annotations"});
    if (r.contains("viewport")) {
      const ordered_json& v = object(r["viewport"], "/render/viewport", {"t", "x"});
      const std::vector<double> t = numbers(require(v, "/render/viewport", "t"), "/render/viewport/t", 2);
      const std::vector<double> x = numbers(require(v, "/render/viewport", "x"), "/render/viewport/x", 2);
      if (!(t[0] < t[1])) fail("/render/viewport/t", "empty time range");
      if (!(x[0] < x[1])) fail("/render/viewport/x", "empty space range");
      s.render.viewport = Viewport{t[0], t[1], x[0], x[1]};
    }
    if (r.contains("grid")) {
      const std::int64_t g = integer(r["grid"], "/render/grid");
      if (g < 2 || g > 4000) fail("/render/grid", "grid must lie in [2, 4000]");
      s.render.grid = static_cast<int>(g);
    }
    if (r.contains("cones")) {
      if (!r["cones"].is_boolean()) fail("/render/cones", "expected true or false");
      s.render.cones = r["cones"].get<bool>();
    }
    if (r.contains("slices")) {
      const ordered_json& ss = array(r["slices"], "/render/slices");
      for (std::size_t i = 0; i < ss.size(); ++i) {
        const std::string p = "/render/slices/" + std::to_string(i);
        object(ss[i], p, {"boost", "tau"});
        SliceHint h;
        if (ss[i].contains("boost")) h.boost = number(ss[i]["boost"], p + "/boost");
        if (std::abs(h.boost) >= s.units.c) fail(p + "/boost", "boost speed must be below c");
        h.tau = number(require(ss[i], p, "tau"), p + "/tau");
        s.render.slices.push_back(h);
      }
    }
    if (r.contains("annotations")) {
      const ordered_json& as = array(r["annotations"], "/render/annotations");
      for (std::size_t i = 0; i < as.size(); ++i) {
        const std::string p = "/render/annotations/" + std::to_string(i);
        object(as[i], p, {"at", "text"});
        Annotation a;
        a.at = numbers(require(as[i], p, "at"), p + "/at", static_cast<std::size_t>(s.dimension) + 1);
        a.text = text(require(as[i], p, "text"), p + "/text");
        s.render.annotations.push_back(std::move(a));
      }
    }
  }

  const ordered_json& doc_;
  const PositionIndex& index_;
};

}  // namespace detail

/// Natural-unit (c = 1) view of a scenario file.
struct NaturalScenario {
  std::vector<Worldline> lines;
  std::vector<double> priors;
  CollapseStructure structure;
};

inline Event to_natural_event(const ScenarioFile& s, const std::vector<double>& v) {
  return Event(s.units.c * v[0], std::span<const double>(v).subspan(1));
}

inline NaturalScenario to_natural(const ScenarioFile& s) {
  NaturalScenario n;
  const int d = s.dimension;
  auto velocity = [&](const std::optional<std::vector<double>>& v) -> std::optional<SpaceVec> {
    if (!v) return std::nullopt;
    SpaceVec out{0.0, 0.0, 0.0};
    for (int i = 0; i < d; ++i) out[i] = (*v)[i] / s.units.c;
    return out;
  };
  for (const WorldlineSpec& w : s.worldlines) {
    std::vector<Event> vs;
    for (const auto& v : w.vertices) vs.push_back(to_natural_event(s, v));
    n.lines.emplace_back(w.id, std::move(vs), velocity(w.initial_velocity), velocity(w.terminal_velocity));
  }
  for (const WorldlineSpec& w : s.worldlines) {
    for (const auto& [id, value] : s.initial_weights) {
      if (id == w.id) n.priors.push_back(value);
    }
  }
  std::vector<MeasurementEvent> ms;
  for (const MeasurementSpec& m : s.measurements) ms.push_back({m.index, to_natural_event(s, m.apex), m.target, m.outcome});
  n.structure = CollapseStructure(std::move(ms));
  return n;
}

/// Parses and validates a scenario document. Errors carry the line and
/// column of the offending value.
inline ScenarioFile parse_scenario(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const std::size_t colon = what.find(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw Error(Errc::Parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
  const detail::PositionIndex index(text);
  const detail::ScenarioReader reader(doc, index);
  ScenarioFile s = reader.read();

  // Geometry checks that need natural units.
  const NaturalScenario n = to_natural(s);
  for (std::size_t i = 0; i < s.measurements.size(); ++i) {
    const MeasurementSpec& m = s.measurements[i];
    const Worldline& w = n.lines[detail::line_position(n.lines, m.target)];
    if (!w.contains(n.structure[i].apex)) {
      reader.fail("/measurements/" + std::to_string(i) + "/apex", "apex is not on worldline '" + m.target + "'");
    }
  }
  try {
    check_consistent(n.lines, n.priors, n.structure);
  } catch (const Error& e) {
    reader.fail("/measurements", e.what());
  }
  return s;
}

inline ordered_json to_json(const ScenarioFile& s) {
  ordered_json j;
  j["version"] = s.version;
  if (!s.name.empty()) j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["units"] = {{"c", s.units.c}, {"time", s.units.time}, {"length", s.units.length}};
  j["dimension"] = s.dimension;
  ordered_json ws = ordered_json::array();
  for (const WorldlineSpec& w : s.worldlines) {
    ordered_json o;
    o["id"] = w.id;
    o["vertices"] = w.vertices;
    if (w.initial_velocity) o["initial_velocity"] = *w.initial_velocity;
    if (w.terminal_velocity) o["terminal_velocity"] = *w.terminal_velocity;
    ws.push_back(std::move(o));
  }
  j["worldlines"] = std::move(ws);
  ordered_json weights = ordered_json::object();
  for (const auto& [id, v] : s.initial_weights) weights[id] = v;
  j["initial_weights"] = std::move(weights);
  ordered_json ms = ordered_json::array();
  for (const MeasurementSpec& m : s.measurements) {
    ms.push_back({{"index", m.index}, {"apex", m.apex}, {"target", m.target}, {"outcome", to_string(m.outcome)}});
  }
  j["measurements"] = std::move(ms);
  ordered_json fams = ordered_json::array();
  for (const FamilySpec& f : s.audit.families) fams.push_back({{"kind", f.kind}, {"bound", f.bound}});
  j["audit"] = {{"seed", s.audit.seed}, {"surfaces", s.audit.surfaces}, {"families", std::move(fams)},
                {"tolerance", s.audit.tolerance}};
  ordered_json r;
  if (s.render.viewport) {
    const Viewport& v = *s.render.viewport;
    r["viewport"] = {{"t", {v.t_min, v.t_max}}, {"x", {v.x_min, v.x_max}}};
  }
  r["grid"] = s.render.grid;
  r["cones"] = s.render.cones;
  ordered_json slices = ordered_json::array();
  for (const SliceHint& h : s.render.slices) slices.push_back({{"boost", h.boost}, {"tau", h.tau}});
  r["slices"] = std::move(slices);
  ordered_json ann = ordered_json::array();
  for (const Annotation& a : s.render.annotations) ann.push_back({{"at", a.at}, {"text", a.text}});
  r["annotations"] = std::move(ann);
  j["render"] = std::move(r);
  return j;
}

inline std::string serialize(const ScenarioFile& s) { return to_json(s).dump(2) + "\n"; }

/// Scenario file for natural-unit worldlines, priors and measurements.
inline ScenarioFile scenario_from(const std::string& name, std::span<const Worldline> lines,
                                  std::span<const double> priors, const CollapseStructure& s) {
  if (lines.empty()) throw Error(Errc::InvalidArgument, "scenario without worldlines");
  ScenarioFile f;
  f.name = name;
  f.dimension = lines.front().dim();
  auto coords = [&](const Event& e) {
    std::vector<double> v{e.t()};
    for (int i = 0; i < f.dimension; ++i) v.push_back(e.x(i));
    return v;
  };
  auto vel = [&](const std::optional<SpaceVec>& u) -> std::optional<std::vector<double>> {
    if (!u) return std::nullopt;
    return std::vector<double>(u->begin(), u->begin() + f.dimension);
  };
  for (std::size_t k = 0; k < lines.size(); ++k) {
    WorldlineSpec w;
    w.id = lines[k].id();
    for (const Event& e : lines[k].vertices()) w.vertices.push_back(coords(e));
    w.initial_velocity = vel(lines[k].initial_velocity());
    w.terminal_velocity = vel(lines[k].terminal_velocity());
    f.worldlines.push_back(std::move(w));
    f.initial_weights.emplace_back(lines[k].id(), priors[k]);
  }
  for (const MeasurementEvent& m : s.measurements()) f.measurements.push_back({m.index, coords(m.apex), m.target, m.outcome});
  return f;
}

}  // namespace conecollapse

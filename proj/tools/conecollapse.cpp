// conecollapse: command-line driver for the collapse engine, auditor, game
// simulator, scenario builders and diagram emitter.
//
// Exit codes: 0 pass, 2 usage, 3 parse/validation, 4 demonstrated
// conservation violation (naive mode), 5 internal inconsistency.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conecollapse/audit.hpp"
#include "conecollapse/collapse.hpp"
#include "conecollapse/game.hpp"
#include "conecollapse/scenario_file.hpp"
#include "conecollapse/scenarios.hpp"
#include "conecollapse/svg.hpp"

namespace cc = conecollapse;

namespace {

enum Exit { kPass = 0, kUsage = 2, kInvalid = 3, kViolation = 4, kInternal = 5 };

std::string g12(double v) { return cc::detail::fmt12(v); }

std::vector<double> parse_numbers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw cc::Error(cc::Errc::InvalidArgument, "bad number list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

cc::Event parse_event(const std::string& text) {
  const std::vector<double> v = parse_numbers(text);
  if (v.size() < 2 || v.size() > 4) throw cc::Error(cc::Errc::InvalidArgument, "an event is t,x[,y[,z]]: '" + text + "'");
  return cc::Event(v[0], std::span<const double>(v).subspan(1));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cc::Error(cc::Errc::Parse, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cc::Error(cc::Errc::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

std::string event_text(const cc::Event& e) {
  std::string s = "(" + g12(e.t());
  for (int i = 0; i < e.dim(); ++i) s += ", " + g12(e.x(i));
  return s + ")";
}

cc::ordered_json event_json(const cc::Event& e) {
  cc::ordered_json j = cc::ordered_json::array({e.t()});
  for (int i = 0; i < e.dim(); ++i) j.push_back(e.x(i));
  return j;
}

cc::CollapseScenario load_collapse(const cc::ScenarioFile& f) {
  cc::NaturalScenario n = cc::to_natural(f);
  return cc::build_collapse(std::move(n.lines), std::move(n.priors), std::move(n.structure));
}

// Subcommands ------------------------------------------------------------------

struct ClassifyArgs {
  std::string origin;
  std::vector<std::string> points;
  std::string scenario;
  double eps = cc::kDefaultEps;
};

int run_classify(const ClassifyArgs& a) {
  const cc::Event o = parse_event(a.origin);
  std::optional<cc::CollapseStructure> structure;
  if (!a.scenario.empty()) structure = cc::to_natural(cc::parse_scenario(read_file(a.scenario))).structure;
  for (const std::string& text : a.points) {
    const cc::Event p = parse_event(text);
    std::printf("%s relative to %s: %s, interval2 = %s\n", event_text(p).c_str(), event_text(o).c_str(),
                cc::to_string(cc::classify(o, p, a.eps)), g12(cc::interval2(o, p)).c_str());
    if (structure) {
      const cc::Region r = cc::region_of(p, *structure, a.eps);
      std::string members;
      for (int i : r.signature.members) members += (members.empty() ? "" : ",") + std::to_string(i);
      std::printf("  region %s, signature {%s}%s\n", cc::to_string(r.kind), members.c_str(),
                  r.signature.on_boundary() ? ", on a cone boundary" : "");
    }
  }
  return kPass;
}

struct CollapseArgs {
  std::string scenario;
  std::string out;
};

int run_collapse(const CollapseArgs& a) {
  const cc::ScenarioFile f = cc::parse_scenario(read_file(a.scenario));
  const cc::CollapseScenario sc = load_collapse(f);
  cc::ordered_json j;
  j["scenario"] = f.name;
  j["units"] = "natural";
  cc::ordered_json lines = cc::ordered_json::array();
  for (const cc::LineWeights& lw : sc.weights.lines()) {
    cc::ordered_json l;
    l["id"] = lw.line;
    cc::ordered_json bps = cc::ordered_json::array();
    for (const cc::Event& e : lw.breakpoints) bps.push_back(event_json(e));
    l["breakpoints"] = std::move(bps);
    l["values"] = lw.values;
    lines.push_back(std::move(l));
  }
  j["weights"] = std::move(lines);
  cc::ordered_json ledger = cc::ordered_json::array();
  for (const cc::TransitEntry& e : sc.ledger.entries) {
    cc::ordered_json g;
    g["measurement"] = e.measurement;
    g["line"] = e.line;
    g["from"] = event_json(e.from);
    g["to"] = event_json(e.to);
    g["weight"] = e.weight;
    cc::ordered_json pieces = cc::ordered_json::array();
    for (const cc::FluxPiece& p : e.pieces) pieces.push_back({{"s", p.s_begin}, {"weight", p.weight}});
    g["pieces"] = std::move(pieces);
    ledger.push_back(std::move(g));
  }
  j["ledger"] = std::move(ledger);
  write_output(a.out, j.dump(2) + "\n");
  return kPass;
}

struct AuditArgs {
  std::string scenario;
  std::optional<std::size_t> surfaces;
  std::optional<std::uint64_t> seed;
  double boost = 0.0;
  bool naive = false;
  std::optional<double> tolerance;
  std::string out;
};

int run_audit(const AuditArgs& a) {
  const cc::ScenarioFile f = cc::parse_scenario(read_file(a.scenario));
  if (std::abs(a.boost) >= 1.0) throw cc::Error(cc::Errc::InvalidBoost, "--boost must satisfy |v| < 1");
  const std::size_t n = a.surfaces.value_or(f.audit.surfaces);
  const std::uint64_t seed = a.seed.value_or(f.audit.seed);
  const double tol = a.tolerance.value_or(f.audit.tolerance);
  const cc::NaturalScenario nat = cc::to_natural(f);
  const int dim = f.dimension;
  const cc::Boost frame = cc::Boost::along_x(a.boost, dim);
  std::vector<cc::AuditReport> reports;

  if (a.naive) {
    reports.push_back(cc::audit_naive_instantaneous(nat.lines, nat.priors, nat.structure, frame, tol));
    const cc::WeightMap naive = cc::naive_weights(nat.lines, nat.priors, nat.structure);
    cc::CollapseScenario sc{nat.lines, nat.priors, nat.structure, naive, {}};
    const cc::SurfaceWindow win = cc::window_for(sc);
    for (std::size_t i = 0; i < n; ++i) {
      const cc::Hypersurface s = cc::random_surface(seed, i, cc::SurfaceFamily::boosted_flat(0.99), win);
      reports.push_back(cc::audit_slice(s, nat.lines, naive, {}, tol));
    }
  } else {
    cc::CollapseScenario sc = cc::build_collapse(nat.lines, nat.priors, nat.structure);
    if (a.boost != 0.0) sc = cc::boost_scenario(sc, frame);
    std::vector<cc::SurfaceFamily> families;
    for (const cc::FamilySpec& fs : f.audit.families) {
      families.push_back(fs.kind == "boosted_flat" ? cc::SurfaceFamily::boosted_flat(fs.bound)
                                                   : cc::SurfaceFamily::lipschitz_graph(fs.bound));
    }
    if (families.empty()) {
      families = {cc::SurfaceFamily::boosted_flat(0.99), cc::SurfaceFamily::lipschitz_graph(0.999)};
    }
    const cc::SurfaceWindow win = cc::window_for(sc);
    std::vector<cc::Hypersurface> surfaces;
    for (std::size_t i = 0; i < n; ++i) surfaces.push_back(cc::random_surface(seed, i, families[i % families.size()], win));
    reports = cc::audit_batch(surfaces, sc, tol);
  }

  write_output(a.out, cc::audit_csv(reports));
  std::size_t failed = 0;
  for (const cc::AuditReport& r : reports) failed += r.pass ? 0 : 1;
  std::fprintf(stderr, "%zu of %zu surfaces failed\n", failed, reports.size());
  if (failed == 0) return kPass;
  return a.naive ? kViolation : kInternal;
}

struct GameArgs {
  std::size_t cards = 52;
  std::uint64_t seed = 12345;
  std::vector<std::size_t> inspect;
  double time = 0.0;
  bool force = false;
  std::size_t trials = 100000;
  std::vector<std::string> points;
  std::string out;
};

int run_game_deal(const GameArgs& a) {
  const cc::Deal d = cc::deal(a.cards, a.seed);
  std::printf("%zu cards, seed %llu, queen on %s\n", d.n_cards, static_cast<unsigned long long>(a.seed),
              cc::card_id(d.queen_index).c_str());
  return kPass;
}

int run_game_play(const GameArgs& a) {
  const cc::Deal d = cc::deal(a.cards, a.seed);
  cc::InspectionSchedule s;
  for (std::size_t k : a.inspect) {
    if (k >= d.n_cards) throw cc::Error(cc::Errc::InvalidArgument, "no card " + std::to_string(k));
    s.inspections.push_back({d.lines[k].at_time(a.time), d.lines[k].id()});
  }
  const cc::GameRun run = cc::run_schedule(d, s, a.force ? cc::ScheduleMode::Forced : cc::ScheduleMode::RequireFair);
  std::printf("inspections applied: %zu%s\n", run.structure.size(), run.halted_early ? " (halted on found)" : "");
  std::printf("found: %s\n", run.found_on ? run.found_on->c_str() : "-");
  std::printf("line,final_weight\n");
  for (const cc::LineWeights& lw : run.trajectory.back().lines()) {
    std::printf("%s,%s\n", lw.line.c_str(), g12(lw.values.back()).c_str());
  }
  return kPass;
}

int run_game_monte_carlo(const GameArgs& a) {
  const cc::Deal d = cc::deal(a.cards, a.seed);
  cc::InspectionSchedule s = cc::InspectionSchedule::all_at(d, a.time);
  const cc::MonteCarloResult r = cc::monte_carlo(a.cards, s, a.trials, a.seed);
  std::string csv = "line,frequency,weight,bound,within\n";
  for (const cc::FrequencyRow& row : r.rows) {
    csv += row.line + "," + g12(row.frequency) + "," + g12(row.weight) + "," + g12(row.bound) + "," +
           (row.within ? "true" : "false") + "\n";
  }
  write_output(a.out, csv);
  std::fprintf(stderr, "%zu trials, max deviation %s, %s\n", r.trials, g12(r.max_deviation).c_str(),
               r.pass ? "all within 3 sigma" : "outside 3 sigma");
  return r.pass ? kPass : kInternal;
}

int run_game_fairness(const GameArgs& a) {
  cc::InspectionSchedule s;
  for (std::size_t i = 0; i < a.points.size(); ++i) s.inspections.push_back({parse_event(a.points[i]), "p" + std::to_string(i)});
  const cc::FairnessVerdict v = cc::fairness_check(s);
  std::printf("%s: %s\n", cc::to_string(v.kind), v.details.c_str());
  if (v.apex) std::printf("common cone apex %s\n", event_text(*v.apex).c_str());
  if (v.witness) {
    const cc::Hypersurface w(*v.witness);
    std::printf("witness %s:%s\n", w.family().c_str(), w.parameters().c_str());
  }
  return kPass;
}

struct ScenarioArgs {
  double speed = 1.0;
  double time = 1.0;
  std::optional<double> time_b;
  std::string emit;
  double source = 0.0;
  std::vector<std::string> detectors;
  double c = 1.0;
  double separation = 3.0;
  double transit = 2e-9;
  double half_life = 17e-9;
  double window = 8e-9;
  double c_si = cc::kSpeedOfLight;
  double combiner = 0.0;
  std::vector<std::string> samples;
  double apex_time = 0.0;
  double offset = 1.0;
  std::string c_values = "1,10,1000,1000000";
};

int run_scenario_epr(const ScenarioArgs& a) {
  const cc::EprScenario e = cc::epr_pair(a.speed, a.time, a.time_b.value_or(a.time));
  std::printf("source P %s\n", event_text(e.source).c_str());
  std::printf("A %s on left, B %s on right\n", event_text(e.a.apex).c_str(), event_text(e.b.apex).c_str());
  std::printf("past cone of A leaves the right line at %s\n",
              e.a_cone_on_right ? event_text(*e.a_cone_on_right).c_str() : "-");
  std::printf("past cone of B leaves the left line at %s\n",
              e.b_cone_on_left ? event_text(*e.b_cone_on_left).c_str() : "-");
  if (!a.emit.empty()) {
    const std::vector<double> priors{0.5, 0.5};
    write_output(a.emit, cc::serialize(cc::scenario_from("epr", e.lines, priors, e.structure)));
  }
  return kPass;
}

int run_scenario_delayed(const ScenarioArgs& a) {
  cc::DelayedChoiceGeometry g;
  g.source = a.source;
  g.c = a.c;
  for (const std::string& d : a.detectors) {
    const std::vector<double> v = parse_numbers(d);
    if (v.size() < 2 || v.size() > 3) throw cc::Error(cc::Errc::InvalidArgument, "a detector is position,path[,speed]");
    g.detectors.push_back({v[0], v[1], v.size() == 3 ? v[2] : 0.0});
  }
  std::printf("detector,detection_time,margin,verdict\n");
  const auto rs = cc::delayed_choice_check(g);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    std::printf("%zu,%s,%s,%s\n", i, g12(rs[i].detection_time).c_str(), g12(rs[i].margin).c_str(),
                cc::to_string(rs[i].verdict));
  }
  return kPass;
}

int run_scenario_interferometer(const ScenarioArgs& a) {
  cc::InterferometerTiming t;
  t.beam_separation = a.separation;
  t.laser_transit = a.transit;
  t.half_life = a.half_life;
  t.decay_window = a.window;
  t.c = a.c_si;
  const cc::InterferometerReport r = cc::interferometer_report(t);
  std::printf("precollapse_time %s s\n", g12(r.precollapse_time).c_str());
  std::printf("decay_fraction %s\n", g12(r.decay_fraction).c_str());
  std::printf("required_separation %s m\n", g12(r.required_separation).c_str());
  std::printf("upgrade_factor %s\n", g12(r.upgrade_factor).c_str());
  std::printf("feasible %s\n", r.feasible ? "yes" : "no");
  return kPass;
}

int run_scenario_linked(const ScenarioArgs& a) {
  std::vector<cc::Event> dets;
  for (const std::string& d : a.detectors) dets.push_back(parse_event(d));
  if (dets.empty()) throw cc::Error(cc::Errc::InvalidArgument, "at least one --detector required");
  const cc::Worldline combiner = cc::Worldline::stationary("combiner", cc::Event(0.0, a.combiner));
  const cc::MeasurementEvent m = cc::reduce_linked_measurement(dets, combiner);
  std::printf("effective apex %s on %s\n", event_text(m.apex).c_str(), m.target.c_str());
  return kPass;
}

int run_scenario_extended(const ScenarioArgs& a) {
  std::vector<cc::Event> samples;
  for (const std::string& s : a.samples) samples.push_back(parse_event(s));
  const cc::ExtendedRegion r = cc::extended_region_collapse(samples, "region", cc::Outcome::Null, a.c);
  std::printf("samples %zu, diameter %s, lead_time %s\n", r.structure.size(), g12(r.diameter).c_str(),
              g12(r.lead_time).c_str());
  return kPass;
}

int run_scenario_newtonian(const ScenarioArgs& a) {
  const auto rows = cc::newtonian_limit(a.apex_time, a.offset, parse_numbers(a.c_values));
  std::printf("c,boundary_time,lead\n");
  for (const cc::NewtonianRow& r : rows) {
    std::printf("%s,%s,%s\n", g12(r.c).c_str(), g12(r.boundary_time).c_str(), g12(r.lead).c_str());
  }
  return kPass;
}

struct DiagramArgs {
  std::string scenario;
  std::string out;
};

int run_diagram(const DiagramArgs& a) {
  const cc::ScenarioFile f = cc::parse_scenario(read_file(a.scenario));
  if (f.dimension != 1) throw cc::Error(cc::Errc::Validation, "diagrams support one space dimension only");
  write_output(a.out, cc::emit_svg(f));
  return kPass;
}

int exit_code(const cc::Error& e) {
  switch (e.code()) {
    case cc::Errc::Parse:
    case cc::Errc::Validation: return kInvalid;
    case cc::Errc::InvalidArgument:
    case cc::Errc::InvalidBoost:
    case cc::Errc::DimensionMismatch: return kUsage;
    default: return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Past-light-cone collapse engine, conservation auditor and diagram tool"};
  app.require_subcommand(1);
  int status = kPass;
  std::function<int()> action;

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "Causal class of points relative to an origin");
  classify->add_option("--origin", ca.origin, "origin event t,x[,y,z]")->required();
  classify->add_option("--point", ca.points, "query event t,x[,y,z]")->required();
  classify->add_option("--scenario", ca.scenario, "scenario file for region queries");
  classify->add_option("--eps", ca.eps, "lightlike tolerance");
  classify->callback([&] { action = [&] { return run_classify(ca); }; });

  CollapseArgs co;
  auto* collapse = app.add_subcommand("collapse", "Apply a scenario's measurements; dump weights and ledger");
  collapse->add_option("scenario", co.scenario)->required();
  collapse->add_option("--out", co.out, "output file (default stdout)");
  collapse->callback([&] { action = [&] { return run_collapse(co); }; });

  AuditArgs au;
  auto* audit = app.add_subcommand("audit", "Conservation audit on random spacelike surfaces (CSV)");
  audit->add_option("scenario", au.scenario)->required();
  audit->add_option("--surfaces", au.surfaces, "number of surfaces");
  audit->add_option("--seed", au.seed, "surface seed");
  audit->add_option("--boost", au.boost, "boost velocity along x");
  audit->add_flag("--naive", au.naive, "audit naive equal-time collapse without cones or ledger");
  audit->add_option("--tolerance", au.tolerance, "pass tolerance on totals");
  audit->add_option("--out", au.out, "CSV output file (default stdout)");
  audit->callback([&] { action = [&] { return run_audit(au); }; });

  GameArgs ga;
  auto* game = app.add_subcommand("game", "Queen-of-spades game");
  game->require_subcommand(1);
  auto* g_deal = game->add_subcommand("deal", "Deal and reveal the hidden queen");
  auto* g_play = game->add_subcommand("play", "Run an inspection schedule");
  auto* g_mc = game->add_subcommand("monte-carlo", "Monte Carlo frequencies against engine weights");
  auto* g_fair = game->add_subcommand("fairness", "Fairness verdict for inspection events");
  for (auto* sub : {g_deal, g_play, g_mc}) {
    sub->add_option("--cards", ga.cards, "number of cards");
    sub->add_option("--seed", ga.seed, "deal seed");
  }
  g_play->add_option("--inspect", ga.inspect, "card indices to inspect, in order")->required();
  g_play->add_option("--time", ga.time, "lab time of the inspections");
  g_play->add_flag("--force", ga.force, "run even if the schedule is unfair");
  g_mc->add_option("--trials", ga.trials, "number of trials");
  g_mc->add_option("--out", ga.out, "CSV output file (default stdout)");
  g_fair->add_option("--point", ga.points, "inspection event t,x[,y,z]")->required();
  g_deal->callback([&] { action = [&] { return run_game_deal(ga); }; });
  g_play->callback([&] { action = [&] { return run_game_play(ga); }; });
  g_mc->callback([&] { action = [&] { return run_game_monte_carlo(ga); }; });
  g_fair->callback([&] { action = [&] { return run_game_fairness(ga); }; });

  ScenarioArgs sa;
  auto* scenario = app.add_subcommand("scenario", "Scenario builders and timing reports");
  scenario->require_subcommand(1);
  auto* s_epr = scenario->add_subcommand("epr", "EPR pair leaving the origin at +-v");
  s_epr->add_option("--speed", sa.speed, "particle speed, 0 < v <= 1");
  s_epr->add_option("--time", sa.time, "detection time of A (and B)");
  s_epr->add_option("--time-b", sa.time_b, "detection time of B");
  s_epr->add_option("--emit", sa.emit, "write the scenario file here");
  auto* s_dc = scenario->add_subcommand("delayed-choice", "Detector past cones relative to the source");
  s_dc->add_option("--source", sa.source, "source position");
  s_dc->add_option("--detector", sa.detectors, "position,path_length[,speed]")->required();
  s_dc->add_option("--c", sa.c, "light speed in the same units");
  auto* s_if = scenario->add_subcommand("interferometer", "Atom interferometer timing (SI)");
  s_if->add_option("--separation", sa.separation, "beam separation, m");
  s_if->add_option("--transit", sa.transit, "laser transit time, s");
  s_if->add_option("--half-life", sa.half_life, "emission half life, s");
  s_if->add_option("--window", sa.window, "decay window, s");
  s_if->add_option("--c", sa.c_si, "light speed, m/s");
  auto* s_ln = scenario->add_subcommand("linked", "Reduce linked detectors to one combined apex");
  s_ln->add_option("--detector", sa.detectors, "detector event t,x")->required();
  s_ln->add_option("--combiner", sa.combiner, "position of the static combiner");
  auto* s_ex = scenario->add_subcommand("extended", "Extended measurement region");
  s_ex->add_option("--sample", sa.samples, "sample event t,x[,y,z]")->required();
  s_ex->add_option("--c", sa.c, "light speed in the samples' units");
  auto* s_nl = scenario->add_subcommand("newtonian", "Collapse boundary as c grows");
  s_nl->add_option("--apex-time", sa.apex_time, "apex time");
  s_nl->add_option("--offset", sa.offset, "spatial offset from the apex");
  s_nl->add_option("--c-values", sa.c_values, "comma-separated increasing light speeds");
  s_epr->callback([&] { action = [&] { return run_scenario_epr(sa); }; });
  s_dc->callback([&] { action = [&] { return run_scenario_delayed(sa); }; });
  s_if->callback([&] { action = [&] { return run_scenario_interferometer(sa); }; });
  s_ln->callback([&] { action = [&] { return run_scenario_linked(sa); }; });
  s_ex->callback([&] { action = [&] { return run_scenario_extended(sa); }; });
  s_nl->callback([&] { action = [&] { return run_scenario_newtonian(sa); }; });

  DiagramArgs da;
  auto* diagram = app.add_subcommand("diagram", "SVG spacetime diagram of a 1+1 scenario");
  diagram->add_option("scenario", da.scenario)->required();
  diagram->add_option("--out", da.out, "SVG output file (default stdout)");
  diagram->callback([&] { action = [&] { return run_diagram(da); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  try {
    status = action ? action() : kUsage;
  } catch (const cc::Error& e) {
    std::fprintf(stderr, "conecollapse: %s\n", e.what());
    status = exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "conecollapse: internal error: %s\n", e.what());
    status = kInternal;
  }
  return status;
}

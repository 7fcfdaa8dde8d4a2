#include "vrjp/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vrjp/characterization.hpp"
#include "vrjp/density.hpp"
#include "vrjp/io.hpp"
#include "vrjp/simulator.hpp"

namespace vrjp::cli {

namespace {

using io::ConfigError;
using io::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) throw ConfigError(std::string("bad ") + what + " list: " + text);
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

// Command parameters: command-line flag, then the command's section of the
// config file, then the top level of the config file, then the default.
class Params {
 public:
  Params(const json& config, std::string section) : config_(config), section_(std::move(section)) {}

  template <typename T>
  T get(const char* key, const std::optional<T>& flag, T fallback) const {
    if (flag) return *flag;
    try {
      if (config_.contains(section_) && config_.at(section_).contains(key)) return config_.at(section_).at(key).get<T>();
      if (config_.contains(key)) return config_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
    }
    return fallback;
  }

  std::optional<json> raw(const char* key) const {
    if (config_.contains(section_) && config_.at(section_).contains(key)) return config_.at(section_).at(key);
    if (config_.contains(key)) return config_.at(key);
    return std::nullopt;
  }

 private:
  const json& config_;
  std::string section_;
};

json exch_to_json(const ExchReport& r) {
  return {{"pairs_tested", r.pairs_tested},
          {"nontrivial_pairs", r.nontrivial_pairs},
          {"max_abs_log_gap", r.max_abs_log_gap},
          {"worst_pair", r.worst_pair},
          {"max_hat_gap", r.max_hat_gap},
          {"max_product_gap", r.max_product_gap},
          {"tolerance", r.tolerance},
          {"verdict", r.passed ? "pass" : "fail"}};
}

json mc_to_json(const McEstimate& m) {
  return {{"estimate", m.estimate}, {"stderr", m.std_error}, {"trials", m.trials}, {"hits", m.hits}};
}

json ordered_edge_values(const Graph& g, const std::vector<double>& v) {
  json out = json::array();
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    out.push_back({{"from", g.edge_source(id)}, {"to", g.edge_target(id)}, {"value", v[id]}});
  }
  return out;
}

json edge_to_json(const std::optional<std::pair<Vertex, Vertex>>& e) {
  if (!e) return nullptr;
  return json::array({e->first, e->second});
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

void emit_report(json report, const std::string& path, std::ostream& out) {
  if (!report.contains("schema")) report["schema"] = io::kReportSchema;
  emit(report.dump(2) + "\n", path, out);
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<double> tol;
};

void add_common(CLI::App* app, Common& c, bool with_trials = true, bool with_tol = true) {
  app->add_option("--config,--model", c.config, "Model / experiment config (JSON)")->required();
  app->add_option("--out", c.out, "Output path (default: stdout)");
  app->add_option("--seed", c.seed, "Base seed");
  if (with_trials) app->add_option("--trials", c.trials, "Number of Monte Carlo trials");
  if (with_tol) app->add_option("--tol", c.tol, "Tolerance");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c, std::optional<double> horizon_flag, std::optional<Vertex> start_flag,
                 std::optional<std::string> clock_flag, std::ostream& out) {
  const json config = io::load_json_file(c.config);
  const Model model = io::parse_model(config);
  const Params p(config, "simulate");
  const std::size_t trials = p.get<std::size_t>("trials", c.trials, 1);
  const std::uint64_t seed = p.get<std::uint64_t>("seed", c.seed, 0);
  const double horizon = p.get<double>("horizon", horizon_flag, 1.0);
  const Vertex start = p.get<Vertex>("start", start_flag, 0);
  const std::string clock = p.get<std::string>("clock", clock_flag, "X");
  if (clock != "X" && clock != "Y") throw ConfigError("clock must be X or Y");
  if (trials == 0) throw ConfigError("trials must be positive");
  SimConfig cfg{start, horizon, seed, p.get<std::size_t>("max_jumps", std::nullopt, kDefaultMaxJumps)};
  cfg.validate();

  std::vector<Trajectory> paths;
  paths.reserve(trials);
  for (std::size_t k = 0; k < trials; ++k) {
    Rng rng = Rng::stream(seed, k);
    paths.push_back(clock == "X"
                        ? simulate_with(model.graph(), model.rates, start, horizon, rng, cfg.max_jumps)
                        : simulate_y_with(model.graph(), model.rates, model.timescale, start, horizon, rng,
                                          cfg.max_jumps));
  }
  std::ostringstream text;
  io::write_jsonl(text, paths);
  emit(text.str(), c.out, out);
  return kPass;
}

int cmd_density(const std::string& traj_path, const std::string& model_path, bool breakdown,
                const std::string& out_path, std::ostream& out) {
  const Model model = io::parse_model(io::load_json_file(model_path));
  std::ifstream in(traj_path);
  if (!in) throw ConfigError("cannot open " + traj_path);
  const auto paths = io::read_jsonl(in);
  const Graph& g = model.graph();
  const TimeScale identity = TimeScale::identity(g.vertex_count());

  std::ostringstream csv;
  csv << (breakdown ? "index,clock,log_product,integral_tilde,integral_hat,log_density\n" : "index,clock,log_density\n");
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const Trajectory& tr = paths[k];
    // An X path has the Y density of the identity time change.
    const DensityBreakdown d = tr.clock() == Clock::X
                                   ? density_split(tr.with_clock(Clock::Y), g, model.rates, identity)
                                   : density_split(tr, g, model.rates, model.timescale);
    csv << k << ',' << to_string(tr.clock()) << ',';
    if (breakdown) {
      csv << fmt_double(d.log_product) << ',' << fmt_double(d.integral_tilde) << ',' << fmt_double(d.integral_hat)
          << ',';
    }
    csv << fmt_double(d.log_density()) << '\n';
  }
  emit(csv.str(), out_path, out);
  return kPass;
}

ExchangeabilityOptions exch_options(const Params& p, const Common& c, std::optional<std::size_t> pairs_flag) {
  ExchangeabilityOptions o;
  o.pairs = p.get<std::size_t>("pairs", pairs_flag ? pairs_flag : c.trials, 1000);
  o.seed = p.get<std::uint64_t>("seed", c.seed, 0);
  o.tolerance = p.get<double>("tolerance", c.tol, 1e-9);
  o.x_horizon = p.get<double>("horizon", std::nullopt, 3.0);
  o.start = p.get<Vertex>("start", std::nullopt, 0);
  o.rotations = p.get<std::size_t>("rotations", std::nullopt, 4);
  if (o.pairs == 0) throw ConfigError("pairs must be positive");
  return o;
}

int cmd_exchangeability(const Common& c, std::optional<std::size_t> pairs_flag, std::ostream& out) {
  const json config = io::load_json_file(c.config);
  const Model model = io::parse_model(config);
  const ExchangeabilityOptions o = exch_options(Params(config, "exchangeability"), c, pairs_flag);
  const ExchReport r = exchangeability_report(model, o);
  json report = {{"command", "exchangeability"}, {"seed", o.seed}, {"exchangeability", exch_to_json(r)},
                 {"verdict", r.passed ? "pass" : "fail"}};
  emit_report(report, c.out, out);
  return r.passed ? kPass : kCheckFailed;
}

struct FreedmanParams {
  std::vector<Vertex> xi, eta;
  std::vector<double> steps;
  std::size_t trials;
  std::uint64_t seed;
  double z_threshold;
};

FreedmanParams freedman_params(const Params& p, const Common& c, const std::optional<std::string>& xi,
                               const std::optional<std::string>& eta, const std::optional<std::string>& steps) {
  FreedmanParams f;
  auto vertices = [&](const std::optional<std::string>& flag, const char* key) {
    if (flag) return parse_list<Vertex>(*flag, key);
    auto raw = p.raw(key);
    if (!raw) throw ConfigError(std::string("freedman check needs \"") + key + "\"");
    try {
      return raw->get<std::vector<Vertex>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad \"") + key + "\": " + e.what());
    }
  };
  f.xi = vertices(xi, "xi");
  f.eta = vertices(eta, "eta");
  if (steps) {
    f.steps = parse_list<double>(*steps, "steps");
  } else if (auto raw = p.raw("steps")) {
    f.steps = raw->get<std::vector<double>>();
  } else {
    throw ConfigError("freedman check needs \"steps\"");
  }
  f.trials = p.get<std::size_t>("trials", c.trials, 1'000'000);
  f.seed = p.get<std::uint64_t>("seed", c.seed, 0);
  f.z_threshold = p.get<double>("z_threshold", c.tol, 3.0);
  if (!strings_equivalent(f.xi, f.eta)) throw ConfigError("xi and eta are not equivalent strings");
  return f;
}

json run_freedman(const Model& model, const FreedmanParams& f, bool& passed) {
  json rows = json::array();
  passed = true;
  for (std::size_t k = 0; k < f.steps.size(); ++k) {
    const FreedmanReport r = freedman_check(model, f.steps[k], f.xi, f.eta, f.trials, f.seed + k);
    const bool ok = std::abs(r.z) < f.z_threshold;
    passed = passed && ok;
    rows.push_back({{"step", r.step},
                    {"first", mc_to_json(r.first)},
                    {"second", mc_to_json(r.second)},
                    {"z", std::isfinite(r.z) ? json(r.z) : json(r.z > 0 ? "inf" : "-inf")},
                    {"verdict", ok ? "pass" : "fail"}});
  }
  return {{"xi", f.xi}, {"eta", f.eta}, {"z_threshold", f.z_threshold}, {"trials", f.trials}, {"steps", rows},
          {"verdict", passed ? "pass" : "fail"}};
}

int cmd_freedman(const Common& c, const std::optional<std::string>& xi, const std::optional<std::string>& eta,
                 const std::optional<std::string>& steps, std::ostream& out) {
  const json config = io::load_json_file(c.config);
  const Model model = io::parse_model(config);
  const FreedmanParams f = freedman_params(Params(config, "freedman"), c, xi, eta, steps);
  bool passed = true;
  json report = {{"command", "freedman"}, {"seed", f.seed}, {"freedman", run_freedman(model, f, passed)},
                 {"verdict", passed ? "pass" : "fail"}};
  emit_report(report, c.out, out);
  return passed ? kPass : kCheckFailed;
}

int cmd_characterize(const Common& c, std::optional<std::string> checks_flag, std::optional<std::size_t> pairs_flag,
                     std::ostream& out) {
  const json config = io::load_json_file(c.config);
  const Model model = io::parse_model(config);
  const Params p(config, "characterize");
  const auto checks = parse_list<std::string>(
      p.get<std::string>("checks", checks_flag, "lambda,reversibility,exchangeability"), "checks");
  for (const auto& name : checks) {
    if (name != "lambda" && name != "reversibility" && name != "exchangeability" && name != "freedman") {
      throw ConfigError("unknown check \"" + name + "\"");
    }
  }
  const double lambda_tol = p.get<double>("lambda_tolerance", std::nullopt, 1e-6);
  const double rev_tol = p.get<double>("reversibility_tolerance", std::nullopt, 1e-6);
  const Graph& g = model.graph();

  json results = json::object();
  std::vector<std::string> failed;
  // Every edge must lie on a cycle for the characterization to apply.
  const BridgeReport bridges = validate_strongly_connected(g);
  results["graph"] = {{"strongly_connected", bridges.passed},
                      {"offending_edge", edge_to_json(bridges.offending_edge)},
                      {"verdict", bridges.passed ? "pass" : "fail"}};
  if (!bridges.passed) failed.push_back("graph");
  std::optional<LambdaReport> lam;
  auto lambdas = [&]() -> const LambdaReport& {
    if (!lam) lam = lambda_reversibility(model);
    return *lam;
  };
  for (const auto& name : checks) {
    json entry;
    bool ok = true;
    try {
      if (name == "lambda") {
        const auto& r = lambdas();
        ok = r.max_rel_deviation <= lambda_tol;
        entry = {{"lambda", ordered_edge_values(g, r.lambda)},
                 {"max_rel_deviation", r.max_rel_deviation},
                 {"tolerance", lambda_tol}};
      } else if (name == "reversibility") {
        const auto& r = lambdas();
        ok = r.h2_linear && r.reversibility_gap <= rev_tol;
        entry = {{"A", r.A},
                 {"B", r.B},
                 {"h2_residual", r.h2_residual},
                 {"h2_linear", r.h2_linear},
                 {"degenerate", r.degenerate},
                 {"reversibility_gap", r.reversibility_gap},
                 {"worst_edge", edge_to_json(r.worst_edge)},
                 {"tolerance", rev_tol}};
      } else if (name == "exchangeability") {
        const ExchReport r = exchangeability_report(model, exch_options(p, c, pairs_flag));
        ok = r.passed;
        entry = exch_to_json(r);
      } else {
        const FreedmanParams f = freedman_params(Params(config, "freedman"), c, std::nullopt, std::nullopt,
                                                 std::nullopt);
        entry = run_freedman(model, f, ok);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      ok = false;
      entry = {{"error", e.what()}};
    }
    entry["verdict"] = ok ? "pass" : "fail";
    if (!ok) failed.push_back(name);
    results[name] = entry;
  }
  json report = {{"command", "characterize"},
                 {"checks", results},
                 {"failed_checks", failed},
                 {"verdict", failed.empty() ? "pass" : "fail"}};
  emit_report(report, c.out, out);
  return failed.empty() ? kPass : kCheckFailed;
}

int cmd_canonicalize(const Common& c, std::optional<std::size_t> pairs_flag, std::ostream& out) {
  const json config = io::load_json_file(c.config);
  const Model model = io::parse_model(config);
  const Params p(config, "canonicalize");
  CanonicalOptions o;
  o.tolerance = p.get<double>("tolerance", c.tol, 1e-9);
  o.pairs = p.get<std::size_t>("pairs", pairs_flag ? pairs_flag : c.trials, 200);
  o.seed = p.get<std::uint64_t>("seed", c.seed, 0);
  const Graph& g = model.graph();

  json report;
  bool ok = false;
  try {
    const CanonicalForm form = canonicalize(model.rates, o);
    json detail = {{"scales", form.scale},
                   {"weights", ordered_edge_values(g, form.weights)},
                   {"symmetric", form.symmetric},
                   {"max_asymmetry", form.max_asymmetry},
                   {"rescaled_rate_error", form.rescaled_rate_error},
                   {"linear_exchangeability",
                    form.linear_exchangeability ? exch_to_json(*form.linear_exchangeability) : json(nullptr)},
                   {"vrjp_exchangeability",
                    form.vrjp_exchangeability ? exch_to_json(*form.vrjp_exchangeability) : json(nullptr)},
                   {"verdict", form.valid ? "pass" : "fail"}};
    if (form.vrjp_graph) {
      const std::size_t n = g.vertex_count();
      report = io::model_to_json(Model{RateFamily::vrjp(*form.vrjp_graph), TimeScale::vrjp(n)});
    }
    report["canonicalization"] = detail;
    ok = form.valid;
  } catch (const NotReducibleError& e) {
    report["canonicalization"] = {{"error", e.what()}, {"verdict", "fail"}};
  }
  report["command"] = "canonicalize";
  emit_report(report, c.out, out);
  return ok ? kPass : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local-time jump processes: simulation, trajectory densities and exchangeability checks"};
  app.require_subcommand(1);

  Common c;
  std::optional<double> horizon;
  std::optional<Vertex> start;
  std::optional<std::string> clock;
  auto* sim = app.add_subcommand("simulate", "Simulate trajectories to JSONL");
  add_common(sim, c, true, false);
  sim->add_option("--horizon", horizon, "Horizon on the chosen clock");
  sim->add_option("--start", start, "Start vertex");
  sim->add_option("--clock", clock, "X (raw) or Y (time-changed)");

  std::string traj, model_path, density_out;
  bool breakdown = false;
  auto* dens = app.add_subcommand("density", "Log densities of JSONL trajectories as CSV");
  dens->add_option("--traj", traj, "Trajectory JSONL")->required();
  dens->add_option("--model", model_path, "Model JSON")->required();
  dens->add_flag("--breakdown", breakdown, "Emit log_product, integral_tilde and integral_hat");
  dens->add_option("--out", density_out, "CSV output path (default: stdout)");

  std::optional<std::size_t> pairs;
  auto* exch = app.add_subcommand("exchangeability", "Density gap over equivalent trajectory pairs");
  add_common(exch, c);
  exch->add_option("--pairs", pairs, "Number of trajectory pairs");

  std::optional<std::string> xi, eta, steps;
  auto* fr = app.add_subcommand("freedman", "Discretized-string probabilities of two equivalent strings");
  add_common(fr, c);
  fr->add_option("--xi", xi, "First string, comma separated");
  fr->add_option("--eta", eta, "Second string, comma separated");
  fr->add_option("--steps", steps, "Grid steps, comma separated");

  std::optional<std::string> checks;
  auto* ch = app.add_subcommand("characterize", "Lambda, reversibility, exchangeability and Freedman checks");
  add_common(ch, c);
  ch->add_option("--checks", checks, "Comma separated checks");
  ch->add_option("--pairs", pairs, "Pairs for the exchangeability check");

  auto* can = app.add_subcommand("canonicalize", "Reduce linear rates to VRJP form");
  add_common(can, c);
  can->add_option("--pairs", pairs, "Pairs for the exchangeability confirmation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (sim->parsed()) return cmd_simulate(c, horizon, start, clock, out);
    if (dens->parsed()) return cmd_density(traj, model_path, breakdown, density_out, out);
    if (exch->parsed()) return cmd_exchangeability(c, pairs, out);
    if (fr->parsed()) return cmd_freedman(c, xi, eta, steps, out);
    if (ch->parsed()) return cmd_characterize(c, checks, pairs, out);
    if (can->parsed()) return cmd_canonicalize(c, pairs, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SimulationError& e) {
    err << "simulation failed: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kConfigError;
}

}  // namespace vrjp::cli

#include "vrjp/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace vrjp::io {

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

Vertex vertex(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw ConfigError(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<Vertex>();
}

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, what));
  return out;
}

// Per-ordered-edge values from [[i, j, v], ...] with an optional scalar default.
EdgeParam edge_values(const json& spec, const char* list_key, const char* scalar_key, const Graph& g,
                      bool symmetric, std::optional<double> fallback = std::nullopt) {
  std::map<std::pair<Vertex, Vertex>, double> table;
  if (spec.contains(list_key)) {
    const auto& list = spec.at(list_key);
    if (!list.is_array()) throw ConfigError(std::string(list_key) + " must be an array of [i, j, value]");
    for (const auto& entry : list) {
      if (!entry.is_array() || entry.size() != 3) {
        throw ConfigError(std::string(list_key) + " entries must be [i, j, value]");
      }
      const Vertex i = vertex(entry[0], list_key), j = vertex(entry[1], list_key);
      const double v = number(entry[2], list_key);
      if (!g.adjacent(i, j)) throw ConfigError(std::string(list_key) + " names a non-adjacent pair");
      table[{i, j}] = v;
      if (symmetric) table[{j, i}] = v;
    }
  }
  std::optional<double> scalar = fallback;
  if (spec.contains(scalar_key)) scalar = number(spec.at(scalar_key), scalar_key);
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const auto key = std::pair(g.edge_source(id), g.edge_target(id));
    if (!table.count(key)) {
      if (!scalar) {
        throw ConfigError(std::string("no ") + list_key + " entry for ordered pair (" + std::to_string(key.first) +
                          "," + std::to_string(key.second) + ") and no \"" + scalar_key + "\" default");
      }
      table[key] = *scalar;
    }
  }
  return [table = std::move(table)](Vertex i, Vertex j) { return table.at({i, j}); };
}

json edge_list(const Graph& g, const std::function<double(std::size_t)>& value) {
  json out = json::array();
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    out.push_back({g.edge_source(id), g.edge_target(id), value(id)});
  }
  return out;
}

std::string kind_of(const json& j) {
  const auto& k = require(j, "kind");
  if (!k.is_string()) throw ConfigError("\"kind\" must be a string");
  return k.get<std::string>();
}

}  // namespace

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

Graph parse_graph(const json& j) {
  const Vertex n = vertex(require(j, "vertices"), "vertices");
  const auto& edges = require(j, "edges");
  if (!edges.is_array()) throw ConfigError("edges must be an array");
  std::vector<WeightedEdge> out;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ConfigError("edges must be [i, j] or [i, j, W]");
    WeightedEdge w{vertex(e[0], "edge endpoint"), vertex(e[1], "edge endpoint"), 1.0};
    if (e.size() == 3) w.weight = number(e[2], "edge weight");
    out.push_back(w);
  }
  return Graph(n, std::move(out));
}

json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.a, e.b, e.weight});
  return {{"vertices", g.vertex_count()}, {"edges", edges}};
}

RateFamily parse_rates(const json& j, const Graph& g) {
  const std::string kind = kind_of(j);
  if (kind == "vrjp") return RateFamily::vrjp(g);
  if (kind == "linear") {
    return RateFamily::linear(g, edge_values(j, "slopes", "slope", g, false),
                              edge_values(j, "offsets", "offset", g, false));
  }
  if (kind == "constant") return RateFamily::constant(g, edge_values(j, "rates", "rate", g, false));
  if (kind == "power") {
    return RateFamily::power(g, edge_values(j, "scales", "scale", g, false, 1.0),
                             number(require(j, "exponent"), "exponent"));
  }
  if (kind == "tabulated") {
    return RateFamily::tabulated(g, number_list(require(j, "grid"), "grid"),
                                 number_list(require(j, "values"), "values"),
                                 edge_values(j, "scales", "scale", g, false, 1.0));
  }
  throw ConfigError("unknown rate kind \"" + kind + "\"");
}

TimeScale parse_timescale(const json& j, std::size_t n) {
  const std::string kind = kind_of(j);
  if (kind == "vrjp") {
    if (!j.contains("scales")) return TimeScale::vrjp(n);
    auto c = number_list(j.at("scales"), "scales");
    if (c.size() != n) throw ConfigError("vrjp time scale needs one factor per vertex");
    return TimeScale::scaled_vrjp(c);
  }
  if (kind == "identity") return TimeScale::identity(n);
  if (kind == "numeric" || kind == "polynomial") {
    return TimeScale::polynomial(n, number_list(require(j, "coefficients"), "coefficients"));
  }
  throw ConfigError("unknown time-scale kind \"" + kind + "\"");
}

Model parse_model(const json& j) {
  if (!j.is_object()) throw ConfigError("model must be a JSON object");
  if (j.contains("schema") && j.at("schema") != kModelSchema) {
    throw ConfigError("unsupported schema " + j.at("schema").dump());
  }
  Graph g = parse_graph(require(j, "graph"));
  const auto& rates = require(j, "rates");
  if (kind_of(rates) == "vrjp" && rates.contains("weights")) {
    // Weights given with the rates replace the graph weights.
    const EdgeParam w = edge_values(rates, "weights", "weight", g, true, std::nan(""));
    std::vector<WeightedEdge> edges;
    for (const auto& e : g.edges()) {
      const double given = w(e.a, e.b);
      edges.push_back({e.a, e.b, std::isnan(given) ? e.weight : given});
    }
    g = Graph(g.vertex_count(), std::move(edges));
  }
  RateFamily F = parse_rates(rates, g);
  TimeScale T = parse_timescale(require(j, "timescale"), g.vertex_count());
  return Model{std::move(F), std::move(T)};
}

json rates_to_json(const RateFamily& F) {
  const Graph& g = F.graph();
  json out = {{"kind", to_string(F.kind())}};
  switch (F.kind()) {
    case RateFamily::Kind::vrjp: {
      json w = json::array();
      for (const auto& e : g.edges()) w.push_back({e.a, e.b, e.weight});
      out["weights"] = w;
      break;
    }
    case RateFamily::Kind::linear:
      out["slopes"] = edge_list(g, [&](std::size_t id) { return F.primary_parameter(id); });
      out["offsets"] = edge_list(g, [&](std::size_t id) { return F.offset_parameter(id); });
      break;
    case RateFamily::Kind::constant:
      out["rates"] = edge_list(g, [&](std::size_t id) { return F.primary_parameter(id); });
      break;
    case RateFamily::Kind::power:
      out["scales"] = edge_list(g, [&](std::size_t id) { return F.primary_parameter(id); });
      out["exponent"] = F.exponent();
      break;
    case RateFamily::Kind::tabulated:
      out["grid"] = F.table_xs();
      out["values"] = F.table_values();
      out["scales"] = edge_list(g, [&](std::size_t id) { return F.primary_parameter(id); });
      break;
  }
  return out;
}

json timescale_to_json(const TimeScale& T) {
  const auto& first = T.at(0);
  bool uniform = true;
  for (Vertex v = 1; v < T.vertex_count(); ++v) uniform = uniform && T.at(v).kind() == first.kind();
  if (!uniform) throw ConfigError("mixed per-vertex time scales cannot be serialized");
  switch (first.kind()) {
    case VertexScale::Kind::vrjp: {
      json out = {{"kind", "vrjp"}};
      std::vector<double> c;
      bool unit = true;
      for (Vertex v = 0; v < T.vertex_count(); ++v) {
        c.push_back(T.at(v).vrjp_scale());
        unit = unit && c.back() == 1.0;
      }
      if (!unit) out["scales"] = c;
      return out;
    }
    case VertexScale::Kind::identity: return {{"kind", "identity"}};
    case VertexScale::Kind::numeric:
      if (!first.polynomial_coefficients().empty()) {
        return {{"kind", "numeric"}, {"coefficients", first.polynomial_coefficients()}};
      }
      [[fallthrough]];
    case VertexScale::Kind::generic: break;
  }
  throw ConfigError("time scales given by closures cannot be serialized");
}

json model_to_json(const Model& m) {
  return {{"schema", kModelSchema},
          {"graph", graph_to_json(m.graph())},
          {"rates", rates_to_json(m.rates)},
          {"timescale", timescale_to_json(m.timescale)}};
}

Trajectory parse_trajectory(const json& j) {
  const Vertex start = vertex(require(j, "start"), "start");
  const auto& jumps = require(j, "jumps");
  if (!jumps.is_array()) throw ConfigError("jumps must be an array");
  std::vector<Jump> out;
  for (const auto& jump : jumps) {
    if (!jump.is_array() || jump.size() != 2) throw ConfigError("jumps must be [target, time] pairs");
    out.push_back({vertex(jump[0], "jump target"), number(jump[1], "jump time")});
  }
  const double horizon = number(require(j, "horizon"), "horizon");
  Clock clock = Clock::X;
  if (j.contains("clock")) {
    const auto& c = j.at("clock");
    if (c == "X") {
      clock = Clock::X;
    } else if (c == "Y") {
      clock = Clock::Y;
    } else {
      throw ConfigError("clock must be \"X\" or \"Y\"");
    }
  }
  return Trajectory::from_jumps(start, out, horizon, clock);
}

json trajectory_to_json(const Trajectory& tr) {
  json jumps = json::array();
  for (const auto& jump : tr.jumps()) jumps.push_back({jump.target, jump.time});
  return {{"start", tr.start()}, {"jumps", jumps}, {"horizon", tr.horizon()}, {"clock", to_string(tr.clock())}};
}

std::vector<Trajectory> read_jsonl(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_trajectory(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  for (const auto& tr : trajectories) out << trajectory_to_json(tr).dump() << '\n';
}

}  // namespace vrjp::io

#ifndef VRJP_IO_HPP
#define VRJP_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vrjp/dynamics.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/trajectory.hpp"

namespace vrjp::io {

using nlohmann::json;

inline constexpr const char* kModelSchema = "vrjp-model/1";
inline constexpr const char* kReportSchema = "vrjp-report/1";

/// Malformed or schema-violating input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// {"vertices": n, "edges": [[i, j, W], ...]}, W defaulting to 1.
Graph parse_graph(const json& j);
json graph_to_json(const Graph& g);

/// {"graph": ..., "rates": {...}, "timescale": {...}}.  A "weights" list
/// under VRJP rates replaces the graph's edge weights.
Model parse_model(const json& j);
RateFamily parse_rates(const json& j, const Graph& g);
TimeScale parse_timescale(const json& j, std::size_t vertex_count);

json model_to_json(const Model& m);
json rates_to_json(const RateFamily& F);
json timescale_to_json(const TimeScale& T);

/// {"start": v, "jumps": [[target, time], ...], "horizon": t, "clock": "X" | "Y"}.
Trajectory parse_trajectory(const json& j);
json trajectory_to_json(const Trajectory& tr);

std::vector<Trajectory> read_jsonl(std::istream& in);
void write_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories);

}  // namespace vrjp::io

#endif  // VRJP_IO_HPP

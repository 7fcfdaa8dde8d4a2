#include "vrjp/density.hpp"

#include <cmath>

#include "vrjp/simulator.hpp"

namespace vrjp {

namespace {

void require_clock(const Trajectory& tr, Clock c) {
  if (tr.clock() != c) throw ModelError("expected a " + to_string(c) + "-clock trajectory");
}

double positive_rate(const RateFamily& F, std::size_t id, double x) {
  const double r = F.rate_by_id(id, x);
  if (!(r > 0.0) || !std::isfinite(r)) throw ModelError("rate evaluation failed");
  return r;
}

std::vector<bool> visited_set(const Trajectory& tr, std::size_t n) {
  std::vector<bool> visited(n, false);
  for (Vertex v : tr.states()) visited[v] = true;
  return visited;
}

}  // namespace

double log_density_x(const Trajectory& tr, const Graph& g, const RateFamily& F) {
  require_clock(tr, Clock::X);
  require_same_graph(g, F);
  tr.check_on(g);
  const auto& states = tr.states();
  std::vector<double> local(g.vertex_count(), 0.0);
  double log_product = 0.0;
  double integral = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Vertex i = states[k];
    const auto nbrs = g.neighbors(i);
    const std::size_t first = g.first_edge_id(i);
    double total = 0.0;
    for (std::size_t m = 0; m < nbrs.size(); ++m) total += positive_rate(F, first + m, local[nbrs[m]]);
    integral += total * tr.holds()[k];
    if (k + 1 < states.size()) {
      const Vertex j = states[k + 1];
      log_product += std::log(positive_rate(F, g.require_edge_id(i, j), local[j]));
    }
    local[i] += tr.holds()[k];
  }
  return log_product - integral;
}

DensityBreakdown log_density_y(const Trajectory& tr, const Graph& g, const RateFamily& F, const TimeScale& T) {
  require_clock(tr, Clock::Y);
  require_same_graph(g, F);
  tr.check_on(g);
  if (T.vertex_count() != g.vertex_count()) throw ModelError("time scale and graph disagree on the vertex count");
  const auto visited = visited_set(tr, g.vertex_count());
  const auto& states = tr.states();
  std::vector<double> S(g.vertex_count(), 0.0);
  DensityBreakdown out;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Vertex i = states[k];
    const VertexScale& si = T.at(i);
    const double before = S[i];
    const double after = before + tr.holds()[k];
    const double dH = si.H_hat(after) - si.H_hat(before);
    const auto nbrs = g.neighbors(i);
    const std::size_t first = g.first_edge_id(i);
    for (std::size_t m = 0; m < nbrs.size(); ++m) {
      const Vertex j = nbrs[m];
      const double term = positive_rate(F, first + m, T.h_inv(j, S[j])) * dH;
      (visited[j] ? out.integral_tilde : out.integral_hat) += term;
    }
    if (k + 1 < states.size()) {
      const Vertex j = states[k + 1];
      const double rate = positive_rate(F, g.require_edge_id(i, j), T.h_inv(j, S[j]));
      out.log_product += std::log(rate) - std::log(si.H(after));
    }
    S[i] = after;
  }
  return out;
}

double log_density_vrjp(const Trajectory& tr, const Graph& g) {
  require_clock(tr, Clock::Y);
  tr.check_on(g);
  const auto S = final_local_times(tr, g.vertex_count());
  const auto& states = tr.states();
  const double n = static_cast<double>(tr.jump_count());
  double out = -n * std::log(2.0);
  for (std::size_t k = 0; k + 1 < states.size(); ++k) out += std::log(g.weight(states[k], states[k + 1]));
  for (Vertex i = 0; i < g.vertex_count(); ++i) {
    if (i != tr.end_state()) out -= 0.5 * std::log1p(S[i]);
  }
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    out -= 0.5 * g.weight(id) * (std::sqrt((S[i] + 1.0) * (S[j] + 1.0)) - 1.0);
  }
  return out;
}

DensityBreakdown density_split(const Trajectory& tr, const Graph& g, const RateFamily& F, const TimeScale& T) {
  DensityBreakdown out = log_density_y(tr, g, F, T);
  // Unvisited neighbours keep S_j = 0, so only the occupation of i matters.
  const auto visited = visited_set(tr, g.vertex_count());
  const auto S = final_local_times(tr, g.vertex_count());
  double hat = 0.0;
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    if (!visited[i] || visited[j]) continue;
    hat += positive_rate(F, id, 0.0) * (T.H_hat(i, S[i]) - T.H_hat(i, 0.0));
  }
  out.integral_hat = hat;
  return out;
}

double log_time_change_jacobian(const Trajectory& x_path, const TimeScale& T) {
  require_clock(x_path, Clock::X);
  const auto& states = x_path.states();
  std::vector<double> local(T.vertex_count(), 0.0);
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const Vertex i = states[k];
    local[i] += x_path.holds()[k];
    out += std::log(T.h_prime(i, local[i]));
  }
  return out;
}

}  // namespace vrjp

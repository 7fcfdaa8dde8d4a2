#include "vrjp/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "vrjp/parallel.hpp"

namespace vrjp {

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ModelError("simulation horizon must be positive");
  if (max_jumps < 1) throw ModelError("max_jumps must be at least 1");
}

void require_same_graph(const Graph& g, const RateFamily& F) {
  if (!(F.graph() == g)) throw ModelError("rate family is defined on a different graph");
}

namespace {

// Shared kernel for both clocks.  `scale` is null for the X clock.
Trajectory run(const Graph& g, const RateFamily& F, const TimeScale* scale, Vertex start, double horizon, Rng& rng,
               std::size_t max_jumps) {
  g.check_vertex(start);
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ModelError("simulation horizon must be positive");
  if (scale && scale->vertex_count() != g.vertex_count()) {
    throw ModelError("time scale and graph disagree on the vertex count");
  }
  const std::size_t n = g.vertex_count();
  std::vector<double> local(n, 0.0);
  std::vector<double> rates;
  std::vector<Vertex> states{start};
  std::vector<double> holds;
  double clock = 0.0;
  Vertex at = start;

  for (;;) {
    const auto nbrs = g.neighbors(at);
    const std::size_t first = g.first_edge_id(at);
    rates.resize(nbrs.size());
    double total = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      const double r = F.rate_by_id(first + k, local[nbrs[k]]);
      if (!(r > 0.0) || !std::isfinite(r)) throw ModelError("rate family produced a non-positive rate");
      rates[k] = r;
      total += r;
    }
    const double wait = rng.exponential(total);
    double advance = wait;
    if (scale) {
      const VertexScale& s = scale->at(at);
      advance = s.h(local[at] + wait) - s.h(local[at]);
    }
    if (clock + advance >= horizon) {
      holds.push_back(horizon - clock);
      break;
    }
    if (states.size() - 1 >= max_jumps) {
      throw SimulationError("jump cap of " + std::to_string(max_jumps) + " reached before the horizon");
    }
    const double pick = rng.uniform() * total;
    std::size_t k = 0;
    for (double acc = rates[0]; acc <= pick && k + 1 < nbrs.size(); acc += rates[++k]) {
    }
    holds.push_back(advance);
    clock += advance;
    local[at] += wait;
    at = nbrs[k];
    states.push_back(at);
  }
  return Trajectory::from_holds(std::move(states), std::move(holds), scale ? Clock::Y : Clock::X, horizon);
}

}  // namespace

Trajectory simulate_with(const Graph& g, const RateFamily& F, Vertex start, double horizon, Rng& rng,
                         std::size_t max_jumps) {
  require_same_graph(g, F);
  return run(g, F, nullptr, start, horizon, rng, max_jumps);
}

Trajectory simulate_y_with(const Graph& g, const RateFamily& F, const TimeScale& T, Vertex start, double y_horizon,
                           Rng& rng, std::size_t max_jumps) {
  require_same_graph(g, F);
  return run(g, F, &T, start, y_horizon, rng, max_jumps);
}

Trajectory simulate(const Graph& g, const RateFamily& F, const SimConfig& cfg) {
  cfg.validate();
  Rng rng = Rng::stream(cfg.seed, 0);
  return simulate_with(g, F, cfg.start, cfg.horizon, rng, cfg.max_jumps);
}

// ---------------------------------------------------------------------------

Clock event_clock(const EventSpec& e) {
  return std::visit([](const auto& ev) { return ev.clock; }, e);
}

Vertex event_start(const EventSpec& e) {
  return std::visit(
      [](const auto& ev) -> Vertex {
        using E = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<E, BinEvent>) {
          return ev.skeleton.front();
        } else {
          return ev.states.front();
        }
      },
      e);
}

double event_horizon(const EventSpec& e) {
  if (const auto* b = std::get_if<BinEvent>(&e)) return b->horizon;
  const auto& g = std::get<GridEvent>(e);
  return static_cast<double>(g.states.size() - 1) * g.step;
}

void validate_event(const EventSpec& e) {
  if (const auto* b = std::get_if<BinEvent>(&e)) {
    if (b->skeleton.empty()) throw ModelError("bin event needs a start vertex");
    if (b->bins.size() + 1 != b->skeleton.size()) throw ModelError("bin event needs one bin per jump");
    if (!(b->horizon > 0.0)) throw ModelError("bin event horizon must be positive");
    for (const auto& [lo, hi] : b->bins) {
      if (!(lo < hi) || lo < 0.0) throw ModelError("bin event has an empty or negative bin");
    }
    return;
  }
  const auto& g = std::get<GridEvent>(e);
  if (g.states.size() < 2) throw ModelError("grid event needs at least two samples");
  if (!(g.step > 0.0)) throw ModelError("grid event step must be positive");
}

bool event_occurs(const Trajectory& tr, const EventSpec& e) {
  if (const auto* b = std::get_if<BinEvent>(&e)) {
    const auto& times = tr.jump_times();
    const auto within = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), b->horizon) -
                                                 times.begin());
    if (within != b->bins.size()) return false;
    for (std::size_t k = 0; k < b->skeleton.size(); ++k) {
      if (tr.states()[k] != b->skeleton[k]) return false;
    }
    for (std::size_t k = 0; k < b->bins.size(); ++k) {
      if (times[k] < b->bins[k].first || times[k] > b->bins[k].second) return false;
    }
    return true;
  }
  const auto& g = std::get<GridEvent>(e);
  for (std::size_t m = 0; m < g.states.size(); ++m) {
    const double t = std::min(static_cast<double>(m) * g.step, tr.horizon());
    if (tr.state_at(t) != g.states[m]) return false;
  }
  return true;
}

McEstimate McEstimate::from_hits(std::size_t hits, std::size_t trials) {
  McEstimate m;
  m.hits = hits;
  m.trials = trials;
  m.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  m.std_error = std::sqrt(m.estimate * (1.0 - m.estimate) / static_cast<double>(trials));
  return m;
}

std::vector<McEstimate> mc_event_probabilities(const Graph& g, const RateFamily& F, const TimeScale* T,
                                               const SimConfig& cfg, const std::vector<EventSpec>& events,
                                               std::size_t trials, std::size_t workers) {
  if (trials == 0) throw ModelError("trials must be positive");
  if (events.empty()) return {};
  require_same_graph(g, F);
  const Clock clock = event_clock(events.front());
  const Vertex start = event_start(events.front());
  double horizon = 0.0;
  for (const auto& e : events) {
    validate_event(e);
    if (event_clock(e) != clock) throw ModelError("events in one batch must share a clock");
    if (event_start(e) != start) throw ModelError("events in one batch must share a start vertex");
    horizon = std::max(horizon, event_horizon(e));
  }
  if (clock == Clock::Y && !T) throw ModelError("Y-clock events need a time scale");

  if (workers == 0) workers = default_workers();
  std::vector<std::vector<std::size_t>> hits(workers, std::vector<std::size_t>(events.size(), 0));
  parallel_blocks(trials, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    auto& mine = hits[w];
    for (std::size_t trial = begin; trial < end; ++trial) {
      Rng rng = Rng::stream(cfg.seed, trial);
      const Trajectory tr = clock == Clock::X ? run(g, F, nullptr, start, horizon, rng, cfg.max_jumps)
                                              : run(g, F, T, start, horizon, rng, cfg.max_jumps);
      for (std::size_t e = 0; e < events.size(); ++e) {
        if (event_occurs(tr, events[e])) ++mine[e];
      }
    }
  });

  std::vector<McEstimate> out;
  out.reserve(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) {
    std::size_t total = 0;
    for (const auto& mine : hits) total += mine[e];
    out.push_back(McEstimate::from_hits(total, trials));
  }
  return out;
}

McEstimate mc_event_probability(const Graph& g, const RateFamily& F, const TimeScale* T, const SimConfig& cfg,
                                const EventSpec& event, std::size_t trials, std::size_t workers) {
  return mc_event_probabilities(g, F, T, cfg, {event}, trials, workers).front();
}

}  // namespace vrjp

#ifndef VRJP_SIMULATOR_HPP
#define VRJP_SIMULATOR_HPP

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "vrjp/dynamics.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/rng.hpp"
#include "vrjp/trajectory.hpp"

namespace vrjp {

/// The jump cap was reached before the horizon; the partial path is discarded.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxJumps = 10'000'000;

struct SimConfig {
  Vertex start = 0;
  /// X-clock horizon.
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::size_t max_jumps = kDefaultMaxJumps;

  void validate() const;
};

/**
 * Exact simulation of the X process on [0, horizon].
 *
 * While the walker sits at i, every l_j with j != i is frozen, so the rate
 * to each neighbour is constant: the holding time is Exponential(sum_j
 * f_{i,j}(l_j)) and the target is j with probability f_{i,j}(l_j) / sum.
 */
Trajectory simulate(const Graph& g, const RateFamily& F, const SimConfig& cfg);

/// As simulate, but drawing from an explicit stream.
Trajectory simulate_with(const Graph& g, const RateFamily& F, Vertex start, double horizon, Rng& rng,
                         std::size_t max_jumps = kDefaultMaxJumps);

/**
 * Y-clock path on [0, y_horizon] for Y = X o D^{-1}.  The X dynamics run
 * until D(t) = sum_i h_i(l_i(t)) reaches y_horizon; the X time at which
 * that happens is found within the current holding interval through
 * h_i^{-1}, and the path is truncated there.
 */
Trajectory simulate_y_with(const Graph& g, const RateFamily& F, const TimeScale& T, Vertex start, double y_horizon,
                           Rng& rng, std::size_t max_jumps = kDefaultMaxJumps);

/// Skeleton i_0..i_n with jump k in [bins[k].first, bins[k].second] and no other jump on [0, horizon].
struct BinEvent {
  Clock clock = Clock::X;
  std::vector<Vertex> skeleton;
  std::vector<std::pair<double, double>> bins;
  double horizon = 1.0;
};

/// Discretized string: state at m * step equals states[m] for m = 0..l.
struct GridEvent {
  Clock clock = Clock::X;
  double step = 1.0;
  std::vector<Vertex> states;
};

using EventSpec = std::variant<BinEvent, GridEvent>;

Clock event_clock(const EventSpec& e);
Vertex event_start(const EventSpec& e);
/// Horizon the event needs to be decided: BinEvent::horizon or l * step.
double event_horizon(const EventSpec& e);
void validate_event(const EventSpec& e);

/// Whether the event holds for a path with horizon >= event_horizon(e).
bool event_occurs(const Trajectory& tr, const EventSpec& e);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t hits = 0;

  static McEstimate from_hits(std::size_t hits, std::size_t trials);
};

/**
 * Frequency estimates of several events from the same sample paths.  All
 * events must share one clock and one start vertex.  Trial k uses
 * Rng::stream(seed, k); counts are summed across workers, so results do
 * not depend on the number of workers.  Y-clock events need T.
 */
std::vector<McEstimate> mc_event_probabilities(const Graph& g, const RateFamily& F, const TimeScale* T,
                                               const SimConfig& cfg, const std::vector<EventSpec>& events,
                                               std::size_t trials, std::size_t workers = 0);

McEstimate mc_event_probability(const Graph& g, const RateFamily& F, const TimeScale* T, const SimConfig& cfg,
                                const EventSpec& event, std::size_t trials, std::size_t workers = 0);

/// Throws ModelError unless F is defined on g.
void require_same_graph(const Graph& g, const RateFamily& F);

}  // namespace vrjp

#endif  // VRJP_SIMULATOR_HPP

#ifndef VRJP_TRAJECTORY_HPP
#define VRJP_TRAJECTORY_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vrjp/dynamics.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/rng.hpp"

namespace vrjp {

/// Raw process clock (X) or time-changed clock (Y).
enum class Clock { X, Y };

std::string to_string(Clock c);

struct Jump {
  Vertex target;
  double time;
};

/**
 * Piecewise-constant right-continuous path on [0, horizon].
 *
 * Stored as the visited states i_0..i_n with their holding durations; the
 * last duration is horizon - t_n and may be zero.  Jump times are kept
 * alongside so that paths built from explicit times reproduce them exactly.
 */
class Trajectory {
 public:
  static Trajectory from_jumps(Vertex start, const std::vector<Jump>& jumps, double horizon,
                               Clock clock = Clock::X);
  /// Jump times are prefix sums of holds; horizon defaults to their total.
  static Trajectory from_holds(std::vector<Vertex> states, std::vector<double> holds, Clock clock = Clock::X,
                               std::optional<double> horizon = std::nullopt);

  Vertex start() const { return states_.front(); }
  Vertex end_state() const { return states_.back(); }
  std::size_t jump_count() const { return states_.size() - 1; }
  const std::vector<Vertex>& states() const { return states_; }
  const std::vector<double>& holds() const { return holds_; }
  /// t_1..t_n.
  const std::vector<double>& jump_times() const { return times_; }
  double horizon() const { return horizon_; }
  Clock clock() const { return clock_; }

  std::vector<Jump> jumps() const;
  /// Start of the k-th visit (0 for k = 0).
  double visit_start(std::size_t k) const { return k == 0 ? 0.0 : times_[k - 1]; }

  /// Right-continuous state at time t in [0, horizon].
  Vertex state_at(double t) const;

  /// Throws ModelError unless consecutive states are adjacent in g.
  void check_on(const Graph& g) const;

  Trajectory with_clock(Clock c) const;

  bool operator==(const Trajectory&) const = default;

 private:
  Trajectory() = default;
  void validate() const;

  std::vector<Vertex> states_;
  std::vector<double> holds_;
  std::vector<double> times_;
  double horizon_ = 0.0;
  Clock clock_ = Clock::X;
};

/// N_{i,j}: number of jumps i -> j.
struct TransitionCounts {
  std::map<std::pair<Vertex, Vertex>, std::size_t> counts;

  std::size_t total() const;
  std::size_t at(Vertex i, Vertex j) const;
  bool operator==(const TransitionCounts&) const = default;
};

TransitionCounts transition_counts(const Trajectory& tr);
TransitionCounts transition_counts(const std::vector<Vertex>& skeleton);

/**
 * Occupation times l_v(t) for every vertex v < max(vertex_count, states+1).
 * At t = horizon the per-vertex sums are taken over the holding durations
 * in sorted order, so they are invariant under any permutation of visits.
 */
std::vector<double> local_times(const Trajectory& tr, double t, std::size_t vertex_count = 0);
std::vector<double> final_local_times(const Trajectory& tr, std::size_t vertex_count = 0);

inline constexpr double kDefaultEquivalenceTol = 1e-9;

/// Same start, identical transition counts, horizons and final local times within tol.
bool is_equivalent(const Trajectory& a, const Trajectory& b, double tol = kDefaultEquivalenceTol);

/// Visits blocks [p, q) and [q, r) swapped, both beginning at the same vertex.
struct ExcursionMove {
  std::size_t p;
  std::size_t q;
  std::size_t r;
};

/// Every block swap that keeps the path inside its equivalence class.
std::vector<ExcursionMove> excursion_moves(const Trajectory& tr);

Trajectory apply_move(const Trajectory& tr, const ExcursionMove& m);

/// Applies one uniformly chosen move from excursion_moves, or returns tr if there is none.
Trajectory excursion_shuffle(const Trajectory& tr, Rng& rng);

enum class TimeChangeDirection { x_to_y, y_to_x };

/// Transport through D(t) = sum_i h_i(l_i(t)) (or its inverse).
Trajectory time_change(const Trajectory& tr, const TimeScale& T, TimeChangeDirection direction);

/// States at 0, h, 2h, ..., floor(horizon / h) h.
std::vector<Vertex> discretize(const Trajectory& tr, double h);

}  // namespace vrjp

#endif  // VRJP_TRAJECTORY_HPP

#include "vrjp/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace vrjp {

std::string to_string(Clock c) { return c == Clock::X ? "X" : "Y"; }

Trajectory Trajectory::from_jumps(Vertex start, const std::vector<Jump>& jumps, double horizon, Clock clock) {
  Trajectory tr;
  tr.clock_ = clock;
  tr.horizon_ = horizon;
  tr.states_.reserve(jumps.size() + 1);
  tr.states_.push_back(start);
  tr.times_.reserve(jumps.size());
  double prev = 0.0;
  for (const auto& j : jumps) {
    tr.states_.push_back(j.target);
    tr.times_.push_back(j.time);
    tr.holds_.push_back(j.time - prev);
    prev = j.time;
  }
  tr.holds_.push_back(horizon - prev);
  tr.validate();
  return tr;
}

Trajectory Trajectory::from_holds(std::vector<Vertex> states, std::vector<double> holds, Clock clock,
                                  std::optional<double> horizon) {
  if (states.empty() || states.size() != holds.size()) {
    throw ModelError("trajectory needs one holding duration per visited state");
  }
  Trajectory tr;
  tr.clock_ = clock;
  tr.states_ = std::move(states);
  tr.holds_ = std::move(holds);
  tr.times_.reserve(tr.states_.size() - 1);
  double t = 0.0;
  for (std::size_t k = 0; k + 1 < tr.holds_.size(); ++k) {
    t += tr.holds_[k];
    tr.times_.push_back(t);
  }
  tr.horizon_ = horizon ? *horizon : t + tr.holds_.back();
  tr.validate();
  return tr;
}

void Trajectory::validate() const {
  if (!(horizon_ >= 0.0) || !std::isfinite(horizon_)) throw ModelError("trajectory horizon must be finite and >= 0");
  double prev = 0.0;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (states_[k + 1] == states_[k]) throw ModelError("trajectory contains a self-jump");
    if (!(times_[k] > prev) || !std::isfinite(times_[k])) {
      throw ModelError("jump times must be strictly increasing and positive");
    }
    prev = times_[k];
  }
  if (prev > horizon_) throw ModelError("jump time beyond the horizon");
  for (std::size_t k = 0; k < holds_.size(); ++k) {
    if (!(holds_[k] >= 0.0)) throw ModelError("negative holding duration");
  }
}

std::vector<Jump> Trajectory::jumps() const {
  std::vector<Jump> out;
  out.reserve(times_.size());
  for (std::size_t k = 0; k < times_.size(); ++k) out.push_back({states_[k + 1], times_[k]});
  return out;
}

Vertex Trajectory::state_at(double t) const {
  if (!(t >= 0.0) || t > horizon_) throw ModelError("time " + std::to_string(t) + " outside [0, horizon]");
  const auto jumped = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  return states_[static_cast<std::size_t>(jumped)];
}

void Trajectory::check_on(const Graph& g) const {
  for (Vertex v : states_) g.check_vertex(v);
  for (std::size_t k = 0; k + 1 < states_.size(); ++k) {
    if (!g.adjacent(states_[k], states_[k + 1])) {
      throw ModelError("trajectory jumps between non-adjacent vertices " + std::to_string(states_[k]) + " and " +
                       std::to_string(states_[k + 1]));
    }
  }
}

Trajectory Trajectory::with_clock(Clock c) const {
  Trajectory tr = *this;
  tr.clock_ = c;
  return tr;
}

// ---------------------------------------------------------------------------

std::size_t TransitionCounts::total() const {
  std::size_t n = 0;
  for (const auto& [_, c] : counts) n += c;
  return n;
}

std::size_t TransitionCounts::at(Vertex i, Vertex j) const {
  auto it = counts.find({i, j});
  return it == counts.end() ? 0 : it->second;
}

TransitionCounts transition_counts(const std::vector<Vertex>& skeleton) {
  TransitionCounts tc;
  for (std::size_t k = 0; k + 1 < skeleton.size(); ++k) ++tc.counts[{skeleton[k], skeleton[k + 1]}];
  return tc;
}

TransitionCounts transition_counts(const Trajectory& tr) { return transition_counts(tr.states()); }

namespace {

std::size_t vertex_span(const Trajectory& tr, std::size_t vertex_count) {
  const Vertex top = *std::max_element(tr.states().begin(), tr.states().end());
  return std::max(vertex_count, top + 1);
}

}  // namespace

std::vector<double> final_local_times(const Trajectory& tr, std::size_t vertex_count) {
  const std::size_t n = vertex_span(tr, vertex_count);
  std::vector<std::vector<double>> per_vertex(n);
  for (std::size_t k = 0; k < tr.states().size(); ++k) per_vertex[tr.states()[k]].push_back(tr.holds()[k]);
  std::vector<double> out(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& hs = per_vertex[v];
    std::sort(hs.begin(), hs.end());
    double acc = 0.0;
    for (double h : hs) acc += h;
    out[v] = acc;
  }
  return out;
}

std::vector<double> local_times(const Trajectory& tr, double t, std::size_t vertex_count) {
  if (!(t >= 0.0) || t > tr.horizon()) throw ModelError("time " + std::to_string(t) + " outside [0, horizon]");
  if (t == tr.horizon()) return final_local_times(tr, vertex_count);
  std::vector<double> out(vertex_span(tr, vertex_count), 0.0);
  const auto& states = tr.states();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double begin = tr.visit_start(k);
    if (begin >= t) break;
    const double end = k + 1 < states.size() ? tr.jump_times()[k] : tr.horizon();
    out[states[k]] += std::min(end, t) - begin;
  }
  return out;
}

bool is_equivalent(const Trajectory& a, const Trajectory& b, double tol) {
  if (a.clock() != b.clock()) throw ModelError("cannot compare trajectories on different clocks");
  if (a.start() != b.start()) return false;
  if (transition_counts(a) != transition_counts(b)) return false;
  if (std::abs(a.horizon() - b.horizon()) > tol) return false;
  const std::size_t n = std::max(vertex_span(a, 0), vertex_span(b, 0));
  const auto la = final_local_times(a, n);
  const auto lb = final_local_times(b, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (std::abs(la[v] - lb[v]) > tol) return false;
  }
  return true;
}

std::vector<ExcursionMove> excursion_moves(const Trajectory& tr) {
  const auto& s = tr.states();
  const std::size_t last = s.size() - 1;
  std::vector<ExcursionMove> moves;
  // next[k]: next visit of s[k] after k, or last + 1.
  std::vector<std::size_t> next(s.size(), last + 1);
  std::map<Vertex, std::size_t> seen;
  for (std::size_t k = s.size(); k-- > 0;) {
    auto it = seen.find(s[k]);
    if (it != seen.end()) next[k] = it->second;
    seen[s[k]] = k;
  }
  for (std::size_t p = 0; p < s.size(); ++p) {
    const std::size_t q = next[p];
    if (q > last) continue;
    const std::size_t r = next[q];
    // A closed excursion may swap with the next one; the open tail may swap
    // in only if it ends where the first block leaves off.
    const bool closed = r <= last;
    const bool tail = r == last + 1 && s[q - 1] == s[last] && tr.holds()[last] > 0.0;
    if (closed || tail) moves.push_back({p, q, r});
  }
  return moves;
}

Trajectory apply_move(const Trajectory& tr, const ExcursionMove& m) {
  const auto& s = tr.states();
  const auto& h = tr.holds();
  if (!(m.p < m.q && m.q < m.r && m.r <= s.size() && s[m.p] == s[m.q])) {
    throw ModelError("invalid excursion move");
  }
  std::vector<Vertex> states;
  std::vector<double> holds;
  states.reserve(s.size());
  holds.reserve(s.size());
  auto append = [&](std::size_t begin, std::size_t end) {
    states.insert(states.end(), s.begin() + static_cast<std::ptrdiff_t>(begin),
                  s.begin() + static_cast<std::ptrdiff_t>(end));
    holds.insert(holds.end(), h.begin() + static_cast<std::ptrdiff_t>(begin),
                 h.begin() + static_cast<std::ptrdiff_t>(end));
  };
  append(0, m.p);
  append(m.q, m.r);
  append(m.p, m.q);
  append(m.r, s.size());
  return Trajectory::from_holds(std::move(states), std::move(holds), tr.clock(), tr.horizon());
}

Trajectory excursion_shuffle(const Trajectory& tr, Rng& rng) {
  const auto moves = excursion_moves(tr);
  if (moves.empty()) return tr;
  return apply_move(tr, moves[rng.below(moves.size())]);
}

Trajectory time_change(const Trajectory& tr, const TimeScale& T, TimeChangeDirection direction) {
  const bool forward = direction == TimeChangeDirection::x_to_y;
  if (tr.clock() != (forward ? Clock::X : Clock::Y)) {
    throw ModelError("time change direction does not match the trajectory clock");
  }
  const auto& states = tr.states();
  std::vector<double> clock(T.vertex_count(), 0.0);
  std::vector<double> holds(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Vertex v = states[k];
    const VertexScale& scale = T.at(v);
    const double before = clock[v];
    const double after = before + tr.holds()[k];
    holds[k] = forward ? scale.h(after) - scale.h(before) : scale.h_inv(after) - scale.h_inv(before);
    clock[v] = after;
    const bool final_visit = k + 1 == states.size();
    if (!std::isfinite(holds[k]) || holds[k] < 0.0 || (!final_visit && holds[k] == 0.0)) {
      throw ModelError("time change produced a non-increasing clock");
    }
  }
  return Trajectory::from_holds(states, std::move(holds), forward ? Clock::Y : Clock::X);
}

std::vector<Vertex> discretize(const Trajectory& tr, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ModelError("grid step must be positive");
  // Slack so that horizon = l * h computed in floating point still yields l + 1 samples.
  const auto count = static_cast<std::size_t>(std::floor(tr.horizon() / h * (1.0 + 1e-12)));
  std::vector<Vertex> out;
  out.reserve(count + 1);
  for (std::size_t m = 0; m <= count; ++m) {
    out.push_back(tr.state_at(std::min(static_cast<double>(m) * h, tr.horizon())));
  }
  return out;
}

}  // namespace vrjp

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vrjp/trajectory.hpp"

using namespace vrjp;
using doctest::Approx;

namespace {

Trajectory five_visit_path() {
  return Trajectory::from_holds({0, 1, 0, 2, 1}, {0.5, 0.25, 0.75, 1.0, 0.125}, Clock::Y);
}

}  // namespace

TEST_CASE("local times") {
  const auto tr = Trajectory::from_jumps(0, {{1, 1.0}, {2, 1.5}}, 2.0);
  CHECK(local_times(tr, 2.0, 3) == std::vector<double>{1.0, 0.5, 0.5});
  CHECK(local_times(tr, 0.0, 3) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(local_times(tr, 1.25, 3) == std::vector<double>{1.0, 0.25, 0.0});
  CHECK_THROWS(local_times(tr, 2.5, 3));
}

TEST_CASE("local times sum to elapsed time") {
  Rng rng = Rng::stream(11, 0);
  const Graph k4 = graphs::complete(4);
  for (int k = 0; k < 200; ++k) {
    const auto tr = oracle::random_path(k4, 0, rng.below(25), rng, Clock::X);
    const double t = tr.horizon() * rng.uniform();
    double sum = 0.0;
    for (double l : local_times(tr, t, 4)) sum += l;
    CHECK(sum == Approx(t).epsilon(1e-12));
    double total = 0.0;
    for (double l : final_local_times(tr, 4)) total += l;
    CHECK(total == Approx(tr.horizon()).epsilon(1e-12));
  }
}

TEST_CASE("transition counts") {
  const auto a = transition_counts(std::vector<Vertex>{0, 1, 0, 2, 1});
  CHECK(a.total() == 4);
  CHECK(a.at(0, 1) == 1);
  CHECK(a.at(1, 0) == 1);
  CHECK(a.at(0, 2) == 1);
  CHECK(a.at(2, 1) == 1);
  CHECK(a.at(1, 2) == 0);
  CHECK(transition_counts(std::vector<Vertex>{0, 2, 1, 0, 1}) == a);
  CHECK(transition_counts(Trajectory::from_jumps(0, {}, 1.0)).counts.empty());
}

TEST_CASE("trajectory validation") {
  CHECK_THROWS(Trajectory::from_jumps(0, {{0, 1.0}}, 2.0));
  CHECK_THROWS(Trajectory::from_jumps(0, {{1, 1.0}, {2, 1.0}}, 2.0));
  CHECK_THROWS(Trajectory::from_jumps(0, {{1, 3.0}}, 2.0));
  CHECK_THROWS(Trajectory::from_jumps(0, {{2, 1.0}}, 2.0).check_on(graphs::path(2)));
  CHECK_THROWS(Trajectory::from_jumps(0, {{2, 1.0}}, 2.0).check_on(graphs::path(3)));
  CHECK(Trajectory::from_jumps(0, {{1, 1.0}}, 2.0).state_at(1.0) == 1);
  CHECK(Trajectory::from_jumps(0, {{1, 1.0}}, 2.0).state_at(0.999) == 0);
}

TEST_CASE("equivalence") {
  const auto a = Trajectory::from_jumps(0, {{1, 1.0}}, 2.0);
  const auto b = Trajectory::from_jumps(0, {{2, 1.0}}, 2.0);
  CHECK(is_equivalent(a, a));
  CHECK_FALSE(is_equivalent(a, b));
  CHECK_THROWS(is_equivalent(a, a.with_clock(Clock::Y)));

  // exact binary fractions so tol = 0 is meaningful
  const auto p = Trajectory::from_holds({0, 1, 0, 2, 0}, {0.5, 0.25, 0.25, 1.0, 0.5});
  const auto q = Trajectory::from_holds({0, 2, 0, 1, 0}, {0.5, 1.0, 0.25, 0.25, 0.5});
  const auto r = Trajectory::from_holds({0, 1, 0, 2, 0}, {0.25, 0.25, 0.5, 1.0, 0.5});
  const auto s = Trajectory::from_holds({0, 1, 0, 2, 0}, {0.5, 0.25, 0.25, 1.0, 0.25});
  CHECK(is_equivalent(p, q, 0.0));
  CHECK(is_equivalent(p, r, 0.0));
  CHECK(is_equivalent(r, p, 0.0));
  CHECK_FALSE(is_equivalent(p, s, 0.0));
  const std::vector<Trajectory> fx{p, q, r, s};
  for (const auto& x : fx) {
    for (const auto& y : fx) {
      CHECK(is_equivalent(x, y, 0.0) == is_equivalent(y, x, 0.0));
      for (const auto& z : fx) {
        if (is_equivalent(x, y, 0.0) && is_equivalent(y, z, 0.0)) CHECK(is_equivalent(x, z, 0.0));
      }
    }
  }
}

TEST_CASE("swapping the first excursion with the tail transports holds") {
  const auto tr = five_visit_path();
  bool found = false;
  for (const auto& m : excursion_moves(tr)) {
    const auto moved = apply_move(tr, m);
    if (moved.states() == std::vector<Vertex>{0, 2, 1, 0, 1}) {
      found = true;
      CHECK(moved.holds() == std::vector<double>{0.75, 1.0, 0.125, 0.5, 0.25});
      CHECK(is_equivalent(tr, moved, 1e-12));
    }
  }
  CHECK(found);
}

TEST_CASE("shuffles stay in the equivalence class") {
  const Graph k3 = graphs::complete(3);
  Rng gen = Rng::stream(3, 0);
  const auto tr = oracle::random_path(k3, 0, 20, gen);
  Rng rng = Rng::stream(3, 1);
  std::size_t changed = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto sh = excursion_shuffle(tr, rng);
    CHECK(sh.start() == tr.start());
    CHECK(transition_counts(sh) == transition_counts(tr));
    const auto la = final_local_times(tr, 3), lb = final_local_times(sh, 3);
    for (std::size_t v = 0; v < 3; ++v) CHECK(la[v] == lb[v]);
    CHECK(sh.horizon() == Approx(tr.horizon()).epsilon(1e-14));
    CHECK(is_equivalent(tr, sh, 1e-12));
    if (!(sh.states() == tr.states())) ++changed;
  }
  CHECK(changed > 0);

  const auto one = Trajectory::from_jumps(0, {{1, 0.5}}, 1.0);
  CHECK(excursion_shuffle(one, rng) == one);
}

TEST_CASE("time change") {
  const TimeScale T = TimeScale::vrjp(2);
  const auto x = Trajectory::from_jumps(0, {{1, 1.0}}, 2.0);
  const auto y = time_change(x, T, TimeChangeDirection::x_to_y);
  CHECK(y.clock() == Clock::Y);
  CHECK(y.jump_times()[0] == 3.0);
  CHECK(y.horizon() == 6.0);

  const auto same = time_change(x, TimeScale::identity(2), TimeChangeDirection::x_to_y);
  CHECK(same.jump_times() == x.jump_times());
  CHECK(same.horizon() == x.horizon());
  CHECK_THROWS(time_change(y, T, TimeChangeDirection::x_to_y));

  Rng rng = Rng::stream(5, 0);
  const Graph k3 = graphs::complete(3);
  const TimeScale T3 = TimeScale::scaled_vrjp({1.0, 0.5, 2.0});
  for (int k = 0; k < 200; ++k) {
    const auto p = oracle::random_path(k3, rng.below(3), rng.below(20), rng, Clock::X);
    const auto back = time_change(time_change(p, T3, TimeChangeDirection::x_to_y), T3, TimeChangeDirection::y_to_x);
    REQUIRE(back.states() == p.states());
    for (std::size_t i = 0; i < p.jump_count(); ++i) CHECK(std::abs(back.jump_times()[i] - p.jump_times()[i]) < 1e-10);
    CHECK(std::abs(back.horizon() - p.horizon()) < 1e-10);
  }
}

TEST_CASE("discretize") {
  CHECK(discretize(Trajectory::from_jumps(0, {{1, 1.5}}, 4.0), 1.0) == std::vector<Vertex>{0, 0, 1, 1, 1});
  CHECK(discretize(Trajectory::from_jumps(2, {}, 1.0), 0.5) == std::vector<Vertex>{2, 2, 2});
  CHECK(discretize(Trajectory::from_jumps(1, {{0, 0.5}}, 1.0), 2.0) == std::vector<Vertex>{1});
  CHECK(discretize(Trajectory::from_jumps(0, {}, 0.9), 0.3).size() == 4);
  CHECK_THROWS(discretize(Trajectory::from_jumps(0, {}, 1.0), 0.0));
}

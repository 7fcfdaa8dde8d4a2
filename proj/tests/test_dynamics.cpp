#include <cmath>
#include <vector>

#include "doctest.h"
#include "vrjp/dynamics.hpp"
#include "vrjp/graph.hpp"

using namespace vrjp;
using doctest::Approx;

namespace {

std::vector<double> grid_0_10() {
  std::vector<double> xs;
  for (int k = 0; k <= 40; ++k) xs.push_back(0.25 * k);
  return xs;
}

void check_scale_consistency(const VertexScale& s, double tol) {
  for (double x : grid_0_10()) {
    const double hx = s.h(x);
    CHECK(std::abs(s.H(hx) - s.h_prime(x)) <= tol * std::max(1.0, s.h_prime(x)));
    CHECK(std::abs(s.h_inv(hx) - x) <= tol * std::max(1.0, x));
  }
  CHECK(s.h(0.0) == 0.0);
  CHECK(s.H_hat(0.0) == 0.0);
  double prev = -1.0;
  for (double x : grid_0_10()) {
    CHECK(s.h(x) > prev);
    prev = s.h(x);
  }
  // derivative of H_hat is 1/H
  for (double v : {0.5, 1.0, 3.0, 7.5, 20.0}) {
    const double e = 1e-4;
    const double d = (s.H_hat(v + e) - s.H_hat(v - e)) / (2 * e);
    CHECK(d == Approx(1.0 / s.H(v)).epsilon(1e-5));
  }
}

}  // namespace

TEST_CASE("rate evaluation") {
  const Graph k3 = graphs::complete(3);
  CHECK(rate_eval(RateFamily::vrjp(k3), 0, 1, 0.0) == 1.0);
  CHECK(rate_eval(RateFamily::vrjp(graphs::complete(3, 2.0)), 0, 1, 1.5) == 5.0);
  const auto lin = RateFamily::linear(k3, [](Vertex, Vertex) { return 1.0; }, [](Vertex, Vertex) { return 2.0; });
  CHECK(rate_eval(lin, 0, 1, 3.0) == 5.0);
  const auto pw = RateFamily::power(k3, [](Vertex, Vertex) { return 1.0; }, 2.0);
  CHECK(pw.rate(0, 1, 2.0) == 5.0);
  const auto tab = RateFamily::tabulated(k3, {0.0, 1.0, 2.0}, {1.0, 3.0, 4.0});
  CHECK(tab.rate(0, 1, 0.5) == 2.0);
  CHECK(tab.rate(0, 1, 5.0) == 4.0);
  CHECK(RateFamily::constant(k3, [](Vertex, Vertex) { return 3.0; }).rate(2, 0, 9.0) == 3.0);
  CHECK_THROWS_AS(RateFamily::vrjp(k3).rate(0, 0, 0.0), ModelError);
  CHECK_THROWS_AS(RateFamily::vrjp(graphs::path(3)).rate(0, 2, 0.0), ModelError);
  CHECK_THROWS_AS(RateFamily::constant(k3, [](Vertex, Vertex) { return 0.0; }), ModelError);
}

TEST_CASE("canonical vrjp scale closed forms") {
  const TimeScale T = TimeScale::vrjp(3);
  CHECK(timescale_eval(T, 0, ScaleQuantity::H, 3.0) == 4.0);
  CHECK(timescale_eval(T, 1, ScaleQuantity::H_hat, 3.0) == 1.0);
  CHECK(timescale_eval(T, 2, ScaleQuantity::h_inv, 3.0) == 1.0);
  CHECK(timescale_eval(T, 0, ScaleQuantity::h, 1.0) == 3.0);
  CHECK(timescale_eval(T, 0, ScaleQuantity::h_prime, 1.0) == 4.0);
  CHECK_THROWS_AS(timescale_eval(T, 3, ScaleQuantity::h, 1.0), ModelError);
  for (double s : grid_0_10()) {
    CHECK(T.H(0, s) == Approx(2.0 * std::sqrt(s + 1.0)).epsilon(1e-14));
    CHECK(T.H_hat(0, s) == Approx(std::sqrt(s + 1.0) - 1.0).epsilon(1e-14));
  }
}

TEST_CASE("every scale kind is self-consistent") {
  check_scale_consistency(VertexScale::vrjp(), 1e-9);
  check_scale_consistency(VertexScale::vrjp(2.0), 1e-9);
  check_scale_consistency(VertexScale::identity(), 1e-9);
  check_scale_consistency(VertexScale::generic({[](double x) { return std::expm1(x); },
                                                [](double x) { return std::exp(x); },
                                                [](double s) { return std::log1p(s); },
                                                [](double s) { return std::log1p(s); }}),
                          1e-9);
  check_scale_consistency(VertexScale::numeric([](double x) { return x * x + 2 * x; }), 1e-5);
  check_scale_consistency(VertexScale::polynomial({0.0, 1.0, 0.5, 0.1}), 1e-5);
}

TEST_CASE("numeric scale reproduces the canonical one") {
  const auto num = VertexScale::numeric([](double x) { return x * x + 2 * x; });
  const auto ref = VertexScale::vrjp();
  for (double s : {0.0, 0.3, 3.0, 8.0, 50.0}) {
    CHECK(num.H_hat(s) == Approx(ref.H_hat(s)).epsilon(1e-8));
    CHECK(num.h_inv(s) == Approx(ref.h_inv(s)).epsilon(1e-9));
    CHECK(num.H(s) == Approx(ref.H(s)).epsilon(1e-6));
  }
}

TEST_CASE("H_hat inverts h exactly for every scale") {
  // d/dx H_hat(h(x)) = h'(x)/H(h(x)) = 1, so H_hat = h^{-1}
  for (const auto& s : {VertexScale::vrjp(), VertexScale::vrjp(0.5), VertexScale::identity()}) {
    for (double v : grid_0_10()) CHECK(s.H_hat(v) == Approx(s.h_inv(v)).epsilon(1e-14));
  }
}

TEST_CASE("vrjp rates over vrjp scale have constant ratio W/2") {
  const Graph g(3, {{0, 1, 0.7}, {1, 2, 1.9}, {0, 2, 1.3}});
  const auto F = RateFamily::vrjp(g);
  const TimeScale T = TimeScale::vrjp(3);
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    for (double x : grid_0_10()) CHECK(F.rate(i, j, x) / T.h_prime(j, x) == Approx(g.weight(id) / 2).epsilon(1e-15));
  }
}

TEST_CASE("scale construction errors") {
  CHECK_THROWS_AS(VertexScale::vrjp(0.0), ModelError);
  CHECK_THROWS_AS(VertexScale::polynomial({1.0, 1.0}), ModelError);
  CHECK_THROWS_AS(TimeScale({}), ModelError);
}

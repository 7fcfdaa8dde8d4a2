#include "vrjp/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrjp/parallel.hpp"

namespace vrjp {

namespace {

struct PairOutcome {
  double gap = 0.0;
  double hat_gap = 0.0;
  double product_gap = 0.0;
  bool nontrivial = false;
};

}  // namespace

ExchReport exchangeability_report(const Model& model, const ExchangeabilityOptions& opts) {
  if (opts.pairs == 0) throw ModelError("exchangeability report needs at least one pair");
  const Graph& g = model.graph();
  std::vector<PairOutcome> outcomes(opts.pairs);
  const std::size_t workers = opts.workers ? opts.workers : default_workers();
  parallel_blocks(opts.pairs, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      Rng rng = Rng::stream(opts.seed, p);
      const Trajectory x = simulate_with(g, model.rates, opts.start, opts.x_horizon, rng, opts.max_jumps);
      const Trajectory sigma = time_change(x, model.timescale, TimeChangeDirection::x_to_y);
      Trajectory tau = sigma;
      for (std::size_t r = 0; r < opts.rotations; ++r) tau = excursion_shuffle(tau, rng);
      const DensityBreakdown a = density_split(sigma, g, model.rates, model.timescale);
      const DensityBreakdown b = density_split(tau, g, model.rates, model.timescale);
      PairOutcome& out = outcomes[p];
      out.gap = std::abs(a.log_density() - b.log_density());
      out.hat_gap = std::abs(a.integral_hat - b.integral_hat);
      out.product_gap = std::abs(a.log_product - b.log_product);
      out.nontrivial = !(tau == sigma);
    }
  });

  ExchReport report;
  report.pairs_tested = opts.pairs;
  report.tolerance = opts.tolerance;
  for (std::size_t p = 0; p < outcomes.size(); ++p) {
    const PairOutcome& o = outcomes[p];
    if (o.nontrivial) ++report.nontrivial_pairs;
    if (o.gap > report.max_abs_log_gap || std::isnan(o.gap)) {
      report.max_abs_log_gap = std::isnan(o.gap) ? std::numeric_limits<double>::infinity() : o.gap;
      report.worst_pair = p;
    }
    report.max_hat_gap = std::max(report.max_hat_gap, o.hat_gap);
    report.max_product_gap = std::max(report.max_product_gap, o.product_gap);
  }
  report.passed = report.max_abs_log_gap <= opts.tolerance;
  return report;
}

// ---------------------------------------------------------------------------

bool strings_equivalent(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  return !a.empty() && a.size() == b.size() && a.front() == b.front() &&
         transition_counts(a) == transition_counts(b);
}

FreedmanReport freedman_check(const Model& model, double step, const std::vector<Vertex>& xi,
                              const std::vector<Vertex>& eta, std::size_t trials, std::uint64_t seed,
                              std::size_t workers) {
  if (!strings_equivalent(xi, eta)) throw ModelError("strings are not equivalent");
  if (xi.size() < 2) throw ModelError("strings need at least one step");
  if (trials < 10'000) throw ModelError("freedman check needs at least 10^4 trials");
  if (!(step > 0.0)) throw ModelError("grid step must be positive");
  const Graph& g = model.graph();
  const std::size_t l = xi.size() - 1;
  const double horizon = static_cast<double>(l) * step;

  if (workers == 0) workers = default_workers();
  struct Counts {
    std::size_t first = 0, second = 0, both = 0;
  };
  std::vector<Counts> counts(workers);
  parallel_blocks(trials, workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    Counts& c = counts[w];
    for (std::size_t trial = begin; trial < end; ++trial) {
      Rng rng = Rng::stream(seed, trial);
      const Trajectory y = simulate_y_with(g, model.rates, model.timescale, xi.front(), horizon, rng);
      bool match_first = true, match_second = true;
      for (std::size_t m = 0; m <= l && (match_first || match_second); ++m) {
        const Vertex v = y.state_at(std::min(static_cast<double>(m) * step, y.horizon()));
        match_first = match_first && v == xi[m];
        match_second = match_second && v == eta[m];
      }
      c.first += match_first;
      c.second += match_second;
      c.both += match_first && match_second;
    }
  });
  Counts total;
  for (const auto& c : counts) {
    total.first += c.first;
    total.second += c.second;
    total.both += c.both;
  }
  FreedmanReport report;
  report.step = step;
  report.first = McEstimate::from_hits(total.first, trials);
  report.second = McEstimate::from_hits(total.second, trials);
  const double n = static_cast<double>(trials);
  report.joint = static_cast<double>(total.both) / n;
  const double diff = report.first.estimate - report.second.estimate;
  const double var = report.first.estimate + report.second.estimate - 2.0 * report.joint - diff * diff;
  if (diff == 0.0) {
    report.z = 0.0;
  } else {
    report.z = var > 0.0 ? diff / std::sqrt(var / n) : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.5 * k);
  return grid;
}

LambdaReport lambda_estimate(const RateFamily& F, const TimeScale& T, const std::vector<double>& grid) {
  if (grid.empty()) throw ModelError("lambda estimate needs a nonempty grid");
  for (double x : grid) {
    if (!(x >= 0.0)) throw ModelError("lambda grid must be nonnegative");
  }
  const Graph& g = F.graph();
  LambdaReport report;
  report.lambda.resize(g.ordered_edge_count());
  std::vector<double> ratios(grid.size());
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double dh = T.h_prime(j, grid[k]);
      if (!(dh != 0.0) || !std::isfinite(dh)) throw ModelError("h' vanishes on the lambda grid");
      ratios[k] = F.rate(i, j, grid[k]) / dh;
    }
    // Mean taken relative to the first ratio, so a constant ratio is reproduced exactly.
    double shift = 0.0;
    for (double r : ratios) shift += r - ratios.front();
    const double lambda = ratios.front() + shift / static_cast<double>(ratios.size());
    report.lambda[id] = lambda;
    for (double r : ratios) {
      const double dev = std::abs(r - lambda) / std::abs(lambda);
      if (dev > report.max_rel_deviation) {
        report.max_rel_deviation = dev;
        report.worst_edge = std::pair(i, j);
      }
    }
  }
  return report;
}

LambdaReport reversibility_check(const Graph& g, const TimeScale& T, const std::vector<double>& lambda,
                                 const std::vector<double>& grid) {
  if (lambda.size() != g.ordered_edge_count()) throw ModelError("lambda must have one entry per ordered edge");
  if (grid.size() < 2) throw ModelError("reversibility fit needs at least two grid points");
  for (double l : lambda) {
    if (!(l > 0.0)) throw ModelError("lambda must be positive on every ordered edge");
  }
  const std::size_t n = g.vertex_count();
  LambdaReport report;
  report.lambda = lambda;
  report.A.resize(n);
  report.B.resize(n);
  report.h2_residual.resize(n);

  double mean_s = 0.0;
  for (double s : grid) mean_s += s;
  mean_s /= static_cast<double>(grid.size());
  double sxx = 0.0;
  for (double s : grid) sxx += (s - mean_s) * (s - mean_s);

  std::vector<double> y(grid.size());
  for (Vertex v = 0; v < n; ++v) {
    double mean_y = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double H = T.H(v, grid[k]);
      y[k] = H * H;
      mean_y += y[k];
      scale = std::max(scale, std::abs(y[k]));
    }
    mean_y /= static_cast<double>(grid.size());
    double sxy = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) sxy += (grid[k] - mean_s) * (y[k] - mean_y);
    const double slope = sxy / sxx;
    const double intercept = mean_y - slope * mean_s;
    double residual = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      residual = std::max(residual, std::abs(y[k] - (slope * grid[k] + intercept)));
    }
    const double H0 = T.H(v, 0.0);
    report.A[v] = slope;
    report.B[v] = H0 * H0;
    report.h2_residual[v] = residual / scale;
    if (report.h2_residual[v] > kLinearityTolerance) report.h2_linear = false;
    if (std::abs(slope) <= kLinearityTolerance * scale) report.degenerate = true;
  }

  report.worst_edge.reset();
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    const double back = lambda[g.require_edge_id(j, i)];
    const double gap = std::abs(lambda[id] * report.A[j] - back * report.A[i]);
    if (gap > report.reversibility_gap) {
      report.reversibility_gap = gap;
      report.worst_edge = std::pair(i, j);
    }
  }
  return report;
}

LambdaReport lambda_reversibility(const Model& model, const std::vector<double>& grid) {
  LambdaReport lam = lambda_estimate(model.rates, model.timescale, grid);
  LambdaReport rev = reversibility_check(model.graph(), model.timescale, lam.lambda, grid);
  rev.max_rel_deviation = lam.max_rel_deviation;
  if (!rev.worst_edge) rev.worst_edge = lam.worst_edge;
  return rev;
}

double lambda_form_log_product(const Trajectory& tr, const Graph& g, const std::vector<double>& lambda,
                               const TimeScale& T) {
  if (lambda.size() != g.ordered_edge_count()) throw ModelError("lambda must have one entry per ordered edge");
  tr.check_on(g);
  const auto& states = tr.states();
  double out = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) out += std::log(lambda[g.require_edge_id(states[k], states[k + 1])]);
  const auto S = final_local_times(tr, g.vertex_count());
  std::vector<bool> visited(g.vertex_count(), false);
  for (Vertex v : states) visited[v] = true;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (!visited[v]) continue;
    if (v != tr.start()) out += std::log(T.H(v, 0.0));
    if (v != tr.end_state()) out -= std::log(T.H(v, S[v]));
  }
  return out;
}

// ---------------------------------------------------------------------------

CanonicalForm canonicalize(const RateFamily& linear, const CanonicalOptions& opts) {
  if (linear.kind() != RateFamily::Kind::linear && linear.kind() != RateFamily::Kind::vrjp) {
    throw ModelError("canonicalize expects linear rates");
  }
  const Graph& g = linear.graph();
  const std::size_t n = g.vertex_count();
  const auto slope = [&](std::size_t id) { return linear.primary_parameter(id); };
  const auto offset = [&](std::size_t id) {
    return linear.kind() == RateFamily::Kind::vrjp ? linear.primary_parameter(id) : linear.offset_parameter(id);
  };

  // rho_j = W_{i,j} / D_{i,j} must not depend on the source i.
  std::vector<double> rho(n, 0.0);
  std::vector<bool> seen(n, false);
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    if (!(slope(id) > 0.0) || !(offset(id) > 0.0)) throw ModelError("canonicalize needs positive slopes and offsets");
    const Vertex j = g.edge_target(id);
    const double r = slope(id) / offset(id);
    if (!seen[j]) {
      rho[j] = r;
      seen[j] = true;
    } else if (std::abs(r - rho[j]) > opts.tolerance * std::max(r, rho[j])) {
      throw NotReducibleError("slope/offset ratio into vertex " + std::to_string(j) +
                              " depends on the source vertex");
    }
  }

  CanonicalForm out;
  out.scale.resize(n);
  for (Vertex j = 0; j < n; ++j) out.scale[j] = 1.0 / rho[j];
  out.weights.resize(g.ordered_edge_count());
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    out.weights[id] = out.scale[g.edge_source(id)] * offset(id);
  }
  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const std::size_t back = g.require_edge_id(g.edge_target(id), g.edge_source(id));
    const double gap = std::abs(out.weights[id] - out.weights[back]);
    out.max_asymmetry = std::max(out.max_asymmetry, gap / std::max(out.weights[id], out.weights[back]));
  }
  out.symmetric = out.max_asymmetry <= opts.tolerance;

  for (std::size_t id = 0; id < g.ordered_edge_count(); ++id) {
    const Vertex i = g.edge_source(id), j = g.edge_target(id);
    for (double x : default_grid()) {
      const double rescaled = out.scale[i] * linear.rate(i, j, out.scale[j] * x);
      const double target = out.weights[id] * (1.0 + x);
      out.rescaled_rate_error = std::max(out.rescaled_rate_error, std::abs(rescaled - target) / target);
    }
  }

  if (out.symmetric) {
    std::vector<WeightedEdge> edges;
    for (const auto& e : g.edges()) edges.push_back({e.a, e.b, out.weights[g.require_edge_id(e.a, e.b)]});
    out.vrjp_graph = Graph(n, std::move(edges));
  }

  if (opts.pairs > 0) {
    ExchangeabilityOptions eo;
    eo.pairs = opts.pairs;
    eo.seed = opts.seed;
    eo.tolerance = opts.tolerance;
    out.linear_exchangeability =
        exchangeability_report(Model{linear, TimeScale::scaled_vrjp(out.scale)}, eo);
    if (out.vrjp_graph) {
      out.vrjp_exchangeability =
          exchangeability_report(Model{RateFamily::vrjp(*out.vrjp_graph), TimeScale::vrjp(n)}, eo);
    }
  }

  out.valid = out.symmetric && out.rescaled_rate_error <= opts.tolerance &&
              (!out.linear_exchangeability || out.linear_exchangeability->passed) &&
              (!out.vrjp_exchangeability || out.vrjp_exchangeability->passed);
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(CheckKind c) {
  switch (c) {
    case CheckKind::exchangeability: return "exchangeability";
    case CheckKind::lambda: return "lambda";
    case CheckKind::reversibility: return "reversibility";
  }
  return "unknown";
}

std::vector<BatteryModel> counterexample_battery(const Graph& g) {
  const std::size_t n = g.vertex_count();
  const auto one = [](Vertex, Vertex) { return 1.0; };
  const auto lopsided = [](Vertex i, Vertex j) { return i < j ? 1.0 : 2.0; };
  std::vector<BatteryModel> out;
  out.push_back({"quadratic_rates_vrjp_scale", Model{RateFamily::power(g, one, 2.0), TimeScale::vrjp(n)},
                 CheckKind::lambda});
  out.push_back({"vrjp_rates_identity_scale", Model{RateFamily::vrjp(g), TimeScale::identity(n)},
                 CheckKind::exchangeability});
  out.push_back({"asymmetric_linear_vrjp_scale", Model{RateFamily::linear(g, lopsided, lopsided), TimeScale::vrjp(n)},
                 CheckKind::reversibility});
  return out;
}

}  // namespace vrjp

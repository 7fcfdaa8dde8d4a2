#ifndef VRJP_CHARACTERIZATION_HPP
#define VRJP_CHARACTERIZATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vrjp/density.hpp"
#include "vrjp/dynamics.hpp"
#include "vrjp/simulator.hpp"
#include "vrjp/trajectory.hpp"

namespace vrjp {

// ----- exchangeability in density -----------------------------------------

struct ExchangeabilityOptions {
  std::size_t pairs = 1000;
  std::uint64_t seed = 0;
  Vertex start = 0;
  /// X-clock horizon of the simulated paths.
  double x_horizon = 3.0;
  /// Excursion moves applied to build each partner.
  std::size_t rotations = 4;
  double tolerance = 1e-9;
  std::size_t max_jumps = kDefaultMaxJumps;
  std::size_t workers = 0;
};

struct ExchReport {
  std::size_t pairs_tested = 0;
  /// Pairs whose partner differs from the original path.
  std::size_t nontrivial_pairs = 0;
  double max_abs_log_gap = 0.0;
  std::size_t worst_pair = 0;
  /// Largest |int hat(sigma) - int hat(tau)| and |log prod sigma - log prod tau|.
  double max_hat_gap = 0.0;
  double max_product_gap = 0.0;
  double tolerance = 0.0;
  bool passed = true;
};

/**
 * Simulates X paths, maps them to the Y clock, builds an equivalent
 * partner by excursion moves and compares the two Y log densities.
 * Pair k is driven by Rng::stream(seed, k).
 */
ExchReport exchangeability_report(const Model& model, const ExchangeabilityOptions& opts);

// ----- discretized (Freedman) check ---------------------------------------

struct FreedmanReport {
  double step = 0.0;
  McEstimate first;
  McEstimate second;
  /// Empirical P(both strings), nonzero only if they coincide.
  double joint = 0.0;
  double z = 0.0;
};

/// Strings of equal length with the same start and transition counts.
bool strings_equivalent(const std::vector<Vertex>& a, const std::vector<Vertex>& b);

/**
 * Monte Carlo estimates of P(Y_0 = xi_0, ..., Y_{lh} = xi_l) for both
 * strings from the same Y paths, and the z-score of their difference.
 * Requires trials >= 10^4.
 */
FreedmanReport freedman_check(const Model& model, double step, const std::vector<Vertex>& xi,
                              const std::vector<Vertex>& eta, std::size_t trials, std::uint64_t seed,
                              std::size_t workers = 0);

// ----- rate / time-scale analytics ------------------------------------------

/// Per-ordered-edge proportionality f_{i,j} = lambda_{i,j} h_j' and the per-vertex fit H_i^2 = A_i s + B_i.
struct LambdaReport {
  std::vector<double> lambda;
  double max_rel_deviation = 0.0;
  std::vector<double> A;
  std::vector<double> B;
  /// Max residual of the least-squares line through H_i^2, relative to max(1, max H_i^2).
  std::vector<double> h2_residual;
  bool h2_linear = true;
  /// A_i ~ 0 for some vertex: the proportional weights lambda A / 2 vanish.
  bool degenerate = false;
  double reversibility_gap = 0.0;
  std::optional<std::pair<Vertex, Vertex>> worst_edge;
};

/// The default evaluation grid {0, 0.5, ..., 10}.
std::vector<double> default_grid();

/// lambda_{i,j} = mean over the grid of f_{i,j}(x) / h_j'(x) and the largest relative spread.
LambdaReport lambda_estimate(const RateFamily& F, const TimeScale& T, const std::vector<double>& grid);

inline constexpr double kLinearityTolerance = 1e-6;

/// Fills A, B, h2_residual and reversibility_gap = max |lambda_ij A_j - lambda_ji A_i|.
LambdaReport reversibility_check(const Graph& g, const TimeScale& T, const std::vector<double>& lambda,
                                 const std::vector<double>& grid = default_grid());

/// lambda_estimate followed by reversibility_check on the same grid.
LambdaReport lambda_reversibility(const Model& model, const std::vector<double>& grid = default_grid());

/**
 * Product part of the Y density rewritten for rates of the form
 * f_{i,j} = lambda_{i,j} h_j':
 *
 *   sum_k log lambda_{i_{k-1} i_k} + sum_{v visited, v != i_0} log H_v(0)
 *     - sum_{v visited, v != i_n} log H_v(S_v)
 *
 * which depends only on transition counts and final local times.
 */
double lambda_form_log_product(const Trajectory& tr, const Graph& g, const std::vector<double>& lambda,
                               const TimeScale& T);

// ----- canonical VRJP form of linear rates --------------------------------

class NotReducibleError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct CanonicalOptions {
  double tolerance = 1e-9;
  /// Pairs for the exchangeability confirmation; zero skips it.
  std::size_t pairs = 200;
  std::uint64_t seed = 0;
};

struct CanonicalForm {
  /// Per-vertex rescaling c_j = D_{i,j} / W_{i,j}.
  std::vector<double> scale;
  /// Per-ordered-edge weights W_hat_{i,j} = c_i D_{i,j}.
  std::vector<double> weights;
  bool symmetric = true;
  double max_asymmetry = 0.0;
  /// max |c_i f_{i,j}(c_j x) - W_hat_{i,j} (1 + x)| / W_hat_{i,j}(1 + x) over the default grid.
  double rescaled_rate_error = 0.0;
  /// The linear rates under the time scale h_j(x) = x^2 / c_j + 2x.
  std::optional<ExchReport> linear_exchangeability;
  /// VRJP with weights W_hat under the canonical scale (symmetric case only).
  std::optional<ExchReport> vrjp_exchangeability;
  /// Graph carrying W_hat as edge weights (symmetric case only).
  std::optional<Graph> vrjp_graph;
  bool valid = true;
};

/// Reduces linear rates W_{i,j} x + D_{i,j} to a VRJP by per-vertex time rescaling.
CanonicalForm canonicalize(const RateFamily& linear, const CanonicalOptions& opts = {});

// ----- fixed counterexample battery ---------------------------------------

enum class CheckKind { exchangeability, lambda, reversibility };

std::string to_string(CheckKind c);

struct BatteryModel {
  std::string name;
  Model model;
  CheckKind designated;
};

/// f = 1 + x^2 with the VRJP scale, VRJP rates with the identity scale, and asymmetric linear rates.
std::vector<BatteryModel> counterexample_battery(const Graph& g);

}  // namespace vrjp

#endif  // VRJP_CHARACTERIZATION_HPP

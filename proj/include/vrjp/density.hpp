#ifndef VRJP_DENSITY_HPP
#define VRJP_DENSITY_HPP

#include "vrjp/dynamics.hpp"
#include "vrjp/graph.hpp"
#include "vrjp/trajectory.hpp"

namespace vrjp {

/**
 * Log density split into its product part and the two pieces of the
 * exponent: integral_tilde collects neighbours the path visits,
 * integral_hat neighbours it never visits.
 *
 * Densities are with respect to Lebesgue measure on the jump times.
 */
struct DensityBreakdown {
  double log_product = 0.0;
  double integral_tilde = 0.0;
  double integral_hat = 0.0;

  double log_density() const { return log_product - integral_tilde - integral_hat; }
};

/// log d of an X-clock path: rates are constant on each holding interval.
double log_density_x(const Trajectory& tr, const Graph& g, const RateFamily& F);

/**
 * Log density of a Y-clock path under Y = X o D^{-1}.
 *
 * On a visit to i over [s_{k-1}, s_k] each neighbour j contributes
 * f_{i,j}(h_j^{-1}(S_j)) (H_hat_i(S_i(s_k)) - H_hat_i(S_i(s_{k-1}))) to the
 * exponent, and each jump i -> j contributes
 * f_{i,j}(h_j^{-1}(S_j)) / H_i(S_i(s_k)) to the product.
 */
DensityBreakdown log_density_y(const Trajectory& tr, const Graph& g, const RateFamily& F, const TimeScale& T);

/**
 * Closed form for VRJP rates W (taken from the graph weights) under the
 * canonical scale h(x) = x^2 + 2x:
 *
 *   n log(1/2) + sum_k log W_{i_{k-1} i_k} - sum_{i != i_n} log(1 + S_i) / 2
 *     - sum_{ordered i ~ j} W_{ij} / 2 (sqrt((1 + S_i)(1 + S_j)) - 1)
 *
 * with S the final local times.  Depends on the path only through the
 * transition counts and the final local times.
 */
double log_density_vrjp(const Trajectory& tr, const Graph& g);

/// As log_density_y, with integral_hat from its closed form in the final local times.
DensityBreakdown density_split(const Trajectory& tr, const Graph& g, const RateFamily& F, const TimeScale& T);

/// sum_k log h'_{i_{k-1}}(l_{i_{k-1}}(t_k)): the left derivative of D at each jump time.
double log_time_change_jacobian(const Trajectory& x_path, const TimeScale& T);

}  // namespace vrjp

#endif  // VRJP_DENSITY_HPP

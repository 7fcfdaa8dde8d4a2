#ifndef VRJP_DYNAMICS_HPP
#define VRJP_DYNAMICS_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vrjp/graph.hpp"

namespace vrjp {

/// Per-ordered-edge parameter supplier used by the rate factories.
using EdgeParam = std::function<double(Vertex from, Vertex to)>;

/**
 * Jump-rate functions f_{i,j} of the target's local time, one per ordered
 * pair of adjacent vertices of a fixed graph.
 *
 *   vrjp       f(x) = W_{ij} (1 + x)          W from the graph weights
 *   linear     f(x) = a_{ij} x + b_{ij}
 *   constant   f(x) = c_{ij}
 *   power      f(x) = a_{ij} (1 + x^p)
 *   tabulated  f(x) = a_{ij} * table(x)       piecewise linear, flat outside the grid
 */
class RateFamily {
 public:
  enum class Kind { vrjp, linear, constant, power, tabulated };

  static RateFamily vrjp(const Graph& g);
  static RateFamily linear(const Graph& g, const EdgeParam& slope, const EdgeParam& offset);
  static RateFamily constant(const Graph& g, const EdgeParam& rate);
  static RateFamily power(const Graph& g, const EdgeParam& scale, double exponent);
  static RateFamily tabulated(const Graph& g, std::vector<double> xs, std::vector<double> values,
                              const EdgeParam& scale = {});

  Kind kind() const { return kind_; }
  const Graph& graph() const { return graph_; }

  /// f_{i,j}(x).  Throws ModelError for non-adjacent pairs, x < 0, or a non-positive value.
  double rate(Vertex i, Vertex j, double x) const;

  /// f evaluated by ordered-edge id; no range checks beyond x >= 0.
  double rate_by_id(std::size_t edge_id, double x) const {
    const double a = a_[edge_id];
    switch (kind_) {
      case Kind::vrjp: return a * (1.0 + x);
      case Kind::linear: return a * x + b_[edge_id];
      case Kind::constant: return a;
      case Kind::power: return a * (1.0 + std::pow(x, exponent_));
      case Kind::tabulated: return a * table(x);
    }
    return 0.0;
  }

  /// First parameter per ordered edge (W, slope, rate, or scale depending on kind).
  double primary_parameter(std::size_t edge_id) const { return a_[edge_id]; }
  /// Offset of the linear kind; zero otherwise.
  double offset_parameter(std::size_t edge_id) const { return b_.empty() ? 0.0 : b_[edge_id]; }
  double exponent() const { return exponent_; }
  const std::vector<double>& table_xs() const { return xs_; }
  const std::vector<double>& table_values() const { return ys_; }

 private:
  RateFamily(Kind kind, const Graph& g) : kind_(kind), graph_(g) {}
  double table(double x) const;

  Kind kind_;
  Graph graph_;
  std::vector<double> a_;
  std::vector<double> b_;
  double exponent_ = 1.0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

std::string to_string(RateFamily::Kind kind);

/// User-supplied closed forms for a generic time scale.  H_hat may be left
/// empty, in which case it is obtained by quadrature of 1/H.
struct ScaleFunctions {
  std::function<double(double)> h;
  std::function<double(double)> h_prime;
  std::function<double(double)> h_inv;
  std::function<double(double)> H_hat;
};

enum class ScaleQuantity { h, h_prime, h_inv, H, H_hat };

/**
 * Time scale of a single vertex: an increasing C^1 bijection h of [0, inf)
 * with h(0) = 0 and h' > 0, together with h', h^{-1}, H = h' o h^{-1} and
 * the primitive H_hat of 1/H vanishing at 0.
 *
 * Kinds:
 *   vrjp      h(x) = x^2/c + 2x  (c = 1 is the canonical scale x^2 + 2x)
 *   identity  h(x) = x
 *   generic   closed forms supplied by the caller
 *   numeric   h only; h' by finite differences, h^{-1} by bisection and
 *             H_hat by adaptive Simpson quadrature of 1/H
 */
class VertexScale {
 public:
  enum class Kind { vrjp, identity, generic, numeric };

  static VertexScale vrjp(double c = 1.0);
  static VertexScale identity();
  static VertexScale generic(ScaleFunctions fns);
  static VertexScale numeric(std::function<double(double)> h);
  /// Numeric scale with h(x) = sum_k coeffs[k] x^k.
  static VertexScale polynomial(std::vector<double> coeffs);

  Kind kind() const { return kind_; }
  double vrjp_scale() const { return c_; }
  const std::vector<double>& polynomial_coefficients() const { return coeffs_; }

  double h(double x) const;
  double h_prime(double x) const;
  double h_inv(double s) const;
  double H(double s) const;
  double H_hat(double s) const;
  double eval(ScaleQuantity which, double x) const;

 private:
  explicit VertexScale(Kind kind) : kind_(kind) {}

  Kind kind_;
  double c_ = 1.0;
  std::shared_ptr<const ScaleFunctions> fns_;
  std::vector<double> coeffs_;
};

/// Per-vertex time scales; D(s) = sum_i h_i(l_i(s)).
class TimeScale {
 public:
  explicit TimeScale(std::vector<VertexScale> per_vertex);

  static TimeScale vrjp(std::size_t n);
  static TimeScale scaled_vrjp(const std::vector<double>& c);
  static TimeScale identity(std::size_t n);
  static TimeScale generic(std::size_t n, const ScaleFunctions& fns);
  static TimeScale numeric(std::size_t n, const std::function<double(double)>& h);
  static TimeScale polynomial(std::size_t n, const std::vector<double>& coeffs);

  std::size_t vertex_count() const { return scales_.size(); }
  const VertexScale& at(Vertex v) const;

  double h(Vertex v, double x) const { return at(v).h(x); }
  double h_prime(Vertex v, double x) const { return at(v).h_prime(x); }
  double h_inv(Vertex v, double s) const { return at(v).h_inv(s); }
  double H(Vertex v, double s) const { return at(v).H(s); }
  double H_hat(Vertex v, double s) const { return at(v).H_hat(s); }

 private:
  std::vector<VertexScale> scales_;
};

/// A rate family paired with the time scale under which it is examined.
struct Model {
  RateFamily rates;
  TimeScale timescale;

  const Graph& graph() const { return rates.graph(); }
};

/// timescale_eval: one of h, h', h^{-1}, H, H_hat at vertex v.
double timescale_eval(const TimeScale& T, Vertex v, ScaleQuantity which, double x);

/// rate_eval: f_{i,j}(x).
inline double rate_eval(const RateFamily& F, Vertex i, Vertex j, double x) { return F.rate(i, j, x); }

}  // namespace vrjp

#endif  // VRJP_DYNAMICS_HPP

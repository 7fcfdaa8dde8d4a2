#include "vrjp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrjp {

namespace {

void require_finite_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ModelError(std::string(what) + " must be finite and positive");
}

void require_domain(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw ModelError("evaluation point " + std::to_string(x) + " outside [0, inf)");
  }
}

std::vector<double> per_edge(const Graph& g, const EdgeParam& p) {
  std::vector<double> out(g.ordered_edge_count());
  for (std::size_t id = 0; id < out.size(); ++id) out[id] = p(g.edge_source(id), g.edge_target(id));
  return out;
}

// Adaptive Simpson, absolute error target derived from a relative one.
double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                    double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw ModelError("numeric time scale: quadrature did not converge");
  if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double eps = rel_tol * std::max(std::abs(whole), std::numeric_limits<double>::min());
  return simpson_step(f, a, b, fa, fm, fb, whole, eps, 50);
}

constexpr double kBisectionTol = 1e-12;
constexpr double kQuadratureRelTol = 1e-10;

}  // namespace

std::string to_string(RateFamily::Kind kind) {
  switch (kind) {
    case RateFamily::Kind::vrjp: return "vrjp";
    case RateFamily::Kind::linear: return "linear";
    case RateFamily::Kind::constant: return "constant";
    case RateFamily::Kind::power: return "power";
    case RateFamily::Kind::tabulated: return "tabulated";
  }
  return "unknown";
}

RateFamily RateFamily::vrjp(const Graph& g) {
  RateFamily f(Kind::vrjp, g);
  f.a_.resize(g.ordered_edge_count());
  for (std::size_t id = 0; id < f.a_.size(); ++id) f.a_[id] = g.weight(id);
  return f;
}

RateFamily RateFamily::linear(const Graph& g, const EdgeParam& slope, const EdgeParam& offset) {
  RateFamily f(Kind::linear, g);
  f.a_ = per_edge(g, slope);
  f.b_ = per_edge(g, offset);
  for (std::size_t id = 0; id < f.a_.size(); ++id) {
    if (!(f.a_[id] >= 0.0) || !std::isfinite(f.a_[id])) throw ModelError("linear slopes must be nonnegative");
    require_finite_positive(f.b_[id], "linear offset");
  }
  return f;
}

RateFamily RateFamily::constant(const Graph& g, const EdgeParam& rate) {
  RateFamily f(Kind::constant, g);
  f.a_ = per_edge(g, rate);
  for (double a : f.a_) require_finite_positive(a, "constant rate");
  return f;
}

RateFamily RateFamily::power(const Graph& g, const EdgeParam& scale, double exponent) {
  RateFamily f(Kind::power, g);
  f.a_ = per_edge(g, scale);
  for (double a : f.a_) require_finite_positive(a, "power scale");
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) throw ModelError("power exponent must be nonnegative");
  f.exponent_ = exponent;
  return f;
}

RateFamily RateFamily::tabulated(const Graph& g, std::vector<double> xs, std::vector<double> values,
                                 const EdgeParam& scale) {
  if (xs.empty() || xs.size() != values.size()) {
    throw ModelError("tabulated rates need matching, nonempty grid and value lists");
  }
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) throw ModelError("tabulated grid must be strictly increasing");
  }
  for (double v : values) require_finite_positive(v, "tabulated rate value");
  RateFamily f(Kind::tabulated, g);
  f.a_ = scale ? per_edge(g, scale) : std::vector<double>(g.ordered_edge_count(), 1.0);
  for (double a : f.a_) require_finite_positive(a, "tabulated scale");
  f.xs_ = std::move(xs);
  f.ys_ = std::move(values);
  return f;
}

double RateFamily::table(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  const double w = (x - xs_[k - 1]) / (xs_[k] - xs_[k - 1]);
  return (1.0 - w) * ys_[k - 1] + w * ys_[k];
}

double RateFamily::rate(Vertex i, Vertex j, double x) const {
  const std::size_t id = graph_.require_edge_id(i, j);
  require_domain(x);
  const double r = rate_by_id(id, x);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw ModelError("rate f_{" + std::to_string(i) + "," + std::to_string(j) + "}(" + std::to_string(x) +
                     ") is not a finite positive number");
  }
  return r;
}

// ---------------------------------------------------------------------------

VertexScale VertexScale::vrjp(double c) {
  require_finite_positive(c, "vrjp time-scale factor");
  VertexScale s(Kind::vrjp);
  s.c_ = c;
  return s;
}

VertexScale VertexScale::identity() { return VertexScale(Kind::identity); }

VertexScale VertexScale::generic(ScaleFunctions fns) {
  if (!fns.h || !fns.h_prime || !fns.h_inv) throw ModelError("generic time scale needs h, h' and h^{-1}");
  VertexScale s(Kind::generic);
  s.fns_ = std::make_shared<const ScaleFunctions>(std::move(fns));
  return s;
}

VertexScale VertexScale::numeric(std::function<double(double)> h) {
  if (!h) throw ModelError("numeric time scale needs h");
  VertexScale s(Kind::numeric);
  ScaleFunctions fns;
  fns.h = std::move(h);
  s.fns_ = std::make_shared<const ScaleFunctions>(std::move(fns));
  return s;
}

VertexScale VertexScale::polynomial(std::vector<double> coeffs) {
  if (coeffs.size() < 2 || coeffs[0] != 0.0) throw ModelError("polynomial time scale needs h(0) = 0 and degree >= 1");
  if (!(coeffs[1] > 0.0)) throw ModelError("polynomial time scale needs h'(0) > 0");
  for (double c : coeffs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ModelError("polynomial time-scale coefficients must be nonnegative");
  }
  auto h = [coeffs](double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  VertexScale s = numeric(h);
  s.coeffs_ = std::move(coeffs);
  return s;
}

double VertexScale::h(double x) const {
  require_domain(x);
  switch (kind_) {
    case Kind::vrjp: return x * x / c_ + 2.0 * x;
    case Kind::identity: return x;
    case Kind::generic:
    case Kind::numeric: return fns_->h(x);
  }
  return 0.0;
}

double VertexScale::h_prime(double x) const {
  require_domain(x);
  switch (kind_) {
    case Kind::vrjp: return 2.0 * (1.0 + x / c_);
    case Kind::identity: return 1.0;
    case Kind::generic: return fns_->h_prime(x);
    case Kind::numeric: {
      const auto& f = fns_->h;
      const double step = 1e-5 * std::max(1.0, x);
      if (x >= step) return (f(x + step) - f(x - step)) / (2.0 * step);
      return (-3.0 * f(x) + 4.0 * f(x + step) - f(x + 2.0 * step)) / (2.0 * step);
    }
  }
  return 0.0;
}

double VertexScale::h_inv(double s) const {
  require_domain(s);
  switch (kind_) {
    case Kind::vrjp: return s / (std::sqrt(s / c_ + 1.0) + 1.0);
    case Kind::identity: return s;
    case Kind::generic: return fns_->h_inv(s);
    case Kind::numeric: {
      const auto& f = fns_->h;
      double lo = 0.0, hi = 1.0;
      while (f(hi) < s) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi) || hi > 1e300) throw ModelError("numeric time scale: h^{-1} bracket diverged");
      }
      for (int it = 0; it < 400; ++it) {
        const double tol = std::max(kBisectionTol, 4.0 * std::numeric_limits<double>::epsilon() * hi);
        if (hi - lo <= tol) return 0.5 * (lo + hi);
        const double mid = 0.5 * (lo + hi);
        (f(mid) < s ? lo : hi) = mid;
      }
      throw ModelError("numeric time scale: bisection did not converge");
    }
  }
  return 0.0;
}

double VertexScale::H(double s) const {
  require_domain(s);
  switch (kind_) {
    case Kind::vrjp: return 2.0 * std::sqrt(s / c_ + 1.0);
    case Kind::identity: return 1.0;
    default: return h_prime(h_inv(s));
  }
}

double VertexScale::H_hat(double s) const {
  require_domain(s);
  switch (kind_) {
    case Kind::vrjp: return s / (std::sqrt(s / c_ + 1.0) + 1.0);
    case Kind::identity: return s;
    case Kind::generic:
      if (fns_->H_hat) return fns_->H_hat(s);
      [[fallthrough]];
    case Kind::numeric:
      return adaptive_simpson([this](double u) { return 1.0 / H(u); }, 0.0, s, kQuadratureRelTol);
  }
  return 0.0;
}

double VertexScale::eval(ScaleQuantity which, double x) const {
  switch (which) {
    case ScaleQuantity::h: return h(x);
    case ScaleQuantity::h_prime: return h_prime(x);
    case ScaleQuantity::h_inv: return h_inv(x);
    case ScaleQuantity::H: return H(x);
    case ScaleQuantity::H_hat: return H_hat(x);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

TimeScale::TimeScale(std::vector<VertexScale> per_vertex) : scales_(std::move(per_vertex)) {
  if (scales_.empty()) throw ModelError("time scale needs at least one vertex");
}

TimeScale TimeScale::vrjp(std::size_t n) { return TimeScale(std::vector<VertexScale>(n, VertexScale::vrjp())); }

TimeScale TimeScale::scaled_vrjp(const std::vector<double>& c) {
  std::vector<VertexScale> v;
  v.reserve(c.size());
  for (double ci : c) v.push_back(VertexScale::vrjp(ci));
  return TimeScale(std::move(v));
}

TimeScale TimeScale::identity(std::size_t n) {
  return TimeScale(std::vector<VertexScale>(n, VertexScale::identity()));
}

TimeScale TimeScale::generic(std::size_t n, const ScaleFunctions& fns) {
  return TimeScale(std::vector<VertexScale>(n, VertexScale::generic(fns)));
}

TimeScale TimeScale::numeric(std::size_t n, const std::function<double(double)>& h) {
  return TimeScale(std::vector<VertexScale>(n, VertexScale::numeric(h)));
}

TimeScale TimeScale::polynomial(std::size_t n, const std::vector<double>& coeffs) {
  return TimeScale(std::vector<VertexScale>(n, VertexScale::polynomial(coeffs)));
}

const VertexScale& TimeScale::at(Vertex v) const {
  if (v >= scales_.size()) throw ModelError("time scale has no vertex " + std::to_string(v));
  return scales_[v];
}

double timescale_eval(const TimeScale& T, Vertex v, ScaleQuantity which, double x) {
  return T.at(v).eval(which, x);
}

}  // namespace vrjp

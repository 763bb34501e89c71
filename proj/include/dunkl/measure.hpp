#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "dunkl/errors.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

/// Gauss-Jacobi rule on [-1,1] for the weight (1-x)^a (1+x)^b, a, b > -1.
struct JacobiRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached; the returned reference stays valid for the life of the program.
const JacobiRule& gauss_jacobi(int n, double a, double b);

struct Domain {
  enum class Kind { Box, Ball, Annulus, Sphere };
  Kind kind = Kind::Box;
  double lo = 0.0;  // annulus inner radius
  double hi = 1.0;  // box half-width, ball radius, annulus outer radius

  static Domain box(double half_width) { return {Kind::Box, 0.0, half_width}; }
  static Domain ball(double r) { return {Kind::Ball, 0.0, r}; }
  static Domain annulus(double lo, double hi) { return {Kind::Annulus, lo, hi}; }
  static Domain sphere() { return {Kind::Sphere, 0.0, 1.0}; }
};

std::string to_string(const Domain& d);

/// Nodes and weights. `weights` are Lebesgue weights; `mu_weights` are the
/// same weights multiplied by w_k(node), computed so that the singular factor
/// of the weight is absorbed analytically by the Jacobi rules. For the sphere
/// the weights refer to surface measure.
struct QuadratureRule {
  Domain domain;
  int order = 0;
  int dimension = 0;
  std::vector<double> nodes;  // row-major, size() x dimension
  std::vector<double> weights;
  std::vector<double> mu_weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> node(std::size_t i) const {
    return {nodes.data() + i * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
};

/// Weight context plus the constants of mu_k.
class MeasureContext {
 public:
  explicit MeasureContext(WeightContext weights);

  const WeightContext& weights() const { return weights_; }
  int dimension() const { return weights_.dimension(); }
  double gamma() const { return weights_.gamma(); }
  /// 2 gamma + d.
  double homogeneous_dimension() const { return weights_.homogeneous_dimension(); }
  /// c_k = (int e^{-|y|^2/2} dmu_k)^{-1}.
  double mehta_constant() const { return mehta_; }
  /// int_{S^{d-1}} w_k(omega) d omega.
  double angular_constant() const { return angular_; }
  /// True when both constants come from closed forms (product systems).
  bool closed_form() const { return closed_form_; }

 private:
  WeightContext weights_;
  double mehta_ = 0.0;
  double angular_ = 0.0;
  bool closed_form_ = false;
};

/// One coordinate axis [-half, half] split at 0 into two Gauss-Jacobi halves
/// absorbing the factor 2^k |t|^{2k}; nodes ascending, 2*order of them.
struct AxisNode {
  double t;
  double weight;     // Lebesgue
  double mu_weight;  // includes 2^k |t|^{2k}
};
std::vector<AxisNode> axis_rule(double half, double k, int order);

/// Gauss-Legendre nodes on [lo, hi] carrying the factor 2^k |t|^{2k}
/// explicitly (for intervals away from 0).
std::vector<AxisNode> axis_panel(double lo, double hi, double k, int order);

/// Extra breakpoint for circle_nodes: the arc rule gets Jacobi endpoint
/// exponent `exponent` there (on top of the weight's own), and the returned
/// weights are divided by the matching factor, so the caller's integrand is
/// expected to vanish like |theta - angle|^exponent.
struct ArcBreak {
  double angle;
  double exponent;
};

/// Quadrature on the unit circle for a d = 2 weight context; AxisNode::t is
/// the angle. Arcs end at reflecting lines and at the extra breakpoints and
/// never exceed pi/2.
std::vector<AxisNode> circle_nodes(const WeightContext& w, int order, const std::vector<ArcBreak>& extra = {});

/// `order` is the number of Gauss nodes per one-dimensional piece (half axis,
/// arc, radial interval).
QuadratureRule build_rule(const MeasureContext& ctx, const Domain& domain, int order);

/// Rule for the unit sphere S^{d-1}, arcs split at the reflecting hyperplanes.
QuadratureRule sphere_rule(const MeasureContext& ctx, int order);

namespace detail {

template <class T>
T pairwise_sum(const T* v, std::size_t n) {
  if (n <= 16) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

std::string describe_node(std::span<const double> y);

}  // namespace detail

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return v.empty() ? T{} : detail::pairwise_sum(v.data(), v.size());
}

/// sum_i mu_weight_i f(node_i) with a pairwise (order-fixed) reduction.
/// f may return double or std::complex<double>.
template <class F>
auto integrate(const QuadratureRule& rule, F&& f) {
  using T = std::decay_t<decltype(f(rule.node(0)))>;
  std::vector<T> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const T v = f(rule.node(i));
    if (!detail::finite_value(v))
      throw EvaluationError("integrand is not finite at node " + detail::describe_node(rule.node(i)));
    terms[i] = rule.mu_weights[i] * v;
  }
  return pairwise_sum(terms);
}

/// mu_k(B(0,r)) = r^{2gamma+d} / (c_k 2^{gamma+d/2} Gamma(gamma+d/2+1)).
double ball_volume(const MeasureContext& ctx, double r);

/// int_{lo<|y|<hi} |y|^beta dmu_k(y); hi may be +infinity.
double power_integral(const MeasureContext& ctx, double beta, double lo, double hi);

/// Mehta constant recomputed by quadrature of e^{-|y|^2/2} (tensor box rule
/// on [-12,12]^d for product systems, polar rule otherwise).
double mehta_constant_quadrature(const MeasureContext& ctx, int order = 80);

/// Closed-form product 1/c_k = prod_j 2^{2k_j+1/2} Gamma(k_j+1/2) for product systems.
double mehta_product_closed_form(const std::vector<double>& axis_k);

}  // namespace dunkl

#include "dunkl/measure.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "dunkl/specfun.hpp"

namespace dunkl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMehtaBox = 12.0;

using Node1D = AxisNode;

// Orthonormal Jacobi polynomials p_0..p_n at x, from the recurrence
// sqrt(b_{j+1}) p_{j+1} = (x - a_j) p_j - sqrt(b_j) p_{j-1}.
void jacobi_orthonormal(double x, const std::vector<double>& alpha, const std::vector<double>& sb,
                        double p0, int n, std::vector<double>& p, double& dp_n) {
  p.assign(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> dp(static_cast<std::size_t>(n + 1), 0.0);
  p[0] = p0;
  for (int j = 0; j < n; ++j) {
    const auto u = static_cast<std::size_t>(j);
    const double prev = j > 0 ? p[u - 1] : 0.0;
    const double dprev = j > 0 ? dp[u - 1] : 0.0;
    const double back = j > 0 ? sb[u] : 0.0;
    p[u + 1] = ((x - alpha[u]) * p[u] - back * prev) / sb[u + 1];
    dp[u + 1] = (p[u] + (x - alpha[u]) * dp[u] - back * dprev) / sb[u + 1];
  }
  dp_n = dp[static_cast<std::size_t>(n)];
}

JacobiRule compute_gauss_jacobi(int n, double a, double b) {
  // Monic recurrence coefficients; sb[j] = sqrt(beta_j), sb[0] unused.
  std::vector<double> alpha(static_cast<std::size_t>(n + 1)), sb(static_cast<std::size_t>(n + 1), 0.0);
  const double ab = a + b;
  for (int j = 0; j <= n; ++j) {
    const double s = 2.0 * j + ab;
    alpha[static_cast<std::size_t>(j)] =
        j == 0 ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (j >= 1) {
      double beta = 4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0));
      if (j == 1 && std::abs(ab + 1.0) < 1e-300) beta = 2.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
      sb[static_cast<std::size_t>(j)] = std::sqrt(beta);
    }
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + specfun::log_gamma(a + 1.0) +
                              specfun::log_gamma(b + 1.0) - specfun::log_gamma(ab + 2.0));

  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int j = 0; j < n; ++j) diag(j) = alpha[static_cast<std::size_t>(j)];
  for (int j = 0; j + 1 < n; ++j) sub(j) = sb[static_cast<std::size_t>(j + 1)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw AccuracyError("gauss_jacobi: eigenvalue solver failed");

  JacobiRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double p0 = 1.0 / std::sqrt(mu0);
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double dpn = 0.0;
    for (int it = 0; it < 3; ++it) {
      jacobi_orthonormal(x, alpha, sb, p0, n, p, dpn);
      const double step = p[static_cast<std::size_t>(n)] / dpn;
      if (!std::isfinite(step)) break;
      x = std::clamp(x - step, -1.0, 1.0);
      if (std::abs(step) < 1e-17) break;
    }
    jacobi_orthonormal(x, alpha, sb, p0, n, p, dpn);
    double s = 0.0;
    for (int j = n - 1; j >= 0; --j) s += p[static_cast<std::size_t>(j)] * p[static_cast<std::size_t>(j)];
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / s;
  }
  return rule;
}

}  // namespace

std::vector<AxisNode> axis_rule(double half, double k, int order) {
  const JacobiRule& g = gauss_jacobi(order, 0.0, 2.0 * k);
  const double h = 0.5 * half;
  const double mu_scale = std::pow(2.0, k) * std::pow(h, 2.0 * k + 1.0);
  std::vector<Node1D> out;
  out.reserve(2 * g.nodes.size());
  for (std::size_t i = g.nodes.size(); i-- > 0;) {
    const double u = g.nodes[i];
    out.push_back({-h * (1.0 + u), h * g.weights[i] / std::pow(1.0 + u, 2.0 * k), mu_scale * g.weights[i]});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i];
    out.push_back({h * (1.0 + u), h * g.weights[i] / std::pow(1.0 + u, 2.0 * k), mu_scale * g.weights[i]});
  }
  return out;
}

std::vector<AxisNode> axis_panel(double lo, double hi, double k, int order) {
  const JacobiRule& g = gauss_jacobi(order, 0.0, 0.0);
  const double h = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  std::vector<AxisNode> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = mid + h * g.nodes[i];
    out.push_back({t, h * g.weights[i], h * g.weights[i] * std::pow(2.0, k) * std::pow(std::abs(t), 2.0 * k)});
  }
  return out;
}

namespace {

struct Hyperplane {
  double angle;     // in [0, 2 pi)
  double exponent;  // 2k from the weight, 0 for an auxiliary split point
  double extra;     // caller-supplied endpoint exponent
};

double wrap(double t) {
  t = std::fmod(t, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t;
}

}  // namespace

std::vector<AxisNode> circle_nodes(const WeightContext& w, int order, const std::vector<ArcBreak>& extra) {
  if (w.dimension() != 2) throw DomainError("circle_nodes: weight context must be two-dimensional");
  const auto& rs = w.root_system();
  struct RootLine {
    double theta;  // hyperplane angle mod pi
    double k;
  };
  std::vector<RootLine> lines;
  std::vector<Hyperplane> cuts;
  for (std::size_t i = 0; i < rs.positive_roots().size(); ++i) {
    const double k = w.positive_multiplicity(i);
    if (k == 0.0) continue;
    const auto& a = rs.roots()[rs.positive_roots()[i]];
    const double th = std::fmod(wrap(std::atan2(a[1], a[0]) - 0.5 * kPi), kPi);
    lines.push_back({th, k});
    cuts.push_back({th, 2.0 * k, 0.0});
    cuts.push_back({th + kPi, 2.0 * k, 0.0});
  }
  for (const auto& b : extra) cuts.push_back({wrap(b.angle), 0.0, b.exponent});
  if (cuts.empty()) cuts.push_back({0.0, 0.0, 0.0});
  std::sort(cuts.begin(), cuts.end(), [](const Hyperplane& x, const Hyperplane& y) { return x.angle < y.angle; });
  std::vector<Hyperplane> merged;
  for (const auto& c : cuts) {
    if (!merged.empty() && std::abs(c.angle - merged.back().angle) < 1e-9) {
      if (c.exponent > 0.0) merged.back().angle = c.angle;
      merged.back().exponent += c.exponent;
      merged.back().extra += c.extra;
    } else {
      merged.push_back(c);
    }
  }
  if (merged.size() > 1 && merged.back().angle > 2.0 * kPi - 1e-9) {
    merged.front().exponent += merged.back().exponent;
    merged.front().extra += merged.back().extra;
    merged.pop_back();
  }
  std::vector<Hyperplane> pts;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const Hyperplane& a = merged[i];
    const double b = (i + 1 < merged.size()) ? merged[i + 1].angle : merged[0].angle + 2.0 * kPi;
    pts.push_back(a);
    const int pieces = static_cast<int>(std::ceil((b - a.angle) / (0.5 * kPi) - 1e-12));
    for (int s = 1; s < pieces; ++s) pts.push_back({a.angle + (b - a.angle) * s / pieces, 0.0, 0.0});
  }

  std::vector<AxisNode> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Hyperplane& lo = pts[i];
    const Hyperplane hi = (i + 1 < pts.size()) ? pts[i + 1]
                                               : Hyperplane{pts[0].angle + 2.0 * kPi, pts[0].exponent, pts[0].extra};
    const double h = 0.5 * (hi.angle - lo.angle);
    const double mid = 0.5 * (hi.angle + lo.angle);
    const JacobiRule& g = gauss_jacobi(order, hi.exponent + hi.extra, lo.exponent + lo.extra);
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      const double u = g.nodes[n];
      const double th = mid + h * u;
      const double dlo = 1.0 + u, dhi = 1.0 - u;
      // w(omega) / ((1-u)^{e_hi} (1+u)^{e_lo}), endpoint factors taken in
      // the form sin(h(1 -+ u)) / (1 -+ u) so nothing cancels.
      double ratio = 1.0;
      for (const auto& L : lines) {
        double s;
        if (lo.exponent > 0.0 && std::abs(std::sin(lo.angle - L.theta)) < 1e-12) {
          s = std::sqrt(2.0) * std::sin(h * dlo) / dlo;
        } else if (hi.exponent > 0.0 && std::abs(std::sin(hi.angle - L.theta)) < 1e-12) {
          s = std::sqrt(2.0) * std::sin(h * dhi) / dhi;
        } else {
          s = std::sqrt(2.0) * std::abs(std::sin(th - L.theta));
        }
        ratio *= std::pow(std::abs(s), 2.0 * L.k);
      }
      const double xs = std::pow(dhi, hi.extra) * std::pow(dlo, lo.extra);
      const double leb = h * g.weights[n] / (std::pow(dhi, hi.exponent) * std::pow(dlo, lo.exponent) * xs);
      out.push_back({th, leb, h * g.weights[n] * ratio / xs});
    }
  }
  return out;
}

namespace {

WeightContext z2_context(std::vector<double> k) {
  const int d = static_cast<int>(k.size());
  return WeightContext(build_root_system(Preset::Z2Product, d), MultiplicityFunction(std::move(k)));
}

void push_node(QuadratureRule& r, std::initializer_list<double> y, double leb, double mu) {
  r.nodes.insert(r.nodes.end(), y.begin(), y.end());
  r.weights.push_back(leb);
  r.mu_weights.push_back(mu);
}

QuadratureRule box_rule(const MeasureContext& ctx, double a, int order) {
  const int d = ctx.dimension();
  const auto& w = ctx.weights();
  std::vector<std::vector<Node1D>> axes;
  const bool product = w.is_product();
  for (int j = 0; j < d; ++j)
    axes.push_back(axis_rule(a, product ? w.axis_multiplicities()[static_cast<std::size_t>(j)] : 0.0, order));
  QuadratureRule r;
  r.dimension = d;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> y(static_cast<std::size_t>(d));
  const std::size_t m = axes[0].size();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= m;
  r.nodes.reserve(total * static_cast<std::size_t>(d));
  r.weights.reserve(total);
  r.mu_weights.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double leb = 1.0, mu = 1.0;
    for (int j = d - 1; j >= 0; --j) {
      const Node1D& nd = axes[static_cast<std::size_t>(j)][rem % m];
      rem /= m;
      y[static_cast<std::size_t>(j)] = nd.t;
      leb *= nd.weight;
      mu *= nd.mu_weight;
    }
    if (!product) mu = leb * weight_eval(w, y);
    r.nodes.insert(r.nodes.end(), y.begin(), y.end());
    r.weights.push_back(leb);
    r.mu_weights.push_back(mu);
  }
  return r;
}

// Radial nodes for rho in [lo, hi]: mu weight includes rho^{D-1},
// Lebesgue weight includes rho^{d-1}.
std::vector<Node1D> radial_rule(double lo, double hi, double D, int d, int order) {
  std::vector<Node1D> out;
  if (lo == 0.0) {
    const JacobiRule& g = gauss_jacobi(order, 0.0, D - 1.0);
    const double h = 0.5 * hi;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double u = g.nodes[i];
      const double rho = h * (1.0 + u);
      out.push_back({rho, std::pow(rho, d - 1.0) * h * g.weights[i] / std::pow(1.0 + u, D - 1.0),
                     std::pow(h, D) * g.weights[i]});
    }
  } else {
    const JacobiRule& g = gauss_jacobi(order, 0.0, 0.0);
    const double h = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double rho = mid + h * g.nodes[i];
      out.push_back({rho, std::pow(rho, d - 1.0) * h * g.weights[i], std::pow(rho, D - 1.0) * h * g.weights[i]});
    }
  }
  return out;
}

QuadratureRule polar_rule(const MeasureContext& ctx, double lo, double hi, int order) {
  const QuadratureRule s = sphere_rule(ctx, order);
  const auto radial = radial_rule(lo, hi, ctx.homogeneous_dimension(), ctx.dimension(), order);
  QuadratureRule r;
  r.dimension = ctx.dimension();
  const auto d = static_cast<std::size_t>(r.dimension);
  for (const auto& rn : radial) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto w = s.node(i);
      for (std::size_t j = 0; j < d; ++j) r.nodes.push_back(rn.t * w[j]);
      r.weights.push_back(rn.weight * s.weights[i]);
      r.mu_weights.push_back(rn.mu_weight * s.mu_weights[i]);
    }
  }
  return r;
}

}  // namespace

const JacobiRule& gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_jacobi: order must be >= 1");
  if (!(a > -1.0) || !(b > -1.0)) throw DomainError("gauss_jacobi: exponents must be > -1");
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, JacobiRule> cache;
  const std::scoped_lock lock(mutex);
  const auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_gauss_jacobi(n, a, b)).first;
  return it->second;
}

std::string to_string(const Domain& d) {
  char buf[96];
  switch (d.kind) {
    case Domain::Kind::Box: std::snprintf(buf, sizeof buf, "box(%.6g)", d.hi); break;
    case Domain::Kind::Ball: std::snprintf(buf, sizeof buf, "ball(%.6g)", d.hi); break;
    case Domain::Kind::Annulus: std::snprintf(buf, sizeof buf, "annulus(%.6g,%.6g)", d.lo, d.hi); break;
    case Domain::Kind::Sphere: std::snprintf(buf, sizeof buf, "sphere"); break;
  }
  return buf;
}

std::string detail::describe_node(std::span<const double> y) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? ", " : "", y[i]);
    s += buf;
  }
  return s + ")";
}

double mehta_product_closed_form(const std::vector<double>& axis_k) {
  double log_inv = 0.0;
  for (double k : axis_k) log_inv += (2.0 * k + 0.5) * std::log(2.0) + specfun::log_gamma(k + 0.5);
  return std::exp(log_inv);
}

MeasureContext::MeasureContext(WeightContext weights) : weights_(std::move(weights)) {
  const int d = weights_.dimension();
  if (d > 3) throw CapabilityError("measure: dimensions above 3 are not supported");
  const double g = weights_.gamma();
  const double D = weights_.homogeneous_dimension();
  if (weights_.is_product()) {
    closed_form_ = true;
    double log_a = g * std::log(2.0) + std::log(2.0) - specfun::log_gamma(g + 0.5 * d);
    for (double k : weights_.axis_multiplicities()) log_a += specfun::log_gamma(k + 0.5);
    angular_ = std::exp(log_a);
    mehta_ = 1.0 / mehta_product_closed_form(weights_.axis_multiplicities());
  } else {
    if (d != 2) throw CapabilityError("measure: non-product root systems are supported for d = 2 only");
    angular_ = pairwise_sum(sphere_rule(*this, 128).mu_weights);
    // int_0^inf rho^{D-1} e^{-rho^2/2} d rho = 2^{D/2-1} Gamma(D/2)
    mehta_ = 1.0 / (angular_ * std::exp((0.5 * D - 1.0) * std::log(2.0) + specfun::log_gamma(0.5 * D)));
  }
}

QuadratureRule sphere_rule(const MeasureContext& ctx, int order) {
  if (order < 1) throw DomainError("sphere_rule: order must be >= 1");
  const auto& w = ctx.weights();
  const int d = ctx.dimension();
  QuadratureRule r;
  r.domain = Domain::sphere();
  r.order = order;
  r.dimension = d;
  if (d == 1) {
    push_node(r, {-1.0}, 1.0, weight_eval(w, std::vector<double>{-1.0}));
    push_node(r, {1.0}, 1.0, weight_eval(w, std::vector<double>{1.0}));
  } else if (d == 2) {
    for (const auto& n : circle_nodes(w, order)) push_node(r, {std::cos(n.t), std::sin(n.t)}, n.weight, n.mu_weight);
  } else if (d == 3) {
    if (!w.is_product()) throw CapabilityError("sphere_rule: d = 3 requires a product root system");
    const auto& k = w.axis_multiplicities();
    const double kk = k[0] + k[1];
    const auto phi = circle_nodes(z2_context({k[0], k[1]}), order);
    const JacobiRule& g = gauss_jacobi(order, kk, 2.0 * k[2]);
    const double scale = std::pow(2.0, k[2]) * std::pow(0.5, kk + 2.0 * k[2] + 1.0);
    for (int side : {-1, 1}) {
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double v = g.nodes[i];
        const double one_minus = 0.5 * (1.0 - v), one_plus = 0.5 * (3.0 + v);
        const double u = 0.5 * (1.0 + v);
        const double sin_t = std::sqrt(one_minus * one_plus);
        const double mu_u = scale * g.weights[i] * std::pow(one_plus, kk);
        const double leb_u = 0.5 * g.weights[i] / (std::pow(1.0 - v, kk) * std::pow(1.0 + v, 2.0 * k[2]));
        for (const auto& f : phi)
          push_node(r, {sin_t * std::cos(f.t), sin_t * std::sin(f.t), side * u}, leb_u * f.weight, mu_u * f.mu_weight);
      }
    }
  } else {
    throw CapabilityError("sphere_rule: unsupported dimension");
  }
  return r;
}

QuadratureRule build_rule(const MeasureContext& ctx, const Domain& domain, int order) {
  if (order < 1) throw DomainError("build_rule: order must be >= 1");
  QuadratureRule r;
  switch (domain.kind) {
    case Domain::Kind::Box:
      if (!(domain.hi > 0.0)) throw DomainError("build_rule: box half-width must be > 0");
      r = box_rule(ctx, domain.hi, order);
      break;
    case Domain::Kind::Ball:
      if (!(domain.hi > 0.0)) throw DomainError("build_rule: ball radius must be > 0");
      r = polar_rule(ctx, 0.0, domain.hi, order);
      break;
    case Domain::Kind::Annulus:
      if (!(domain.lo >= 0.0) || !(domain.hi > domain.lo) || !std::isfinite(domain.hi))
        throw DomainError("build_rule: annulus needs 0 <= lo < hi < inf");
      r = polar_rule(ctx, domain.lo, domain.hi, order);
      break;
    case Domain::Kind::Sphere:
      return sphere_rule(ctx, order);
  }
  r.domain = domain;
  r.order = order;
  return r;
}

double ball_volume(const MeasureContext& ctx, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ball_volume: radius must be finite and > 0");
  const double g = ctx.gamma();
  const double half_d = 0.5 * ctx.dimension();
  const double D = ctx.homogeneous_dimension();
  const double log_den = std::log(ctx.mehta_constant()) + (g + half_d) * std::log(2.0) +
                         specfun::log_gamma(g + half_d + 1.0);
  return std::exp(D * std::log(r) - log_den);
}

double power_integral(const MeasureContext& ctx, double beta, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) throw DomainError("power_integral: need 0 <= lo < hi");
  const double e = beta + ctx.homogeneous_dimension();
  const double A = ctx.angular_constant();
  if (lo == 0.0 && e <= 0.0)
    throw DivergenceError("power_integral: |y|^beta is not mu_k-integrable at the origin (beta + 2gamma + d <= 0)");
  if (std::isinf(hi)) {
    if (e >= 0.0)
      throw DivergenceError("power_integral: |y|^beta is not mu_k-integrable at infinity (beta + 2gamma + d >= 0)");
    return A * std::pow(lo, e) / -e;
  }
  if (e == 0.0) return A * std::log(hi / lo);
  return A * (std::pow(hi, e) - std::pow(lo, e)) / e;
}

double mehta_constant_quadrature(const MeasureContext& ctx, int order) {
  const auto gauss = [](std::span<const double> y) {
    double s = 0.0;
    for (double c : y) s += c * c;
    return std::exp(-0.5 * s);
  };
  const Domain dom = ctx.weights().is_product() ? Domain::box(kMehtaBox) : Domain::ball(kMehtaBox);
  return 1.0 / integrate(build_rule(ctx, dom, order), gauss);
}

}  // namespace dunkl

#include "dunkl/transform.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

using cplx = std::complex<double>;

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Frequency axis [-xi, xi]: Gauss-Jacobi on [-c, c] around the singular
// weight, then Legendre panels of width <= 8/r mirrored on both sides.
std::vector<AxisNode> frequency_axis(double k, double r, double xi) {
  const double c = std::min(4.0 / r, xi);
  std::vector<AxisNode> core = axis_rule(c, k, 16);
  std::vector<AxisNode> right;
  const double width = 8.0 / r;
  for (double lo = c; lo < xi * (1.0 - 1e-14); lo += width) {
    const auto p = axis_panel(lo, std::min(lo + width, xi), k, 16);
    right.insert(right.end(), p.begin(), p.end());
  }
  std::vector<AxisNode> out;
  for (auto it = right.rbegin(); it != right.rend(); ++it) out.push_back({-it->t, it->weight, it->mu_weight});
  out.insert(out.end(), core.begin(), core.end());
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

}  // namespace

TransformPlan::TransformPlan(MeasureContext measure, double support_radius, int base_order)
    : measure_(std::move(measure)),
      kernel_(KernelContext::automatic(measure_.weights())),
      r_(support_radius),
      base_(base_order),
      cache_(std::make_shared<Cache>()) {
  if (!(r_ > 0.0) || !std::isfinite(r_)) throw DomainError("transform: support radius must be finite and > 0");
  if (base_ < 1) throw DomainError("transform: base order must be >= 1");
}

int TransformPlan::order_for(double xnorm) const {
  const double want = base_ + std::ceil(0.75 * r_ * xnorm);
  if (!(want <= kMaxOrder))
    throw AccuracyError("transform: |x| = " + std::to_string(xnorm) +
                        " exceeds the accuracy envelope of this plan; build a plan with a smaller support "
                        "radius or evaluate at lower frequency");
  const int n = static_cast<int>(want);
  return ((n + kOrderBucket - 1) / kOrderBucket) * kOrderBucket;
}

const std::vector<AxisNode>& TransformPlan::axis(int j, int order) const {
  const std::scoped_lock lock(cache_->mutex);
  const auto key = std::make_pair(j, order);
  auto it = cache_->axes.find(key);
  if (it == cache_->axes.end())
    it = cache_->axes.emplace(key, axis_rule(r_, kernel_.axis_multiplicity(j), order)).first;
  return it->second;
}

BoundTransform::BoundTransform(const TransformPlan& plan, RealFunction f) : plan_(&plan), f_(std::move(f)) {}

const std::vector<double>& BoundTransform::samples(int order) const {
  const std::scoped_lock lock(mutex_);
  auto it = samples_.find(order);
  if (it != samples_.end()) return it->second;
  const int d = plan_->dimension();
  std::vector<const std::vector<AxisNode>*> ax;
  for (int j = 0; j < d; ++j) ax.push_back(&plan_->axis(j, order));
  const std::size_t m = ax[0]->size();
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= m;
  std::vector<double> g(total);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double mu = 1.0;
    for (int j = d - 1; j >= 0; --j) {
      const AxisNode& n = (*ax[static_cast<std::size_t>(j)])[rem % m];
      rem /= m;
      y[static_cast<std::size_t>(j)] = n.t;
      mu *= n.mu_weight;
    }
    const double v = f_(y);
    if (!std::isfinite(v)) throw EvaluationError("transform: source function not finite at " + detail::describe_node(y));
    g[flat] = mu * v;
  }
  return samples_.emplace(order, std::move(g)).first->second;
}

// conj(e_{k_j}(x t_i)) for every node; nodes are symmetric so only the
// positive half is evaluated.
std::vector<cplx> BoundTransform::axis_factors(int j, int order, double x) const {
  const auto& ax = plan_->axis(j, order);
  const std::size_t m = ax.size(), h = m / 2;
  std::vector<cplx> out(m);
  for (std::size_t i = h; i < m; ++i) {
    const cplx e = plan_->kernel().axis_factor(j, x * ax[i].t);
    out[i] = std::conj(e);
    out[m - 1 - i] = e;
  }
  return out;
}

cplx BoundTransform::operator()(std::span<const double> x) const {
  const int d = plan_->dimension();
  if (static_cast<int>(x.size()) != d) throw DomainError("transform: frequency dimension mismatch");
  const int order = plan_->order_for(norm(x));
  const auto& g = samples(order);
  const std::size_t m = 2 * static_cast<std::size_t>(order);
  // Contract the last axis first.
  std::vector<cplx> cur(g.begin(), g.end());
  std::size_t len = cur.size();
  for (int j = d - 1; j >= 0; --j) {
    const auto e = axis_factors(j, order, x[static_cast<std::size_t>(j)]);
    const std::size_t outer = len / m;
    std::vector<cplx> next(outer);
    for (std::size_t a = 0; a < outer; ++a) {
      cplx s = 0.0;
      const cplx* row = cur.data() + a * m;
      for (std::size_t i = 0; i < m; ++i) s += row[i] * e[i];
      next[a] = s;
    }
    cur.swap(next);
    len = outer;
  }
  return plan_->measure().mehta_constant() * cur[0];
}

std::vector<cplx> BoundTransform::grid(const std::vector<std::vector<double>>& axes) const {
  const int d = plan_->dimension();
  if (static_cast<int>(axes.size()) != d) throw DomainError("transform grid: need one axis per dimension");
  if (d > 2) throw CapabilityError("transform grid: d <= 2 only");
  double xmax2 = 0.0;
  for (const auto& a : axes) {
    double mx = 0.0;
    for (double v : a) mx = std::max(mx, std::abs(v));
    xmax2 += mx * mx;
  }
  const int order = plan_->order_for(std::sqrt(xmax2));
  const auto& g = samples(order);
  const auto m = static_cast<Eigen::Index>(2 * order);
  auto factor_matrix = [&](int j) {
    const auto& xs = axes[static_cast<std::size_t>(j)];
    Eigen::MatrixXcd E(static_cast<Eigen::Index>(xs.size()), m);
    for (std::size_t a = 0; a < xs.size(); ++a) {
      const auto row = axis_factors(j, order, xs[a]);
      for (Eigen::Index i = 0; i < m; ++i) E(static_cast<Eigen::Index>(a), i) = row[static_cast<std::size_t>(i)];
    }
    return E;
  };
  const double ck = plan_->measure().mehta_constant();
  std::vector<cplx> out;
  if (d == 1) {
    const Eigen::MatrixXcd E = factor_matrix(0);
    Eigen::VectorXcd gv(m);
    for (Eigen::Index i = 0; i < m; ++i) gv(i) = g[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd F = E * gv;
    for (Eigen::Index a = 0; a < F.size(); ++a) out.push_back(ck * F(a));
  } else {
    const Eigen::MatrixXcd E1 = factor_matrix(0), E2 = factor_matrix(1);
    Eigen::MatrixXcd G(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) G(i, j) = g[static_cast<std::size_t>(i * m + j)];
    const Eigen::MatrixXcd F = (E1 * G) * E2.transpose();
    out.reserve(static_cast<std::size_t>(F.size()));
    for (Eigen::Index a = 0; a < F.rows(); ++a)
      for (Eigen::Index b = 0; b < F.cols(); ++b) out.push_back(ck * F(a, b));
  }
  return out;
}

std::vector<cplx> BoundTransform::along_ray(std::span<const double> omega, std::span<const double> ts) const {
  const int d = plan_->dimension();
  if (static_cast<int>(omega.size()) != d) throw DomainError("transform: direction dimension mismatch");
  std::vector<cplx> out(ts.size());
  if (ts.empty()) return out;
  if (d != 2) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < ts.size(); ++a) {
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = ts[a] * omega[j];
      out[a] = (*this)(x);
    }
    return out;
  }
  double tmax = 0.0;
  for (double t : ts) tmax = std::max(tmax, std::abs(t));
  const int order = plan_->order_for(tmax * norm(omega));
  const auto& g = samples(order);
  const auto m = static_cast<Eigen::Index>(2 * order);
  const auto nt = static_cast<Eigen::Index>(ts.size());
  Eigen::MatrixXcd A(nt, m), B(m, nt);
  for (Eigen::Index a = 0; a < nt; ++a) {
    const auto e1 = axis_factors(0, order, ts[static_cast<std::size_t>(a)] * omega[0]);
    const auto e2 = axis_factors(1, order, ts[static_cast<std::size_t>(a)] * omega[1]);
    for (Eigen::Index i = 0; i < m; ++i) {
      A(a, i) = e1[static_cast<std::size_t>(i)];
      B(i, a) = e2[static_cast<std::size_t>(i)];
    }
  }
  Eigen::MatrixXd G(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) G(i, j) = g[static_cast<std::size_t>(i * m + j)];
  const Eigen::MatrixXd re = G * B.real();
  const Eigen::MatrixXd im = G * B.imag();
  Eigen::MatrixXcd GB(m, nt);
  GB.real() = re;
  GB.imag() = im;
  const double ck = plan_->measure().mehta_constant();
  for (Eigen::Index a = 0; a < nt; ++a) out[static_cast<std::size_t>(a)] = ck * (A.row(a) * GB.col(a))(0, 0);
  return out;
}

double BoundTransform::l1_norm() const {
  double s = 0.0;
  for (double v : samples(plan_->base_order())) s += std::abs(v);
  return s;
}

double BoundTransform::l2_norm_squared() const {
  // samples hold mu * f; f^2 mu needs f itself, so re-weight by f.
  const int order = plan_->base_order();
  const int d = plan_->dimension();
  const auto& ax0 = plan_->axis(0, order);
  const std::size_t m = ax0.size();
  std::vector<const std::vector<AxisNode>*> ax;
  for (int j = 0; j < d; ++j) ax.push_back(&plan_->axis(j, order));
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= m;
  std::vector<double> terms(total);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double mu = 1.0;
    for (int j = d - 1; j >= 0; --j) {
      const AxisNode& n = (*ax[static_cast<std::size_t>(j)])[rem % m];
      rem /= m;
      y[static_cast<std::size_t>(j)] = n.t;
      mu *= n.mu_weight;
    }
    const double v = f_(y);
    terms[flat] = mu * v * v;
  }
  return pairwise_sum(terms);
}

cplx forward(const TransformPlan& plan, const RealFunction& f, std::span<const double> x) {
  return BoundTransform(plan, f)(x);
}

double plancherel_defect(const TransformPlan& plan, const RealFunction& f) {
  const int d = plan.dimension();
  if (d > 2) throw CapabilityError("plancherel_defect: d <= 2 only");
  const BoundTransform bound(plan, f);
  const double lhs = bound.l2_norm_squared();
  const double r = plan.support_radius();
  double prev = -1.0, total = 0.0;
  for (double xi = 16.0 / r; xi * r <= 1024.0 + 1e-9; xi *= 2.0) {
    std::vector<std::vector<AxisNode>> axes;
    std::vector<std::vector<double>> pts;
    for (int j = 0; j < d; ++j) {
      axes.push_back(frequency_axis(plan.kernel().axis_multiplicity(j), r, xi));
      std::vector<double> p;
      for (const auto& n : axes.back()) p.push_back(n.t);
      pts.push_back(std::move(p));
    }
    const auto F = bound.grid(pts);
    std::vector<double> terms(F.size());
    for (std::size_t a = 0; a < F.size(); ++a) {
      double mu = 1.0;
      if (d == 1) {
        mu = axes[0][a].mu_weight;
      } else {
        mu = axes[0][a / axes[1].size()].mu_weight * axes[1][a % axes[1].size()].mu_weight;
      }
      terms[a] = mu * std::norm(F[a]);
    }
    total = pairwise_sum(terms);
    if (prev >= 0.0 && std::abs(total - prev) <= 1e-10 * total) break;
    prev = total;
  }
  if (lhs == 0.0) return total == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(total - lhs) / lhs;
}

}  // namespace dunkl

#include "dunkl/kernel.hpp"

#include <cmath>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

using cplx = std::complex<double>;

// Below this value of |x||y| the remainder is summed from the series tail.
constexpr double kTailLimit = 8.0;
constexpr int kTailTerms = 64;

void check_dims(const KernelContext& ctx, std::span<const double> x, std::span<const double> y) {
  if (static_cast<int>(x.size()) != ctx.dimension() || static_cast<int>(y.size()) != ctx.dimension())
    throw DomainError("kernel: argument dimension mismatch");
}

// Coefficients by total degree 0..n_max of prod_j sum_m (i t_j)^m / b_m.
std::vector<cplx> degree_series(const KernelContext& ctx, std::span<const double> x,
                                std::span<const double> y, int n_max) {
  const auto len = static_cast<std::size_t>(n_max + 1);
  std::vector<cplx> acc(len, 0.0);
  acc[0] = 1.0;
  std::vector<cplx> next(len);
  for (int j = 0; j < ctx.dimension(); ++j) {
    const double t = x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
    const auto inv_b = ctx.axis_taylor(j, n_max);
    std::vector<cplx> axis(len);
    cplx it_pow = 1.0;
    for (std::size_t m = 0; m < len; ++m) {
      axis[m] = it_pow * inv_b[m];
      it_pow *= cplx(0.0, t);
    }
    std::fill(next.begin(), next.end(), cplx(0.0));
    for (std::size_t a = 0; a < len; ++a) {
      if (acc[a] == cplx(0.0)) continue;
      for (std::size_t m = 0; a + m < len; ++m) next[a + m] += acc[a] * axis[m];
    }
    acc.swap(next);
  }
  return acc;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

}  // namespace

KernelContext::KernelContext(const WeightContext& weights, KernelMode mode)
    : mode_(mode), d_(weights.dimension()) {
  if (mode == KernelMode::ClassicalK0) {
    if (!weights.is_trivial())
      throw CapabilityError("classical kernel mode requires k = 0");
    k_.assign(static_cast<std::size_t>(d_), 0.0);
  } else {
    if (!weights.is_product())
      throw CapabilityError(
          "closed-form kernel needs a product (Z2^d type) root system; no closed form for this group");
    k_ = weights.axis_multiplicities();
  }
  for (double k : k_)
    axes_.push_back({k, specfun::NormalizedBessel(k - 0.5), specfun::NormalizedBessel(k + 0.5)});
}

KernelContext KernelContext::automatic(const WeightContext& weights) {
  return KernelContext(weights, weights.is_trivial() ? KernelMode::ClassicalK0 : KernelMode::ClosedFormZ2d);
}

cplx KernelContext::axis_factor(int j, double t) const {
  const Axis& a = axes_[static_cast<std::size_t>(j)];
  if (a.k == 0.0) return {std::cos(t), std::sin(t)};
  return {a.even(t), t / (2.0 * a.k + 1.0) * a.odd(t)};
}

std::vector<double> KernelContext::axis_taylor(int j, int n_max) const {
  const double k = k_[static_cast<std::size_t>(j)];
  std::vector<double> inv(static_cast<std::size_t>(n_max + 1));
  double b = 1.0;
  inv[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    b *= n + ((n % 2 == 1) ? 2.0 * k : 0.0);
    inv[static_cast<std::size_t>(n)] = 1.0 / b;
  }
  return inv;
}

KernelValue kernel_eval(const KernelContext& ctx, std::span<const double> x,
                        std::span<const double> y) {
  check_dims(ctx, x, y);
  cplx v = 1.0;
  for (int j = 0; j < ctx.dimension(); ++j)
    v *= ctx.axis_factor(j, x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)]);
  return {v.real(), v.imag()};
}

KernelValue kernel_taylor(const KernelContext& ctx, std::span<const double> x,
                          std::span<const double> y, int n) {
  check_dims(ctx, x, y);
  if (n < 0) throw DomainError("kernel_taylor: degree must be >= 0");
  const auto series = degree_series(ctx, x, y, n);
  cplx s = 0.0;
  for (int m = n; m >= 0; --m) s += series[static_cast<std::size_t>(m)];
  return {s.real(), s.imag()};
}

RemainderCheck remainder_bound_check(const KernelContext& ctx, std::span<const double> x,
                                     std::span<const double> y, int n) {
  check_dims(ctx, x, y);
  if (n < 0) throw DomainError("remainder_bound_check: degree must be >= 0");
  const double s = norm2(x) * norm2(y);
  RemainderCheck out;
  out.rhs = std::exp((n + 1) * std::log(s) - std::lgamma(n + 2.0));
  if (s == 0.0) out.rhs = 0.0;
  if (s <= kTailLimit) {
    const auto series = degree_series(ctx, x, y, n + kTailTerms);
    cplx tail = 0.0;
    for (int m = n + kTailTerms; m > n; --m) tail += series[static_cast<std::size_t>(m)];
    out.lhs = std::abs(tail);
  } else {
    const auto e = kernel_eval(ctx, x, y).value();
    const auto t = kernel_taylor(ctx, x, y, n).value();
    out.lhs = std::abs(e - t);
  }
  out.ok = out.lhs <= out.rhs * (1.0 + 1e-10);
  return out;
}

}  // namespace dunkl

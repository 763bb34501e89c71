#include "dunkl/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "double_double.hpp"
#include "dunkl/errors.hpp"

namespace dunkl::specfun {

namespace {

using detail::DD;

constexpr double kEulerGamma = 0.57721566490153286061;

// Coefficients c_k = (-1)^k zeta(k) / k of log Gamma(1+e) = -gamma e + sum c_k e^k.
const std::array<double, 64>& log_gamma_series() {
  static const std::array<double, 64> table = [] {
    constexpr std::array<double, 11> zeta_small = {
        0.0, 0.0, 1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
        1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
        1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853};
    std::array<double, 64> c{};
    for (int k = 2; k < 64; ++k) {
      double z;
      if (k <= 10) {
        z = zeta_small[static_cast<std::size_t>(k)];
      } else {
        z = 0.0;
        for (int n = 40; n >= 2; --n) z += std::pow(static_cast<double>(n), -k);
        z += std::pow(40.5, 1.0 - k) / (k - 1.0);
        z += 1.0;
      }
      c[static_cast<std::size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * z / k;
    }
    return c;
  }();
  return table;
}

// log Gamma(1+e), |e| <= 1/2.
double log_gamma_near_one(double e) {
  const auto& c = log_gamma_series();
  double sum = 0.0;
  double pk = e;
  std::array<double, 64> terms{};
  for (int k = 2; k < 64; ++k) {
    pk *= e;
    terms[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] * pk;
  }
  for (int k = 63; k >= 2; --k) sum += terms[static_cast<std::size_t>(k)];
  return -kEulerGamma * e + sum;
}

double stirling(double x) {
  constexpr std::array<double, 8> b = {1.0 / 6.0,     -1.0 / 30.0,      1.0 / 42.0,
                                       -1.0 / 30.0,   5.0 / 66.0,       -691.0 / 2730.0,
                                       7.0 / 6.0,     -3617.0 / 510.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double corr = 0.0;
  double p = inv;
  for (std::size_t m = 0; m < b.size(); ++m) {
    const double k = 2.0 * (m + 1);
    corr += b[m] / (k * (k - 1.0)) * p;
    p *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + corr;
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || !(x > 0.0)) throw DomainError("log_gamma: argument must be finite and > 0");
  if (x < 0.5) return log_gamma_near_one(x) - std::log(x);
  if (x <= 1.5) return log_gamma_near_one(x - 1.0);
  if (x <= 2.5) return std::log1p(x - 2.0) + log_gamma_near_one(x - 2.0);
  if (x >= 10.0) return stirling(x);
  double prod = 1.0;
  double y = x;
  while (y < 10.0) {
    prod *= y;
    y += 1.0;
  }
  return stirling(y) - std::log(prod);
}

double gamma(double x) { return std::exp(log_gamma(x)); }

NormalizedBessel::NormalizedBessel(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha) || !(alpha > -1.0))
    throw DomainError("normalized_bessel: order must be > -1");
  gamma_ap1_ = gamma(alpha + 1.0);
  const double phase = (0.5 * alpha + 0.25) * std::numbers::pi;
  cos_phase_ = std::cos(phase);
  sin_phase_ = std::sin(phase);
  // a_k(alpha) = prod_{j<=k} (4 alpha^2 - (2j-1)^2) / (k! 8^k)
  const double mu = 4.0 * alpha * alpha;
  hankel_.push_back(1.0);
  for (int k = 1; k < 64; ++k) {
    const double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
    hankel_.push_back(hankel_.back() * f);
    if (hankel_.back() == 0.0) break;
  }
}

double NormalizedBessel::series(double z) const {
  z = std::abs(z);
  if (z <= 4.0) {
    // Neumaier-compensated double summation; terms stay below ~4 here.
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0, comp = 0.0;
    for (int n = 1; n < 200; ++n) {
      term *= -q / (n * (n + alpha_));
      const double t = sum + term;
      if (std::abs(sum) >= std::abs(term))
        comp += (sum - t) + term;
      else
        comp += (term - t) + sum;
      sum = t;
      if (std::abs(term) < 1e-20 * std::abs(sum) && n > q) break;
    }
    return sum + comp;
  }
  const double h = 0.5 * z;
  const DD q = detail::two_prod(h, h);
  DD term(1.0), sum(1.0);
  for (int n = 1; n < 600; ++n) {
    const DD den = detail::two_sum(static_cast<double>(n), alpha_) * static_cast<double>(n);
    term = -(term * q / den);
    sum = sum + term;
    if (n > q.hi && std::abs(term.hi) < 1e-34 * std::abs(sum.hi) + 1e-300) break;
  }
  return sum.value();
}

double NormalizedBessel::asymptotic(double z) const {
  z = std::abs(z);
  if (!(z > 0.0)) throw DomainError("normalized_bessel: asymptotic path needs z > 0");
  double p = 0.0, q = 0.0;
  double zk = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < hankel_.size(); ++k) {
    const double term = hankel_[k] / zk;
    const double mag = std::abs(term);
    if (k > 1 && mag > prev) break;  // asymptotic series started to diverge
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      p += sign * term;
    else
      q += sign * term;
    if (mag < 1e-17 * std::abs(p)) break;
    prev = mag;
    zk *= z;
  }
  const double cz = std::cos(z), sz = std::sin(z);
  const double cchi = cz * cos_phase_ + sz * sin_phase_;
  const double schi = sz * cos_phase_ - cz * sin_phase_;
  const double amp = gamma_ap1_ * std::pow(2.0 / z, alpha_) * std::sqrt(2.0 / (std::numbers::pi * z));
  return amp * (p * cchi - q * schi);
}

double NormalizedBessel::operator()(double z) const {
  if (!std::isfinite(z)) throw DomainError("normalized_bessel: argument must be finite");
  z = std::abs(z);
  return z <= kSeriesLimit ? series(z) : asymptotic(z);
}

double normalized_bessel(double alpha, double z) {
  if (!std::isfinite(z)) throw DomainError("normalized_bessel: argument must be finite");
  return NormalizedBessel(alpha)(z);
}

}  // namespace dunkl::specfun

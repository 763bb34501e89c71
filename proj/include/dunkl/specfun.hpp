#pragma once

#include <vector>

namespace dunkl::specfun {

/// Below this argument j_alpha is summed from its Maclaurin series (in
/// double-double arithmetic above |z| = 4); beyond it the Hankel asymptotic
/// expansion of J_alpha is used.
inline constexpr double kSeriesLimit = 30.0;

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Gamma(x) for x > 0 (overflows to +inf for x > ~171).
double gamma(double x);

/// Normalized Bessel function
///   j_a(z) = Gamma(a+1) sum_n (-1)^n (z/2)^{2n} / (n! Gamma(n+a+1))
///          = Gamma(a+1) (2/z)^a J_a(z),
/// an even entire function of z with j_a(0) = 1. Requires a > -1.
double normalized_bessel(double alpha, double z);

/// j_alpha with the order-dependent constants computed once.
class NormalizedBessel {
 public:
  explicit NormalizedBessel(double alpha);

  double operator()(double z) const;
  double alpha() const { return alpha_; }

  /// The two internal evaluation paths, exposed for consistency checks.
  double series(double z) const;
  double asymptotic(double z) const;

 private:
  double alpha_;
  double gamma_ap1_;
  double cos_phase_;
  double sin_phase_;
  std::vector<double> hankel_;
};

}  // namespace dunkl::specfun

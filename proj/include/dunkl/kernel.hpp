#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dunkl/root_system.hpp"
#include "dunkl/specfun.hpp"

namespace dunkl {

struct KernelValue {
  double re = 0.0;
  double im = 0.0;

  std::complex<double> value() const { return {re, im}; }
  double modulus() const { return std::hypot(re, im); }
};

enum class KernelMode { ClosedFormZ2d, ClassicalK0 };

/// Evaluation context for E_k(ix, y). Closed-form mode needs a product-type
/// system (every root with k > 0 on its own coordinate axis); classical mode
/// needs k = 0.
class KernelContext {
 public:
  KernelContext(const WeightContext& weights, KernelMode mode);
  /// Classical mode when k = 0, closed form otherwise.
  static KernelContext automatic(const WeightContext& weights);

  KernelMode mode() const { return mode_; }
  int dimension() const { return d_; }
  double axis_multiplicity(int j) const { return k_[static_cast<std::size_t>(j)]; }

  /// e_{k_j}(t) = j_{k_j - 1/2}(t) + i t/(2k_j+1) j_{k_j+1/2}(t).
  std::complex<double> axis_factor(int j, double t) const;

  /// Maclaurin coefficients 1/b_n of e_{k_j}(t) = sum_n (i t)^n / b_n, n <= n_max.
  std::vector<double> axis_taylor(int j, int n_max) const;

 private:
  struct Axis {
    double k;
    specfun::NormalizedBessel even;
    specfun::NormalizedBessel odd;
  };
  KernelMode mode_;
  int d_;
  std::vector<double> k_;
  std::vector<Axis> axes_;
};

/// E_k(ix, y) for real x, y. The transform kernel E_k(-ix, y) is its conjugate.
KernelValue kernel_eval(const KernelContext& ctx, std::span<const double> x,
                        std::span<const double> y);

/// Sum of the homogeneous terms of E_k(ix, y) of total degree <= n in x.
KernelValue kernel_taylor(const KernelContext& ctx, std::span<const double> x,
                          std::span<const double> y, int n);

struct RemainderCheck {
  double lhs = 0.0;  // |E_k(ix,y) - T_N(x,y)|
  double rhs = 0.0;  // (|x||y|)^{N+1} / (N+1)!
  bool ok = false;
};

RemainderCheck remainder_bound_check(const KernelContext& ctx, std::span<const double> x,
                                     std::span<const double> y, int n);

}  // namespace dunkl

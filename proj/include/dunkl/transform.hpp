#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "dunkl/kernel.hpp"
#include "dunkl/measure.hpp"

namespace dunkl {

using RealFunction = std::function<double(std::span<const double>)>;

/// Quadrature plan for F_D f(x) = c_k int E_k(-ix, y) f(y) dmu_k(y), f
/// supported in B(0, r). Nodes live on the box [-r, r]^d, each axis split at
/// 0 into Gauss-Jacobi halves; the per-half order grows with r|x|.
class TransformPlan {
 public:
  static constexpr int kMaxOrder = 4096;
  static constexpr int kOrderBucket = 32;

  TransformPlan(MeasureContext measure, double support_radius, int base_order = 64);

  const MeasureContext& measure() const { return measure_; }
  const KernelContext& kernel() const { return kernel_; }
  int dimension() const { return measure_.dimension(); }
  double support_radius() const { return r_; }
  int base_order() const { return base_; }

  /// Nodes per half axis for |x| <= xnorm: base + ceil(0.75 r |x|), rounded
  /// up to a multiple of kOrderBucket. Throws AccuracyError above kMaxOrder.
  int order_for(double xnorm) const;

  /// Axis rule on [-r, r] for coordinate j (cached).
  const std::vector<AxisNode>& axis(int j, int order) const;

 private:
  MeasureContext measure_;
  KernelContext kernel_;
  double r_;
  int base_;
  struct Cache {
    std::mutex mutex;
    std::map<std::pair<int, int>, std::vector<AxisNode>> axes;
  };
  std::shared_ptr<Cache> cache_;
};

/// A plan bound to one source function; caches mu-weighted samples of f per
/// quadrature order so repeated evaluations only pay for the kernel.
class BoundTransform {
 public:
  BoundTransform(const TransformPlan& plan, RealFunction f);

  std::complex<double> operator()(std::span<const double> x) const;

  /// F_D f on the tensor grid axes[0] x ... (d <= 2), row-major.
  std::vector<std::complex<double>> grid(const std::vector<std::vector<double>>& axes) const;

  /// F_D f(t omega) for each t, with omega a unit vector. One quadrature
  /// order (that of max t) serves the whole batch.
  std::vector<std::complex<double>> along_ray(std::span<const double> omega, std::span<const double> ts) const;

  /// int |f| dmu_k and int f^2 dmu_k at the base order.
  double l1_norm() const;
  double l2_norm_squared() const;

  const TransformPlan& plan() const { return *plan_; }

 private:
  const std::vector<double>& samples(int order) const;
  std::vector<std::complex<double>> axis_factors(int j, int order, double x) const;

  const TransformPlan* plan_;
  RealFunction f_;
  mutable std::mutex mutex_;
  mutable std::map<int, std::vector<double>> samples_;
};

std::complex<double> forward(const TransformPlan& plan, const RealFunction& f, std::span<const double> x);

/// |int |F_D f|^2 dmu_k - int |f|^2 dmu_k| / int |f|^2 dmu_k, the frequency
/// side integrated over growing boxes in dyadic steps until the last shell
/// adds less than 1e-10 of the total. d <= 2.
double plancherel_defect(const TransformPlan& plan, const RealFunction& f);

}  // namespace dunkl

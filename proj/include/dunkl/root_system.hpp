#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dunkl {

using Vector = std::vector<double>;

enum class Preset { Z2Product, A1, Dihedral };

/// Parses "Z2^d", "A1" or "dihedral" (case-insensitive).
Preset parse_preset(const std::string& name);
std::string to_string(Preset preset);

/// Normalized root system: every root has |alpha|^2 = 2, the set is closed
/// under its own reflections and contains exactly {alpha, -alpha} on each line.
class RootSystemData {
 public:
  /// Builds from arbitrary nonzero vectors. Every vector is rescaled to
  /// squared length 2; duplicates (after rescaling) are dropped.
  static RootSystemData from_roots(int dimension, const std::vector<Vector>& roots);

  int dimension() const { return dimension_; }
  const std::vector<Vector>& roots() const { return roots_; }
  /// Indices into roots() of the positive subsystem.
  const std::vector<std::size_t>& positive_roots() const { return positive_; }
  /// Orbit label of roots()[i] under the generated reflection group.
  int orbit_of(std::size_t i) const { return orbit_[i]; }
  int orbit_count() const { return orbit_count_; }

  /// Index of the root equal to v (tolerance 1e-9), or -1.
  int find(std::span<const double> v) const;

  /// For product-type systems: the coordinate axis of each positive root,
  /// or -1 if the root is not axis aligned.
  int axis_of(std::size_t i) const;

 private:
  int dimension_ = 0;
  std::vector<Vector> roots_;
  std::vector<std::size_t> positive_;
  std::vector<int> orbit_;
  int orbit_count_ = 0;
};

/// `order` is only used by the dihedral preset (even m >= 2, d = 2).
RootSystemData build_root_system(Preset preset, int dimension, int order = 0);

/// sigma_alpha(y) = y - 2<alpha,y>/|alpha|^2 alpha.
Vector reflect(std::span<const double> alpha, std::span<const double> y);

double dot(std::span<const double> a, std::span<const double> b);

struct AxiomReport {
  bool normalized = true;
  bool reduced = true;       // R cap R.alpha = {alpha, -alpha}
  bool closed = true;        // sigma_alpha(R) = R
  bool positive_split = true;
  double max_closure_defect = 0.0;
  bool ok() const { return normalized && reduced && closed && positive_split; }
};

AxiomReport check_axioms(const RootSystemData& roots, double tol = 1e-12);

/// Nonnegative multiplicity, one value per orbit label.
class MultiplicityFunction {
 public:
  MultiplicityFunction() = default;
  explicit MultiplicityFunction(std::vector<double> per_orbit);

  double operator()(int orbit) const { return values_.at(static_cast<std::size_t>(orbit)); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Root system + multiplicity: defines gamma and the weight w_k.
class WeightContext {
 public:
  WeightContext(RootSystemData roots, MultiplicityFunction k);

  const RootSystemData& root_system() const { return roots_; }
  const MultiplicityFunction& multiplicity() const { return k_; }
  int dimension() const { return roots_.dimension(); }
  double gamma() const { return gamma_; }
  double homogeneity_degree() const { return 2.0 * gamma_; }
  /// 2 gamma + d, the homogeneous dimension of mu_k.
  double homogeneous_dimension() const { return 2.0 * gamma_ + dimension(); }
  /// k(alpha) for the i-th positive root.
  double positive_multiplicity(std::size_t i) const;
  bool is_trivial() const { return gamma_ == 0.0; }

  /// Product form w_k(y) = prod_j 2^{k_j} |y_j|^{2k_j}: every positive root
  /// with k > 0 lies on a distinct coordinate axis.
  bool is_product() const { return product_; }
  /// Per-axis multiplicities k_j (valid when is_product()).
  const std::vector<double>& axis_multiplicities() const { return axis_k_; }

 private:
  RootSystemData roots_;
  MultiplicityFunction k_;
  double gamma_ = 0.0;
  bool product_ = false;
  std::vector<double> axis_k_;
};

/// w_k(y) = prod_{alpha in R+} |<alpha,y>|^{2k(alpha)}.
double weight_eval(const WeightContext& ctx, std::span<const double> y);

inline double gamma_index(const WeightContext& ctx) { return ctx.gamma(); }

}  // namespace dunkl

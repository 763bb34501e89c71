#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dunkl/measure.hpp"

namespace dunkl {

using MultiIndex = std::vector<int>;

/// All multi-indices in N^d with |l| <= max_degree, graded then lexicographic.
std::vector<MultiIndex> multi_indices(int d, int max_degree);
/// Multi-indices with |l| == degree.
std::vector<MultiIndex> multi_indices_of_degree(int d, int degree);

/// floor((2 gamma + d)(1/p - 1)), with values within 1e-9 of an integer snapped to it.
int compute_N(double p, double gamma, int d);

/// Smooth bump exp(-1/(1 - s^2)) for |s| < 1, else 0.
double bump(double s);

struct AtomSpec {
  double p = 1.0;
  int s = 0;  // cancellation order, s >= N
  int N = 0;
  double r = 1.0;
  std::uint64_t seed = 0;

  /// Fills N from (p, gamma, d) and s = N + extra_order.
  static AtomSpec make(const MeasureContext& ctx, double p, double r, std::uint64_t seed, int extra_order = 0);
  void validate(const MeasureContext& ctx) const;
};

/// a(y) = lambda psi(|y|/r) P(y/r) with P = sum_l coef_l u^l, deg P = s + 1.
/// Moments of a vanish through order s; sup |a| = mu_k(B(0,r))^{-1/p}.
struct Atom {
  AtomSpec spec;
  int dimension = 1;
  std::vector<MultiIndex> indices;
  std::vector<double> unit_coefficients;  // coefficients of P in u = y / r
  double lambda = 0.0;
  double sup_norm = 0.0;
  double unit_sup = 0.0;                 // sup |psi P| on the unit ball
  std::vector<double> moment_residuals;  // scaled, one per |l| <= N

  double operator()(std::span<const double> y) const;
  /// psi(|u|) P(u): the shape on the unit ball without lambda.
  double unit_shape(std::span<const double> u) const;
  /// Coefficients in y (c_l = lambda coef_l / r^{|l|}).
  std::vector<double> coefficients() const;
  int degree() const { return spec.s + 1; }

  static Atom zero(const AtomSpec& spec, int dimension);
};

struct AtomCertificate {
  bool support_ok = false;
  bool size_ok = false;
  bool moments_ok = false;
  double measured_sup = 0.0;
  double size_bound = 0.0;  // mu_k(B)^{-1/p}
  double size_ratio = 0.0;  // measured_sup / size_bound
  double max_moment_residual = 0.0;
  std::vector<double> moment_residuals;
  bool pass() const { return support_ok && size_ok && moments_ok; }
};

inline constexpr double kMomentTolerance = 1e-9;
inline constexpr double kSizeTolerance = 1e-12;

/// Gram-projection construction; throws ConstructionError or CertificationError.
Atom construct_atom(const MeasureContext& ctx, const AtomSpec& spec);

/// Re-checks (i)-(iii) with an independent (tensor box) rule and a separate sup search.
AtomCertificate verify_atom(const MeasureContext& ctx, const Atom& atom);

/// sup |f| over the closed unit ball, by grid sampling plus local refinement.
/// `resolution` is the number of grid points per axis.
double unit_ball_sup(const std::function<double(std::span<const double>)>& f, int d, int resolution);

std::string atom_to_json(const Atom& atom, const AtomCertificate* cert = nullptr);
Atom atom_from_json(const std::string& text);

}  // namespace dunkl

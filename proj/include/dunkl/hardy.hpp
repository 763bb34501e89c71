#pragma once

#include <boost/rational.hpp>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dunkl/atoms.hpp"
#include "dunkl/measure.hpp"

namespace dunkl {

/// The admissible strip (2gamma+d)(2-p) <= sigma < 2gamma+d+p(N+1).
struct StripSpec {
  double p = 1.0;
  double gamma = 0.0;
  int d = 1;
  int N = 0;
  double D = 1.0;  // 2 gamma + d
  double sigma_min = 0.0;
  double sigma_max = 0.0;

  bool nonempty() const { return sigma_max > sigma_min; }
  bool contains(double sigma) const { return sigma >= sigma_min && sigma < sigma_max; }
};

StripSpec strip(double p, double gamma, int d);

/// True when sigma is the critical exponent (2gamma+d)(2-p) up to 1e-12 relative.
bool is_critical(const StripSpec& s, double sigma);

struct RhoWindow {
  double log_lo = 0.0;
  double log_hi = 0.0;
};

/// Window of admissible log rho for 0 < r < 1; nullopt when empty.
std::optional<RhoWindow> rho_window(double r, const StripSpec& s, double sigma);

/// rho = 1/r at the critical sigma; r^{(D - p(N+1+D))/(D + p(N+1) - sigma)}
/// for r >= 1; exp(midpoint of rho_window) for r < 1.
double rho_choice(double r, const StripSpec& s, double sigma);

struct Envelopes {
  double env1 = 0.0;  // r^{r_exp1} rho^{rho_exp1}
  double env2 = 0.0;
  double r_exp1 = 0.0, rho_exp1 = 0.0;
  double r_exp2 = 0.0, rho_exp2 = 0.0;
};

/// Unit-constant power laws bounding S1 and S2.
Envelopes envelopes(double r, double rho, const StripSpec& s, double sigma);

using Rational = boost::rational<long long>;

struct ExactStrip {
  long long N = 0;
  Rational D, sigma_min, sigma_max;
  Rational c_lo, c_hi;  // log rho window = [c_lo log r, c_hi log r]
  bool strip_nonempty = false;
  bool sigma_in_strip = false;
  bool window_nonempty = false;  // for every 0 < r < 1, i.e. c_lo >= c_hi
};

/// Strip and window arithmetic in exact rationals.
ExactStrip exact_strip(Rational p, Rational gamma, int d, Rational sigma);

struct ProfileOptions {
  int series_terms = 24;    // moment-series degree for t <= 1
  int panel_nodes = 24;     // Chebyshev nodes per far-field panel
  double panel_width = 8.0;
  double t_cap = 2048.0;
  int base_order = 64;      // transform quadrature base order
};

/// G(eta) = F_D(psi(|u|) P(u))(eta): the transform of an atom's unit shape
/// (lambda = 1, r = 1). For t = |eta| <= 1 it is summed from the moment
/// series (moments through order s set to exactly 0); beyond, it is
/// Chebyshev-interpolated from quadrature values on panels along a few
/// directions. In d = 2 the angular dependence is a trigonometric polynomial
/// of degree <= deg P, so 2 deg P + 1 directions determine it.
class FrequencyProfile {
 public:
  FrequencyProfile(const MeasureContext& ctx, const Atom& atom, ProfileOptions options = {});

  std::complex<double> operator()(std::span<const double> eta) const;
  /// G(t (cos theta, sin theta)); in d = 1 theta = 0 or pi selects the sign.
  std::complex<double> polar(double t, double theta) const;

  /// A(t) = int_{S^{d-1}} |G(t omega)|^p w_k(omega) d omega (memoized).
  double angular_mass(double t) const;

  double p() const { return p_; }
  int dimension() const { return d_; }
  double homogeneous_dimension() const { return D_; }
  /// Lowest possibly nonzero degree of G at the origin (s + 1).
  int leading_degree() const { return lead_; }
  double t_max() const { return t_max_; }
  double max_modulus() const { return max_mod_; }
  /// Relative mismatch of series and quadrature at t = 1.
  double seam_mismatch() const { return seam_; }
  /// Radii where G vanishes along every sampled direction (kinks of A).
  const std::vector<double>& radial_zeros() const { return zeros_; }
  /// Far-field panel boundaries, ascending, starting at 1.
  const std::vector<double>& panel_edges() const { return edges_; }
  bool vanishes() const { return max_mod_ == 0.0; }

 private:
  struct Panel {
    double lo, hi;
    std::vector<std::vector<double>> re, im;  // Chebyshev coefficients per direction
  };
  std::complex<double> series(std::span<const double> eta) const;
  std::vector<std::complex<double>> directions_at(double t) const;
  std::complex<double> interpolate(const std::vector<std::complex<double>>& dir, double theta) const;
  void find_zeros(const Panel& panel);

  const MeasureContext* ctx_;
  double p_;
  int d_;
  double D_;
  int lead_;
  int degree_;  // deg P
  std::vector<double> angles_;
  struct Term {
    MultiIndex l;
    int degree;
    double coef;  // c_k tau_l m_l
  };
  std::vector<Term> terms_;
  std::vector<Panel> panels_;
  std::vector<double> edges_;
  std::vector<double> zeros_;
  double t_max_ = 1.0;
  double max_mod_ = 0.0;
  double seam_ = 0.0;
  mutable std::mutex memo_mutex_;
  mutable std::unordered_map<double, double> memo_;
};

struct HardyValue {
  double value = 0.0;
  double inner_tail = 0.0;       // analytic part below the inner cutoff
  double inner_remainder = 0.0;  // model uncertainty of that part
  double outer_remainder = 0.0;  // estimate beyond the profile range
  bool certified = false;        // both remainders below 1e-8 of value
};

struct DivergenceReport {
  double slope = 0.0;           // d log I(eps) / d log eps
  double expected_slope = 0.0;  // p(N+1) - sigma + 2gamma + d
  std::vector<std::pair<double, double>> partial;  // (eps, I(eps)), frequency units
};

using HardyResult = std::variant<HardyValue, DivergenceReport>;

struct SplitResult {
  double S1 = 0.0;
  double S2 = 0.0;
  double total = 0.0;  // computed separately, without the split
  double mismatch = 0.0;  // |S1 + S2 - total| / total
};

/// Hardy functional int |F_D a|^p |xi|^{-sigma} dmu_k for one atom. Uses the
/// dilation identity F_D a(xi) = lambda r^D G(r xi) with G the unit-shape
/// profile, so profiles can be shared by atoms that differ only in r.
class HardyEvaluator {
 public:
  static constexpr int kInnerLevels = 40;
  static constexpr int kProbeLevels = 80;

  HardyEvaluator(const MeasureContext& ctx, const Atom& atom,
                 std::shared_ptr<const FrequencyProfile> profile = nullptr);

  HardyResult integral(double sigma) const;
  /// S1 over |xi| < rho, S2 over |xi| >= rho; throws DivergenceError when
  /// the inner region diverges.
  SplitResult split(double sigma, double rho) const;
  DivergenceReport divergence(double sigma) const;

  /// (lambda r^D)^p r^{sigma - D}: converts unit-profile integrals.
  double scale(double sigma) const;
  const FrequencyProfile& profile() const { return *profile_; }

 private:
  struct UnitParts {
    double tail, tail_remainder, body, outer;
  };
  double inner_exponent(double sigma) const;
  /// int_a^b A(t) t^{D-1-sigma} dt over panels between 2^{-levels} and t_max.
  double radial(double sigma, double a, double b, bool alternate) const;
  UnitParts unit_integral(double sigma, bool alternate) const;
  double inner_coefficient(double* discrepancy) const;

  const MeasureContext* ctx_;
  Atom atom_;
  std::shared_ptr<const FrequencyProfile> profile_;
};

HardyResult hardy_integral(const MeasureContext& ctx, const Atom& atom, double sigma, double p);
SplitResult split(const MeasureContext& ctx, const Atom& atom, double sigma, double rho);

}  // namespace dunkl

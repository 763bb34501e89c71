#include "dunkl/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "dunkl/errors.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/transform.hpp"

namespace dunkl {

namespace {

constexpr double kPi = std::numbers::pi;

bool close_to(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::vector<double> cheb_nodes(int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = std::cos(kPi * (k + 0.5) / n);
  return x;
}

std::vector<double> cheb_coefficients(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<double> c(f.size(), 0.0);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += f[static_cast<std::size_t>(k)] * std::cos(kPi * j * (k + 0.5) / n);
    c[static_cast<std::size_t>(j)] = 2.0 * s / n;
  }
  c[0] *= 0.5;
  return c;
}

double clenshaw(const std::vector<double>& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c[0];
}

// Sign changes of f on n equal steps of [a, b], refined by bisection.
std::vector<double> sign_roots(const std::function<double(double)>& f, double a, double b, int n) {
  std::vector<double> roots;
  double x0 = a, f0 = f(a);
  for (int i = 1; i <= n; ++i) {
    const double x1 = a + (b - a) * i / n;
    const double f1 = f(x1);
    if ((f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Rational floor_rational(const Rational& q) {
  long long n = q.numerator(), d = q.denominator();
  long long f = n / d;
  if ((n % d != 0) && (n < 0)) --f;
  return Rational(f);
}

}  // namespace

StripSpec strip(double p, double gamma, int d) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("strip: p must lie in (0, 1]");
  if (d < 1) throw DomainError("strip: d must be >= 1");
  if (!(gamma >= 0.0)) throw DomainError("strip: gamma must be >= 0");
  StripSpec s;
  s.p = p;
  s.gamma = gamma;
  s.d = d;
  s.N = compute_N(p, gamma, d);
  s.D = 2.0 * gamma + d;
  s.sigma_min = s.D * (2.0 - p);
  s.sigma_max = s.D + p * (s.N + 1);
  return s;
}

bool is_critical(const StripSpec& s, double sigma) { return close_to(sigma, s.sigma_min); }

std::optional<RhoWindow> rho_window(double r, const StripSpec& s, double sigma) {
  const double den_lo = s.D * (2.0 - s.p) - 2.0 * sigma;
  const double den_hi = s.D + s.p * (s.N + 1) - sigma;
  if (den_lo == 0.0 || den_hi == 0.0) return std::nullopt;
  const double lr = std::log(r);
  RhoWindow w;
  w.log_lo = s.D * (2.0 - s.p) / den_lo * lr;
  w.log_hi = (s.D - s.p * (s.N + s.D + 1.0)) / den_hi * lr;
  if (w.log_lo > w.log_hi) return std::nullopt;
  return w;
}

double rho_choice(double r, const StripSpec& s, double sigma) {
  if (!(r > 0.0)) throw DomainError("rho_choice: r must be > 0");
  if (!(sigma >= s.sigma_min - 1e-12 * std::max(1.0, s.sigma_min) && sigma < s.sigma_max))
    throw DomainError("rho_choice: sigma outside the strip");
  if (is_critical(s, sigma)) return 1.0 / r;
  if (r >= 1.0) return std::pow(r, (s.D - s.p * (s.N + 1 + s.D)) / (s.D + s.p * (s.N + 1) - sigma));
  const auto w = rho_window(r, s, sigma);
  if (!w) throw Error("rho_choice: empty rho window inside the strip");
  return std::exp(0.5 * (w->log_lo + w->log_hi));
}

Envelopes envelopes(double r, double rho, const StripSpec& s, double sigma) {
  Envelopes e;
  e.r_exp1 = -s.D + s.p * (s.N + s.D + 1.0);
  e.rho_exp1 = s.D + s.p * (s.N + 1) - sigma;
  e.r_exp2 = -s.D * (2.0 - s.p) / 2.0;
  e.rho_exp2 = s.D * (2.0 - s.p) / 2.0 - sigma;
  e.env1 = std::exp(e.r_exp1 * std::log(r) + e.rho_exp1 * std::log(rho));
  e.env2 = std::exp(e.r_exp2 * std::log(r) + e.rho_exp2 * std::log(rho));
  return e;
}

ExactStrip exact_strip(Rational p, Rational gamma, int d, Rational sigma) {
  if (p <= Rational(0) || p > Rational(1)) throw DomainError("exact_strip: p must lie in (0, 1]");
  if (gamma < Rational(0) || d < 1) throw DomainError("exact_strip: invalid gamma or d");
  ExactStrip e;
  e.D = Rational(2) * gamma + Rational(d);
  e.N = floor_rational(e.D * (Rational(1) / p - Rational(1))).numerator();
  const Rational n1(e.N + 1);
  e.sigma_min = e.D * (Rational(2) - p);
  e.sigma_max = e.D + p * n1;
  e.strip_nonempty = e.sigma_max > e.sigma_min;
  e.sigma_in_strip = sigma >= e.sigma_min && sigma < e.sigma_max;
  const Rational den_lo = e.D * (Rational(2) - p) - Rational(2) * sigma;
  const Rational den_hi = e.D + p * n1 - sigma;
  if (den_lo != Rational(0) && den_hi != Rational(0)) {
    e.c_lo = e.D * (Rational(2) - p) / den_lo;
    e.c_hi = (e.D - p * (Rational(e.N) + e.D + Rational(1))) / den_hi;
    e.window_nonempty = e.c_lo >= e.c_hi;
  }
  return e;
}

// FrequencyProfile

FrequencyProfile::FrequencyProfile(const MeasureContext& ctx, const Atom& atom, ProfileOptions options)
    : ctx_(&ctx),
      p_(atom.spec.p),
      d_(ctx.dimension()),
      D_(ctx.homogeneous_dimension()),
      lead_(atom.spec.s + 1),
      degree_(atom.degree()) {
  if (d_ > 2) throw CapabilityError("FrequencyProfile: d <= 2 only");
  if (atom.dimension != d_) throw ConfigError("FrequencyProfile: atom dimension mismatch");
  bool zero = true;
  for (double c : atom.unit_coefficients) zero = zero && c == 0.0;
  if (zero) return;

  const KernelContext kernel = KernelContext::automatic(ctx.weights());
  const int L = std::max(options.series_terms, lead_);

  // Moments of the unit shape against u^l.
  const QuadratureRule ball = build_rule(ctx, Domain::ball(1.0), 96);
  const auto indices = multi_indices(d_, L);
  std::vector<double> moments(indices.size(), 0.0);
  {
    std::vector<std::vector<double>> terms(indices.size(), std::vector<double>(ball.size()));
    std::vector<double> pw(static_cast<std::size_t>(d_ * (L + 1)));
    for (std::size_t i = 0; i < ball.size(); ++i) {
      const auto u = ball.node(i);
      const double v = ball.mu_weights[i] * atom.unit_shape(u);
      for (int j = 0; j < d_; ++j) {
        double x = 1.0;
        for (int n = 0; n <= L; ++n) {
          pw[static_cast<std::size_t>(j * (L + 1) + n)] = x;
          x *= u[static_cast<std::size_t>(j)];
        }
      }
      for (std::size_t m = 0; m < indices.size(); ++m) {
        double x = v;
        for (int j = 0; j < d_; ++j) x *= pw[static_cast<std::size_t>(j * (L + 1) + indices[m][static_cast<std::size_t>(j)])];
        terms[m][i] = x;
      }
    }
    for (std::size_t m = 0; m < indices.size(); ++m) moments[m] = pairwise_sum(terms[m]);
  }
  std::vector<std::vector<double>> taylor;
  for (int j = 0; j < d_; ++j) taylor.push_back(kernel.axis_taylor(j, L));
  const double ck = ctx.mehta_constant();
  for (std::size_t m = 0; m < indices.size(); ++m) {
    int deg = 0;
    double tau = 1.0;
    for (int j = 0; j < d_; ++j) {
      const int lj = indices[m][static_cast<std::size_t>(j)];
      deg += lj;
      tau *= taylor[static_cast<std::size_t>(j)][static_cast<std::size_t>(lj)];
    }
    if (deg < lead_) continue;
    terms_.push_back({indices[m], deg, ck * tau * moments[m]});
  }
  std::stable_sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.degree > b.degree; });

  if (d_ == 1) {
    angles_ = {0.0, kPi};
  } else {
    const int M = 2 * degree_ + 1;
    for (int m = 0; m < M; ++m) angles_.push_back(2.0 * kPi * m / M);
  }

  // Near-field maximum from the series.
  for (int i = 1; i <= 64; ++i) {
    const double t = i / 64.0;
    for (const auto& g : directions_at(t)) max_mod_ = std::max(max_mod_, std::abs(g));
  }

  const TransformPlan plan(ctx, 1.0, options.base_order);
  const BoundTransform bound(plan, [&atom](std::span<const double> u) { return atom.unit_shape(u); });
  const auto xs = cheb_nodes(options.panel_nodes);
  const auto sample_panel = [&](double lo, double hi) {
    Panel panel{lo, hi, {}, {}};
    std::vector<double> ts(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ts[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * xs[i];
    double pmax = 0.0;
    for (double th : angles_) {
      std::vector<std::complex<double>> v;
      if (d_ == 1) {
        const double w = std::cos(th) > 0.0 ? 1.0 : -1.0;
        v = bound.along_ray(std::span<const double>(&w, 1), ts);
      } else {
        const double om[2] = {std::cos(th), std::sin(th)};
        v = bound.along_ray(std::span<const double>(om, 2), ts);
      }
      std::vector<double> re(v.size()), im(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] = v[i].real();
        im[i] = v[i].imag();
        pmax = std::max(pmax, std::abs(v[i]));
      }
      panel.re.push_back(cheb_coefficients(re));
      panel.im.push_back(cheb_coefficients(im));
    }
    return std::make_pair(panel, pmax);
  };

  const double threshold = std::max(1e-14, std::pow(1e-10, 1.0 / p_));
  double lo = 1.0;
  edges_.push_back(1.0);
  while (lo < options.t_cap) {
    const double hi = lo < 8.0 ? 2.0 * lo : lo + options.panel_width;
    auto [panel, pmax] = sample_panel(lo, hi);
    max_mod_ = std::max(max_mod_, pmax);
    panels_.push_back(std::move(panel));
    edges_.push_back(hi);
    lo = hi;
    if (hi >= 16.0 && pmax <= threshold * max_mod_) break;
  }
  t_max_ = lo;

  {
    double mismatch = 0.0;
    for (std::size_t a = 0; a < angles_.size(); ++a) {
      double eta[2] = {std::cos(angles_[a]), std::sin(angles_[a])};
      if (d_ == 1) eta[0] = eta[0] > 0.0 ? 1.0 : -1.0;
      const auto s = series(std::span<const double>(eta, static_cast<std::size_t>(d_)));
      const Panel& P = panels_.front();
      const std::complex<double> f(clenshaw(P.re[a], -1.0), clenshaw(P.im[a], -1.0));
      mismatch = std::max(mismatch, std::abs(s - f));
    }
    seam_ = mismatch / max_mod_;
  }

  // Radial zeros: near field from the series, far field from the panels.
  {
    const auto along = [&](double t) { return directions_at(t); };
    std::size_t ref = 0;
    std::vector<double> re_max(angles_.size(), 0.0), im_max(angles_.size(), 0.0);
    for (int i = 1; i <= 256; ++i) {
      const double t = t_max_ * i / 256.0;
      const auto g = along(t);
      for (std::size_t a = 0; a < g.size(); ++a) {
        re_max[a] = std::max(re_max[a], std::abs(g[a].real()));
        im_max[a] = std::max(im_max[a], std::abs(g[a].imag()));
      }
    }
    for (std::size_t a = 1; a < angles_.size(); ++a)
      if (std::max(re_max[a], im_max[a]) > std::max(re_max[ref], im_max[ref])) ref = a;
    const bool use_re = re_max[ref] >= im_max[ref];
    const auto comp = [&](double t) {
      const auto g = along(t)[ref];
      return use_re ? g.real() : g.imag();
    };
    std::vector<double> cand;
    for (double t : sign_roots(comp, 1e-3, 1.0, 64)) cand.push_back(t);
    for (const auto& P : panels_)
      for (double t : sign_roots(comp, P.lo, P.hi, 4 * options.panel_nodes)) cand.push_back(t);
    for (double t : cand) {
      bool all = true;
      for (const auto& g : along(t)) all = all && std::abs(g) <= 1e-9 * max_mod_;
      if (all && (zeros_.empty() || t - zeros_.back() > 1e-12 * t)) zeros_.push_back(t);
    }
  }
}

std::complex<double> FrequencyProfile::series(std::span<const double> eta) const {
  // Grouped by degree, highest first, then multiplied by (-i)^n.
  std::complex<double> total = 0.0;
  std::size_t i = 0;
  while (i < terms_.size()) {
    const int deg = terms_[i].degree;
    double s = 0.0;
    for (; i < terms_.size() && terms_[i].degree == deg; ++i) {
      double x = terms_[i].coef;
      for (int j = 0; j < d_; ++j) x *= std::pow(eta[static_cast<std::size_t>(j)], terms_[i].l[static_cast<std::size_t>(j)]);
      s += x;
    }
    static const std::complex<double> phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    total += phase[deg % 4] * s;
  }
  return total;
}

std::vector<std::complex<double>> FrequencyProfile::directions_at(double t) const {
  std::vector<std::complex<double>> out(angles_.size(), 0.0);
  if (vanishes() && terms_.empty()) return out;
  if (t <= 1.0) {
    for (std::size_t a = 0; a < angles_.size(); ++a) {
      double eta[2] = {t * std::cos(angles_[a]), t * std::sin(angles_[a])};
      if (d_ == 1) eta[0] = angles_[a] == 0.0 ? t : -t;
      out[a] = series(std::span<const double>(eta, static_cast<std::size_t>(d_)));
    }
    return out;
  }
  if (t >= t_max_) return out;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  const Panel& P = panels_[std::min(k, panels_.size() - 1)];
  const double x = std::clamp((2.0 * t - P.lo - P.hi) / (P.hi - P.lo), -1.0, 1.0);
  for (std::size_t a = 0; a < angles_.size(); ++a) out[a] = {clenshaw(P.re[a], x), clenshaw(P.im[a], x)};
  return out;
}

std::complex<double> FrequencyProfile::interpolate(const std::vector<std::complex<double>>& dir, double theta) const {
  if (d_ == 1) return std::cos(theta) > 0.0 ? dir[0] : dir[1];
  const int M = static_cast<int>(dir.size());
  const int K = (M - 1) / 2;
  std::complex<double> g = 0.0;
  for (int n = -K; n <= K; ++n) {
    std::complex<double> c = 0.0;
    for (int m = 0; m < M; ++m) c += dir[static_cast<std::size_t>(m)] * std::polar(1.0, -n * angles_[static_cast<std::size_t>(m)]);
    g += c * std::polar(1.0, n * theta);
  }
  return g / static_cast<double>(M);
}

std::complex<double> FrequencyProfile::operator()(std::span<const double> eta) const {
  if (static_cast<int>(eta.size()) != d_) throw DomainError("FrequencyProfile: dimension mismatch");
  double t = 0.0;
  for (double v : eta) t += v * v;
  t = std::sqrt(t);
  if (t <= 1.0) return terms_.empty() ? std::complex<double>(0.0) : series(eta);
  const double theta = d_ == 1 ? (eta[0] > 0.0 ? 0.0 : kPi) : std::atan2(eta[1], eta[0]);
  return interpolate(directions_at(t), theta);
}

std::complex<double> FrequencyProfile::polar(double t, double theta) const {
  return interpolate(directions_at(t), theta);
}

double FrequencyProfile::angular_mass(double t) const {
  if (vanishes()) return 0.0;
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
  }
  const auto dir = directions_at(t);
  double A = 0.0;
  if (d_ == 1) {
    const double plus = 1.0, minus = -1.0;
    A = weight_eval(ctx_->weights(), std::span<const double>(&plus, 1)) * std::pow(std::abs(dir[0]), p_) +
        weight_eval(ctx_->weights(), std::span<const double>(&minus, 1)) * std::pow(std::abs(dir[1]), p_);
  } else {
    // Trigonometric coefficients, then zeros of the dominant component.
    const int M = static_cast<int>(dir.size());
    const int K = (M - 1) / 2;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(M));
    for (int n = -K; n <= K; ++n) {
      std::complex<double> s = 0.0;
      for (int m = 0; m < M; ++m) s += dir[static_cast<std::size_t>(m)] * std::polar(1.0, -n * angles_[static_cast<std::size_t>(m)]);
      c[static_cast<std::size_t>(n + K)] = s / static_cast<double>(M);
    }
    const auto g = [&](double th) {
      std::complex<double> v = 0.0;
      for (int n = -K; n <= K; ++n) v += c[static_cast<std::size_t>(n + K)] * std::polar(1.0, n * th);
      return v;
    };
    double re_max = 0.0, im_max = 0.0;
    for (const auto& v : dir) {
      re_max = std::max(re_max, std::abs(v.real()));
      im_max = std::max(im_max, std::abs(v.imag()));
    }
    std::vector<ArcBreak> breaks;
    const double big = std::max(re_max, im_max);
    if (big > 0.0) {
      const bool use_re = re_max >= im_max;
      const double other = use_re ? im_max : re_max;
      const auto comp = [&](double th) {
        const auto v = g(th);
        return use_re ? v.real() : v.imag();
      };
      for (double th : sign_roots(comp, 0.0, 2.0 * kPi, 16 * M + 32)) {
        const auto v = g(th);
        if (other <= 1e-12 * big || std::abs(use_re ? v.imag() : v.real()) <= 1e-9 * big) breaks.push_back({th, p_});
      }
    }
    const auto nodes = circle_nodes(ctx_->weights(), 24, breaks);
    std::vector<double> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = nodes[i].mu_weight * std::pow(std::abs(g(nodes[i].t)), p_);
    A = pairwise_sum(terms);
  }
  std::lock_guard lock(memo_mutex_);
  memo_.emplace(t, A);
  return A;
}

// HardyEvaluator

HardyEvaluator::HardyEvaluator(const MeasureContext& ctx, const Atom& atom,
                               std::shared_ptr<const FrequencyProfile> profile)
    : ctx_(&ctx), atom_(atom), profile_(std::move(profile)) {
  if (!profile_) profile_ = std::make_shared<FrequencyProfile>(ctx, atom);
  if (profile_->dimension() != ctx.dimension()) throw ConfigError("HardyEvaluator: profile dimension mismatch");
}

double HardyEvaluator::scale(double sigma) const {
  const double D = ctx_->homogeneous_dimension();
  const double lr = std::log(atom_.spec.r);
  return std::exp(atom_.spec.p * (std::log(atom_.lambda) + D * lr) + (sigma - D) * lr);
}

double HardyEvaluator::inner_exponent(double sigma) const {
  return ctx_->homogeneous_dimension() - sigma + atom_.spec.p * profile_->leading_degree();
}

double HardyEvaluator::radial(double sigma, double a, double b, bool alternate) const {
  const auto& P = *profile_;
  if (!(b > a)) return 0.0;
  std::vector<double> pts;
  for (int j = kProbeLevels; j >= 1; --j) pts.push_back(std::ldexp(1.0, -j));
  for (double e : P.panel_edges()) pts.push_back(e);
  const auto& zeros = P.radial_zeros();
  for (double z : zeros) pts.push_back(z);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const auto is_zero = [&](double t) { return std::binary_search(zeros.begin(), zeros.end(), t); };
  const double e = ctx_->homogeneous_dimension() - 1.0 - sigma;
  const int n_plain = alternate ? 24 : 16;
  const int n_jacobi = alternate ? 28 : 20;
  std::vector<double> terms;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = std::max(pts[i], a), hi = std::min(pts[i + 1], b);
    if (!(hi > lo)) continue;
    const double zlo = (lo == pts[i] && is_zero(lo)) ? P.p() : 0.0;
    const double zhi = (hi == pts[i + 1] && is_zero(hi)) ? P.p() : 0.0;
    const JacobiRule& g = (zlo > 0.0 || zhi > 0.0) ? gauss_jacobi(n_jacobi, zhi, zlo) : gauss_jacobi(n_plain, 0.0, 0.0);
    const double h = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      const double x = g.nodes[n];
      const double t = mid + h * x;
      const double jac = std::pow(1.0 - x, zhi) * std::pow(1.0 + x, zlo);
      const double v = h * g.weights[n] / jac * P.angular_mass(t) * std::pow(t, e);
      if (!std::isfinite(v)) throw EvaluationError("hardy: radial integrand is not finite");
      terms.push_back(v);
    }
  }
  return pairwise_sum(terms);
}

double HardyEvaluator::inner_coefficient(double* discrepancy) const {
  const double t_in = std::ldexp(1.0, -kInnerLevels);
  const double q = atom_.spec.p * profile_->leading_degree();
  const double AL = profile_->angular_mass(t_in) / std::pow(t_in, q);
  const double A2 = profile_->angular_mass(2.0 * t_in) / std::pow(2.0 * t_in, q);
  if (discrepancy) *discrepancy = AL > 0.0 ? std::abs(A2 / AL - 1.0) : 0.0;
  return AL;
}

HardyEvaluator::UnitParts HardyEvaluator::unit_integral(double sigma, bool alternate) const {
  const double t_in = std::ldexp(1.0, -kInnerLevels);
  const double t_max = profile_->t_max();
  const double b = inner_exponent(sigma);
  double disc = 0.0;
  const double AL = inner_coefficient(&disc);
  UnitParts u{};
  u.tail = AL * std::pow(t_in, b) / b;
  u.tail_remainder = disc * u.tail;
  u.body = radial(sigma, t_in, t_max, alternate);
  const double c1 = radial(sigma, 0.5 * t_max, t_max, alternate);
  const double c0 = radial(sigma, 0.25 * t_max, 0.5 * t_max, alternate);
  const double ratio = c0 > 0.0 ? c1 / c0 : 1.0;
  u.outer = ratio < 1.0 ? c1 * ratio / (1.0 - ratio) : c1;
  return u;
}

HardyResult HardyEvaluator::integral(double sigma) const {
  if (!std::isfinite(sigma)) throw DomainError("hardy_integral: sigma must be finite");
  if (profile_->vanishes()) {
    HardyValue v;
    v.certified = true;
    return v;
  }
  if (inner_exponent(sigma) <= 0.0) return divergence(sigma);
  const UnitParts u = unit_integral(sigma, false);
  const double s = scale(sigma);
  HardyValue v;
  v.value = s * (u.tail + u.body);
  v.inner_tail = s * u.tail;
  v.inner_remainder = s * u.tail_remainder;
  v.outer_remainder = s * u.outer;
  v.certified = v.inner_remainder <= 1e-8 * v.value && v.outer_remainder <= 1e-8 * v.value;
  return v;
}

SplitResult HardyEvaluator::split(double sigma, double rho) const {
  if (!(rho > 0.0)) throw DomainError("split: rho must be > 0");
  SplitResult out;
  if (profile_->vanishes()) return out;
  const double b = inner_exponent(sigma);
  if (b <= 0.0) throw DivergenceError("split: inner region diverges (exponent " + std::to_string(b) + ")");
  const double t_in = std::ldexp(1.0, -kInnerLevels);
  const double t_max = profile_->t_max();
  const double ts = atom_.spec.r * rho;
  const double AL = inner_coefficient(nullptr);
  double s1 = 0.0, s2 = 0.0;
  if (ts <= t_in) {
    s1 = AL * std::pow(ts, b) / b;
    s2 = AL * (std::pow(t_in, b) - std::pow(ts, b)) / b + radial(sigma, t_in, t_max, false);
  } else {
    s1 = AL * std::pow(t_in, b) / b + radial(sigma, t_in, std::min(ts, t_max), false);
    s2 = ts < t_max ? radial(sigma, ts, t_max, false) : 0.0;
  }
  const UnitParts u = unit_integral(sigma, true);
  const double s = scale(sigma);
  out.S1 = s * s1;
  out.S2 = s * s2;
  out.total = s * (u.tail + u.body);
  out.mismatch = out.total > 0.0 ? std::abs(out.S1 + out.S2 - out.total) / out.total : 0.0;
  return out;
}

DivergenceReport HardyEvaluator::divergence(double sigma) const {
  DivergenceReport rep;
  rep.expected_slope = inner_exponent(sigma);
  if (profile_->vanishes()) return rep;
  const double s = scale(sigma);
  const double r = atom_.spec.r;
  std::vector<double> lx, ly;
  for (int L = kInnerLevels; L <= kProbeLevels; L += 4) {
    const double eps = std::ldexp(1.0, -L);
    const double I = radial(sigma, eps, profile_->t_max(), false);
    rep.partial.emplace_back(eps / r, s * I);
    lx.push_back(std::log(eps / r));
    ly.push_back(std::log(s * I));
  }
  rep.slope = ols_slope(lx, ly);
  return rep;
}

HardyResult hardy_integral(const MeasureContext& ctx, const Atom& atom, double sigma, double p) {
  if (std::abs(p - atom.spec.p) > 1e-15) throw ConfigError("hardy_integral: p must equal the atom's p");
  return HardyEvaluator(ctx, atom).integral(sigma);
}

SplitResult split(const MeasureContext& ctx, const Atom& atom, double sigma, double rho) {
  return HardyEvaluator(ctx, atom).split(sigma, rho);
}

}  // namespace dunkl

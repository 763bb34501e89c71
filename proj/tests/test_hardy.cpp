#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "dunkl/errors.hpp"
#include "dunkl/hardy.hpp"
#include "dunkl/transform.hpp"

using namespace dunkl;

namespace {

MeasureContext z2(std::vector<double> k) {
  const int d = static_cast<int>(k.size());
  return MeasureContext(WeightContext(build_root_system(Preset::Z2Product, d), MultiplicityFunction(std::move(k))));
}

double value_of(const HardyResult& r) { return std::get<HardyValue>(r).value; }

}  // namespace

TEST_CASE("strip examples") {
  const StripSpec a = strip(1.0, 0.0, 1);
  CHECK(a.N == 0);
  CHECK(a.sigma_min == doctest::Approx(1.0));
  CHECK(a.sigma_max == doctest::Approx(2.0));
  CHECK(a.nonempty());
  const StripSpec b = strip(2.0 / 3.0, 0.0, 2);
  CHECK(b.N == 1);
  CHECK(b.sigma_min == doctest::Approx(8.0 / 3.0));
  CHECK(b.sigma_max == doctest::Approx(10.0 / 3.0));
  CHECK_THROWS_AS(strip(1.5, 0.0, 1), DomainError);
  CHECK_THROWS_AS(strip(0.0, 0.0, 1), DomainError);
}

TEST_CASE("strip and window are nonempty on a rational grid") {
  int points = 0;
  for (long long pd : {1, 2, 3, 4, 5})
    for (long long pn = 1; pn <= pd; ++pn)
      for (long long g2 : {0, 1, 2, 3, 5})
        for (int d : {1, 2, 3}) {
          const Rational p(pn, pd), gamma(g2, 2);
          const ExactStrip e0 = exact_strip(p, gamma, d, Rational(0));
          REQUIRE(e0.strip_nonempty);
          for (int i = 0; i < 4; ++i) {
            const Rational sigma = e0.sigma_min + (e0.sigma_max - e0.sigma_min) * Rational(i, 4);
            const ExactStrip e = exact_strip(p, gamma, d, sigma);
            CHECK(e.sigma_in_strip);
            CHECK(e.window_nonempty);
            ++points;
          }
        }
  CHECK(points > 100);
}

TEST_CASE("rho window") {
  const StripSpec s = strip(1.0, 0.0, 1);
  const auto w = rho_window(0.5, s, s.sigma_min);
  REQUIRE(w.has_value());
  CHECK(w->log_lo <= w->log_hi);
  CHECK(w->log_lo == doctest::Approx(-1.0 * std::log(0.5)));
  const auto near = rho_window(1.0 - 1e-9, s, 1.5);
  REQUIRE(near.has_value());
  CHECK(std::abs(near->log_hi - near->log_lo) < 1e-8);
  CHECK(!rho_window(0.5, s, s.sigma_max).has_value());
}

TEST_CASE("rho choice examples") {
  const StripSpec s = strip(1.0, 0.0, 1);
  CHECK(rho_choice(4.0, s, s.sigma_min) == doctest::Approx(0.25));
  const double sigma = 1.5;
  // (D - p(N+1+D)) / (D + p(N+1) - sigma) = (1 - 2) / (2 - 1.5) = -2
  CHECK(rho_choice(2.0, s, sigma) == doctest::Approx(0.25));
  const auto w = rho_window(0.5, s, sigma);
  REQUIRE(w.has_value());
  CHECK(rho_choice(0.5, s, sigma) == doctest::Approx(std::exp(0.5 * (w->log_lo + w->log_hi))));
  CHECK_THROWS_AS(rho_choice(1.0, s, 2.5), DomainError);
}

TEST_CASE("envelope exponents") {
  const StripSpec s = strip(1.0, 0.0, 1);
  const Envelopes e = envelopes(2.0, 3.0, s, 1.0);
  CHECK(e.r_exp1 == doctest::Approx(1.0));
  CHECK(e.rho_exp1 == doctest::Approx(1.0));
  CHECK(e.r_exp2 == doctest::Approx(-0.5));
  CHECK(e.rho_exp2 == doctest::Approx(-0.5));
  CHECK(e.env1 == doctest::Approx(6.0));
  CHECK(e.env2 == doctest::Approx(1.0 / std::sqrt(6.0)));
  const StripSpec t = strip(2.0 / 3.0, 1.0, 1);
  const Envelopes f = envelopes(1.0, 1.0, t, 4.1);
  CHECK(f.rho_exp2 < 0.0);
}

TEST_CASE("zero atom has zero Hardy functional") {
  const auto ctx = z2({0.0});
  const Atom z = Atom::zero(AtomSpec::make(ctx, 1.0, 1.0, 0), 1);
  CHECK(value_of(hardy_integral(ctx, z, 1.0, 1.0)) == 0.0);
}

TEST_CASE("classical d = 1 case against composite Gauss quadrature") {
  // |a^(xi)| = (2/sqrt(2 pi)) |int_0^r a(y) sin(xi y) dy| for the odd atom.
  using G30 = boost::math::quadrature::gauss<double, 30>;
  const auto ctx = z2({0.0});
  for (double r : {1.0, 0.25}) {
    const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 1.0, r, 0));
    std::vector<double> ys, ws;
    const int pieces = 400;
    for (int m = 0; m < pieces; ++m) {
      const double lo = r * m / pieces, h = r / pieces;
      for (std::size_t q = 0; q < G30::abscissa().size(); ++q) {
        const double x = G30::abscissa()[q], w = G30::weights()[q];
        for (double sgn : {-1.0, 1.0}) {
          if (q == 0 && sgn < 0.0 && x == 0.0) continue;
          const double y = lo + 0.5 * h * (1.0 + sgn * x);
          const double yy[1] = {y};
          ys.push_back(y);
          ws.push_back(0.5 * h * w * a(yy));
        }
      }
    }
    const auto ahat = [&](double xi) {
      double acc = 0.0;
      for (std::size_t q = 0; q < ys.size(); ++q) acc += ws[q] * std::sin(xi * ys[q]);
      return 2.0 / std::sqrt(2.0 * std::numbers::pi) * acc;
    };
    const auto integrand = [&](double xi) { return xi > 0.0 ? std::abs(ahat(xi)) / xi : 0.0; };
    // |a^| has kinks at the zeros of a^, so panels are split there.
    double H = 0.0;
    const double step = 1.0 / r;
    const int scan = 16;
    for (int i = 0; i < 600; ++i) {
      std::vector<double> breaks = {i * step};
      double x0 = i == 0 ? step / scan : i * step, f0 = ahat(x0);
      for (int j = i == 0 ? 2 : 1; j <= scan; ++j) {
        const double x1 = i * step + j * step / scan, f1 = ahat(x1);
        if (f0 * f1 < 0.0) {
          double lo = x0, hi = x1, flo = f0;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi), fm = ahat(mid);
            if (flo * fm <= 0.0) {
              hi = mid;
            } else {
              lo = mid;
              flo = fm;
            }
          }
          breaks.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
      }
      breaks.push_back((i + 1) * step);
      for (std::size_t j = 0; j + 1 < breaks.size(); ++j) H += 2.0 * G30::integrate(integrand, breaks[j], breaks[j + 1]);
    }
    const double h = value_of(hardy_integral(ctx, a, 1.0, 1.0));
    CAPTURE(r);
    CHECK(h == doctest::Approx(H).epsilon(1e-9));
  }
}

TEST_CASE("profile matches direct transforms off the sampled directions, d = 2") {
  const auto ctx = z2({0.5, 0.5});
  const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 4.0, 1));
  const FrequencyProfile prof(ctx, a);
  const TransformPlan plan(ctx, 4.0);
  const RealFunction f = [&](std::span<const double> y) { return a(y); };
  double worst = 0.0, peak = 0.0;
  for (double t : {0.05, 0.2, 0.9, 2.3, 7.7}) {
    for (double th : {0.123, 1.9, 4.4}) {
      const double xi[2] = {t * std::cos(th), t * std::sin(th)};
      const auto F = forward(plan, f, xi);
      const double eta[2] = {4.0 * xi[0], 4.0 * xi[1]};
      const auto G = a.lambda * std::pow(4.0, ctx.homogeneous_dimension()) * prof(eta);
      worst = std::max(worst, std::abs(F - G));
      peak = std::max(peak, std::abs(F));
    }
  }
  CHECK(worst / peak < 1e-10);
  CHECK(prof.seam_mismatch() < 1e-10);
}

TEST_CASE("split consistency and limits") {
  const auto ctx = z2({1.0});
  const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 2.0 / 3.0, 2.0, 0));
  const HardyEvaluator ev(ctx, a);
  const double sigma = 4.1;
  const double total = value_of(ev.integral(sigma));
  for (double rho : {1e-30, 1e-3, 0.1, 0.5, 2.0, 30.0, 1e6}) {
    const SplitResult s = ev.split(sigma, rho);
    CAPTURE(rho);
    CHECK(s.S1 >= 0.0);
    CHECK(s.S2 >= 0.0);
    CHECK(std::abs(s.S1 + s.S2 - total) <= 1e-6 * total);
    CHECK(s.mismatch <= 1e-6);
  }
  // S1 ~ (r rho)^b near zero with b = D - sigma + p(s+1)
  const double b = 3.0 - sigma + (2.0 / 3.0) * (a.spec.s + 1);
  CHECK(ev.split(sigma, 1e-30).S1 / ev.split(sigma, 1e-20).S1 == doctest::Approx(std::pow(1e-10, b)).epsilon(1e-6));
  CHECK(ev.split(sigma, 1e6).S2 < 1e-12 * total);
  CHECK_THROWS_AS(ev.split(sigma, 0.0), DomainError);
  CHECK_THROWS_AS(ev.split(5.0, 1.0), DivergenceError);
}

TEST_CASE("dilation scaling of the Hardy functional") {
  const auto ctx = z2({0.5, 0.5});
  const StripSpec s = strip(1.0, ctx.gamma(), 2);
  const Atom a1 = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 1.0, 2));
  const Atom a2 = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 2.0, 2));
  const auto prof = std::make_shared<FrequencyProfile>(ctx, a1);
  for (double sigma : {s.sigma_min, 4.5}) {
    const double h1 = value_of(HardyEvaluator(ctx, a1, prof).integral(sigma));
    const double h2 = value_of(HardyEvaluator(ctx, a2, prof).integral(sigma));
    CHECK(h2 / h1 == doctest::Approx(std::pow(2.0, sigma - s.sigma_min)).epsilon(1e-10));
  }
}

TEST_CASE("divergence above the strip") {
  const auto ctx = z2({0.0});
  const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 1.0, 0));
  const StripSpec s = strip(1.0, 0.0, 1);
  const HardyResult r = hardy_integral(ctx, a, s.sigma_max + 0.25, 1.0);
  REQUIRE(std::holds_alternative<DivergenceReport>(r));
  const auto& rep = std::get<DivergenceReport>(r);
  CHECK(rep.expected_slope == doctest::Approx(-0.25));
  CHECK(rep.slope == doctest::Approx(rep.expected_slope).epsilon(0.01));
  CHECK(rep.partial.size() >= 5);
  CHECK_THROWS_AS(hardy_integral(ctx, a, 1.0, 0.5), ConfigError);
}

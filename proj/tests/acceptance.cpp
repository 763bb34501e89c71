#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "dunkl/atoms.hpp"
#include "dunkl/hardy.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/measure.hpp"
#include "dunkl/sweep.hpp"
#include "dunkl/transform.hpp"

using namespace dunkl;

namespace {

constexpr double kKernelBoundTol = 1e-12;
constexpr double kClassicalTol = 1e-10;
constexpr double kMeasureTol = 1e-8;
constexpr double kFixedPointTol = 1e-6;
constexpr double kPlancherelTol = 1e-3;
constexpr double kMomentTol = 1e-9;
constexpr double kSupTol = 1e-12;
constexpr double kPlateau = 1.05;
constexpr double kSlopeTol = 0.10;

bool regression_ok(const Regression& g) {
  return std::abs(g.measured - g.expected) <= kSlopeTol * std::max(1.0, std::abs(g.expected));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s  %2d  %-34s %s  [%.1fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt, limit_s,
              in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

WeightContext z2(std::vector<double> k) {
  const int d = static_cast<int>(k.size());
  return WeightContext(build_root_system(Preset::Z2Product, d), MultiplicityFunction(std::move(k)));
}

std::vector<double> random_vector(std::mt19937_64& gen, int d, double max_norm) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(d));
  double s = 0.0;
  for (auto& x : v) {
    x = n(gen);
    s += x * x;
  }
  const double scale = max_norm * u(gen) / std::sqrt(s);
  for (auto& x : v) x *= scale;
  return v;
}

struct AcceptanceCell {
  std::vector<double> k;
  double p;
};
const std::vector<AcceptanceCell> kCells = {{{0.0}, 1.0}, {{1.0}, 2.0 / 3.0}, {{0.5, 0.5}, 1.0}};

SweepConfig acceptance_config() {
  SweepConfig cfg;
  for (const auto& c : kCells) {
    CellSpec cell;
    cell.preset = Preset::Z2Product;
    cell.d = static_cast<int>(c.k.size());
    cell.multiplicities = c.k;
    cell.p = c.p;
    cfg.cells.push_back(cell);
  }
  cfg.sigma.grid_size = 5;
  cfg.sigma.probes = true;
  cfg.sigma.probe_offset = 0.25;
  cfg.sigma.beyond_theorem = false;
  for (int j = -6; j <= 6; ++j) cfg.radius_exponents.push_back(j);
  cfg.seeds = {0, 1, 2};
  return cfg;
}

}  // namespace

int main() {
  std::printf("acceptance criteria\n");

  run(1, "kernel bound |E_k(-ix,y)| <= 1", 10.0, [] {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> dd(1, 3);
    std::uniform_real_distribution<double> kk(0.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const int d = dd(gen);
      std::vector<double> k(static_cast<std::size_t>(d));
      for (auto& v : k) v = kk(gen);
      const KernelContext ctx = KernelContext::automatic(z2(k));
      const auto x = random_vector(gen, d, 20.0), y = random_vector(gen, d, 20.0);
      worst = std::max(worst, kernel_eval(ctx, x, y).modulus());
    }
    return Outcome{worst <= 1.0 + kKernelBoundTol, fmt("max |E| - 1 = %.3e (tol %.0e)", worst - 1.0, kKernelBoundTol)};
  });

  run(2, "classical reduction k = 0", 5.0, [] {
    std::mt19937_64 gen(7);
    double worst = 0.0;
    for (int d = 1; d <= 3; ++d) {
      const auto w = z2(std::vector<double>(static_cast<std::size_t>(d), 0.0));
      const KernelContext classical(w, KernelMode::ClassicalK0), closed(w, KernelMode::ClosedFormZ2d);
      for (int i = 0; i < 20000; ++i) {
        const auto x = random_vector(gen, d, 20.0), y = random_vector(gen, d, 20.0);
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
        if (std::abs(s) > 20.0) continue;
        const auto ref = std::polar(1.0, s);
        worst = std::max(worst, std::abs(kernel_eval(classical, x, y).value() - ref));
        worst = std::max(worst, std::abs(kernel_eval(closed, x, y).value() - ref));
      }
    }
    return Outcome{worst <= kClassicalTol, fmt("max abs error %.3e (tol %.0e)", worst, kClassicalTol)};
  });

  run(3, "Taylor remainder bound", 30.0, [] {
    int checks = 0, bad = 0;
    for (double k : {0.0, 0.5, 2.0}) {
      for (int d : {1, 2}) {
        const KernelContext ctx = KernelContext::automatic(z2(std::vector<double>(static_cast<std::size_t>(d), k)));
        for (int n = 0; n <= 4; ++n) {
          for (int a = 0; a <= 20; ++a) {
            for (int b = 0; b <= 20; ++b) {
              const double xn = 0.25 * a, yn = 0.25 * b;
              if (xn * yn > 5.0) continue;
              for (double th : {0.0, 0.7, 2.2}) {
                std::vector<double> x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d));
                x[0] = xn * std::cos(th);
                y[0] = yn * std::cos(1.3 - th);
                if (d == 2) {
                  x[1] = xn * std::sin(th);
                  y[1] = yn * std::sin(1.3 - th);
                }
                ++checks;
                if (!remainder_bound_check(ctx, x, y, n).ok) ++bad;
              }
            }
          }
        }
      }
    }
    return Outcome{bad == 0, fmt("%.0f grid points, %.0f violations", checks, bad)};
  });

  run(4, "ball volume and Mehta constant", 60.0, [] {
    double worst_ball = 0.0, worst_mehta = 0.0;
    const std::vector<double> ks = {0.0, 0.5, 1.0, 2.5};
    std::vector<std::vector<double>> ksets;
    for (double a : ks) ksets.push_back({a});
    for (double a : ks)
      for (double b : ks) ksets.push_back({a, b});
    for (const auto& k : ksets) {
      const MeasureContext ctx(z2(k));
      for (double r : {0.25, 1.0, 4.0}) {
        const double q = integrate(build_rule(ctx, Domain::ball(r), 48), [](std::span<const double>) { return 1.0; });
        worst_ball = std::max(worst_ball, std::abs(q - ball_volume(ctx, r)) / ball_volume(ctx, r));
      }
      const double cq = mehta_constant_quadrature(ctx);
      const double cc = 1.0 / mehta_product_closed_form(k);
      worst_mehta = std::max(worst_mehta, std::abs(cq - cc) / cc);
    }
    return Outcome{worst_ball <= kMeasureTol && worst_mehta <= kMeasureTol,
                   fmt("ball rel %.2e, Mehta rel %.2e (tol %.0e)", worst_ball, worst_mehta, kMeasureTol)};
  });

  run(5, "Gaussian fixed point, Plancherel", 300.0, [] {
    double worst_fp = 0.0;
    for (double k : {0.0, 0.8}) {
      const TransformPlan plan(MeasureContext(z2({k})), 12.0);
      const BoundTransform F(plan, [](std::span<const double> y) { return std::exp(-0.5 * y[0] * y[0]); });
      for (double x = 0.0; x <= 4.0; x += 0.25) {
        const double g = std::exp(-0.5 * x * x);
        worst_fp = std::max(worst_fp, std::abs(F(std::span<const double>(&x, 1)) - g) / g);
      }
    }
    double worst_pl = 0.0;
    for (const auto& c : kCells) {
      const MeasureContext ctx(z2(c.k));
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        for (int j : {-6, 0, 6}) {
          const double r = std::ldexp(1.0, j);
          const Atom a = construct_atom(ctx, AtomSpec::make(ctx, c.p, r, seed));
          const TransformPlan plan(ctx, r);
          worst_pl = std::max(worst_pl, plancherel_defect(plan, [&a](std::span<const double> y) { return a(y); }));
        }
      }
    }
    return Outcome{worst_fp <= kFixedPointTol && worst_pl <= kPlancherelTol,
                   fmt("fixed point rel %.2e (tol %.0e), Plancherel defect %.2e", worst_fp, kFixedPointTol, worst_pl) +
                       fmt(" (tol %.0e)", kPlancherelTol)};
  });

  run(6, "atom certification", 120.0, [] {
    int total = 0, bad = 0;
    double worst_res = 0.0, worst_size = 0.0;
    for (const auto& c : kCells) {
      const MeasureContext ctx(z2(c.k));
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        for (int j = -6; j <= 6; ++j) {
          const Atom a = construct_atom(ctx, AtomSpec::make(ctx, c.p, std::ldexp(1.0, j), seed));
          const AtomCertificate cert = verify_atom(ctx, a);
          ++total;
          worst_res = std::max(worst_res, cert.max_moment_residual);
          worst_size = std::max(worst_size, std::abs(cert.size_ratio - 1.0));
          if (!(cert.pass() && cert.max_moment_residual <= kMomentTol && std::abs(cert.size_ratio - 1.0) <= kSupTol)) ++bad;
        }
      }
    }
    return Outcome{bad == 0, fmt("%.0f atoms, %.0f failed; max moment residual %.2e", total, bad, worst_res) +
                                 fmt(", max |sup/bound - 1| %.2e", worst_size)};
  });

  SweepResult sw;
  double sweep_seconds = 0.0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      sw = sweep(acceptance_config());
    } catch (const std::exception& e) {
      std::printf("sweep failed: %s\n", e.what());
    }
    sweep_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("      sweep: %zu reports in %.1fs\n", sw.reports.size(), sweep_seconds);
  }
  const auto from_sweep = [&](double limit, const std::function<Outcome()>& body) {
    return [&, limit, body] {
      if (sweep_seconds >= limit) return Outcome{false, fmt("sweep took %.1fs", sweep_seconds)};
      return body();
    };
  };

  run(7, "uniform bound (plateau < 1.05)", 900.0, from_sweep(900.0, [&] {
        bool pass = !sw.cells.empty();
        std::string detail;
        for (const auto& c : sw.cells) {
          pass = pass && c.errors.empty();
          detail += c.key + ":";
          for (const auto& s : c.sigmas) {
            const bool ok = s.finite && s.plateau_ratio < kPlateau;
            pass = pass && ok;
            detail += fmt(" %.4g", s.plateau_ratio) + (ok ? "" : "!");
          }
          detail += "  ";
        }
        return Outcome{pass, detail};
      }));

  run(8, "envelope exponents (10%)", 900.0, from_sweep(900.0, [&] {
        bool pass = !sw.cells.empty();
        int bad = 0, n = 0;
        std::string detail;
        for (const auto& c : sw.cells) {
          for (const auto& s : c.sigmas) {
            n += 2;
            if (!regression_ok(s.s1)) ++bad;
            if (!regression_ok(s.s2)) ++bad;
          }
        }
        pass = pass && bad == 0;
        detail = fmt("%.0f of %.0f regressions outside tolerance", bad, n);
        for (const auto& c : sw.cells)
          for (const auto& s : c.sigmas)
            if (!regression_ok(s.s1) || !regression_ok(s.s2))
              detail += "; " + c.key + fmt(" sigma=%.4g S1 %.3g vs %.3g", s.sigma, s.s1.measured, s.s1.expected) +
                        fmt(", S2 %.3g vs %.3g", s.s2.measured, s.s2.expected);
        return Outcome{pass, detail};
      }));

  run(9, "critical case rho = 1/r", 180.0, from_sweep(180.0, [&] {
        bool pass = !sw.cells.empty();
        std::string detail;
        for (const auto& c : sw.cells) {
          bool found = false;
          for (const auto& s : c.sigmas) {
            if (!s.critical) continue;
            found = true;
            const bool ok = s.finite && s.s1_plateau < kPlateau && s.s2_plateau < kPlateau;
            pass = pass && ok;
            detail += c.key + fmt(": S1 %.6f, S2 %.6f  ", s.s1_plateau, s.s2_plateau);
          }
          pass = pass && found;
        }
        return Outcome{pass, detail};
      }));

  run(10, "strip sharpness probe", 180.0, from_sweep(180.0, [&] {
        bool pass = !sw.cells.empty();
        std::string detail;
        for (const auto& c : sw.cells) {
          for (const auto& p : c.probes) {
            const bool ok = p.expected < 0.0 && std::abs(p.slope - p.expected) <= kSlopeTol * std::abs(p.expected);
            pass = pass && ok;
            detail += c.key + fmt(": %.5f vs %.5f  ", p.slope, p.expected);
          }
          pass = pass && !c.probes.empty();
        }
        return Outcome{pass, detail};
      }));

  run(11, "strip and window arithmetic", 1.0, [] {
    const std::vector<Rational> ps = {Rational(1), Rational(9, 10), Rational(4, 5), Rational(3, 4), Rational(2, 3),
                                      Rational(3, 5), Rational(1, 2), Rational(2, 5), Rational(1, 3), Rational(1, 4)};
    const std::vector<Rational> gammas = {Rational(0), Rational(1, 2), Rational(1), Rational(3, 2), Rational(5, 2)};
    int points = 0, bad = 0;
    for (const auto& p : ps)
      for (const auto& g : gammas)
        for (int d : {1, 2}) {
          ++points;
          const ExactStrip base = exact_strip(p, g, d, Rational(0));
          if (!base.strip_nonempty) ++bad;
          for (int i = 0; i < 5; ++i) {
            const Rational sigma = base.sigma_min + (base.sigma_max - base.sigma_min) * Rational(i, 5);
            const ExactStrip e = exact_strip(p, g, d, sigma);
            if (!e.sigma_in_strip || !e.window_nonempty) ++bad;
            const StripSpec s = strip(boost::rational_cast<double>(p), boost::rational_cast<double>(g), d);
            if (s.N != e.N) ++bad;
            if (i == 0) {
              // the window degenerates to rho = 1/r at the left edge
              if (e.c_lo != Rational(-1) || e.c_hi != Rational(-1)) ++bad;
              continue;
            }
            for (double r : {0.5, 1.0 / 64}) {
              const auto w = rho_window(r, s, boost::rational_cast<double>(sigma));
              if (!w || w->log_lo > w->log_hi + 1e-12) ++bad;
            }
          }
        }
    return Outcome{points == 100 && bad == 0, fmt("%.0f (p, gamma, d) points, %.0f violations", points, bad)};
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

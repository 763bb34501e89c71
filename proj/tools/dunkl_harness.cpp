#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dunkl/atoms.hpp"
#include "dunkl/errors.hpp"
#include "dunkl/kernel.hpp"
#include "dunkl/measure.hpp"
#include "dunkl/sweep.hpp"

namespace fs = std::filesystem;
using namespace dunkl;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Keeps cells whose key contains one of the comma-separated filter terms.
void filter_cells(SweepConfig& cfg, const std::string& filter) {
  if (filter.empty()) return;
  const auto terms = split_list(filter);
  std::vector<CellSpec> kept;
  for (const auto& c : cfg.cells)
    for (const auto& t : terms)
      if (c.key().find(t) != std::string::npos) {
        kept.push_back(c);
        break;
      }
  if (kept.empty()) throw ConfigError("--cells '" + filter + "' matches no cell");
  cfg.cells = kept;
}

int cmd_validate(const std::string& config_path, const std::string& filter) {
  SweepConfig cfg = SweepConfig::parse(read_file(config_path));
  filter_cells(cfg, filter);
  bool ok = true;
  for (const auto& c : cfg.cells) {
    const MeasureContext ctx = c.context();
    const AxiomReport ax = check_axioms(ctx.weights().root_system());
    std::printf("%-28s root-system axioms      %s\n", c.key().c_str(), ax.ok() ? "ok" : "FAILED");
    ok = ok && ax.ok();

    const double mq = mehta_constant_quadrature(ctx);
    const double mrel = std::abs(mq - ctx.mehta_constant()) / ctx.mehta_constant();
    std::printf("%-28s Mehta constant          %s (rel %.2e)\n", c.key().c_str(), mrel <= 1e-8 ? "ok" : "FAILED", mrel);
    ok = ok && mrel <= 1e-8;

    const QuadratureRule ball = build_rule(ctx, Domain::ball(1.0), 64);
    const double vq = integrate(ball, [](std::span<const double>) { return 1.0; });
    const double vrel = std::abs(vq - ball_volume(ctx, 1.0)) / ball_volume(ctx, 1.0);
    std::printf("%-28s ball volume             %s (rel %.2e)\n", c.key().c_str(), vrel <= 1e-8 ? "ok" : "FAILED", vrel);
    ok = ok && vrel <= 1e-8;
  }
  return ok ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, const std::string& filter, int threads) {
  SweepConfig cfg = SweepConfig::parse(read_file(config_path));
  filter_cells(cfg, filter);
  if (threads > 0) cfg.threads = threads;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const SweepResult res = sweep(cfg);
  fs::create_directories(cfg.out_dir);
  write_file(fs::path(cfg.out_dir) / "reports.csv", reports_csv(res));
  write_file(fs::path(cfg.out_dir) / "summary.json", summary_json(res));
  for (const auto& c : res.cells) {
    for (const auto& s : c.sigmas)
      std::printf("%-28s sigma=%-10.6g sup=%-12.6g plateau=%-9.6f %s\n", c.key.c_str(), s.sigma, s.sup, s.plateau_ratio,
                  s.pass() ? "pass" : "FAIL");
    for (const auto& p : c.probes)
      std::printf("%-28s probe sigma=%-10.6g slope=%.6f expected=%.6f %s\n", c.key.c_str(), p.sigma, p.slope, p.expected,
                  p.ok ? "expected-negative" : "FAIL");
    for (const auto& e : c.errors) std::printf("%-28s error: %s\n", c.key.c_str(), e.c_str());
  }
  std::printf("%zu reports written to %s (exit %d)\n", res.reports.size(), cfg.out_dir.c_str(), res.exit_code());
  return res.exit_code();
}

int cmd_kernel_table(const std::string& preset, int d, const std::vector<double>& k, double lo, double hi, int n,
                     const std::string& out) {
  const Preset pr = parse_preset(preset);
  std::vector<double> kk = k;
  if (kk.empty()) kk.assign(static_cast<std::size_t>(pr == Preset::Z2Product ? d : 1), 0.0);
  const WeightContext w(build_root_system(pr, d), MultiplicityFunction(kk));
  const KernelContext ctx = KernelContext::automatic(w);
  std::ostringstream s;
  s << "x,y,re,im,modulus\n";
  const double u = 1.0 / std::sqrt(static_cast<double>(d));
  char buf[160];
  for (int i = 0; i < n; ++i) {
    const double x = n > 1 ? lo + (hi - lo) * i / (n - 1) : lo;
    for (int j = 0; j < n; ++j) {
      const double y = n > 1 ? lo + (hi - lo) * j / (n - 1) : lo;
      const std::vector<double> xv(static_cast<std::size_t>(d), x * u), yv(static_cast<std::size_t>(d), y * u);
      const KernelValue v = kernel_eval(ctx, xv, yv);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", x, y, v.re, v.im, v.modulus());
      s << buf;
    }
  }
  if (out.empty() || out == "-") {
    std::cout << s.str();
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_file(out, s.str());
  }
  return 0;
}

int cmd_atom_make(const std::string& config_path, const std::string& out_dir, const std::string& filter) {
  SweepConfig cfg = SweepConfig::parse(read_file(config_path));
  filter_cells(cfg, filter);
  const std::string dir = out_dir.empty() ? cfg.out_dir : out_dir;
  fs::create_directories(fs::path(dir) / "atoms");
  int failures = 0;
  for (const auto& c : cfg.cells) {
    const MeasureContext ctx = c.context();
    std::string text = "[\n";
    int count = 0;
    for (auto seed : cfg.seeds) {
      for (int j : cfg.radius_exponents) {
        const Atom a = construct_atom(ctx, AtomSpec::make(ctx, c.p, std::ldexp(1.0, j), seed, cfg.extra_order));
        const AtomCertificate cert = verify_atom(ctx, a);
        if (!cert.pass()) {
          ++failures;
          std::printf("%s seed=%llu r=2^%d: certificate FAILED\n", c.key().c_str(), static_cast<unsigned long long>(seed), j);
        }
        text += (count++ ? ",\n" : "") + atom_to_json(a, &cert);
      }
    }
    text += "\n]\n";
    std::string file = c.key();
    for (char& ch : file)
      if (ch == '/' || ch == '(' || ch == ')' || ch == '^') ch = '_';
    write_file(fs::path(dir) / "atoms" / (file + ".json"), text);
    std::printf("%-28s %d atoms\n", c.key().c_str(), count);
  }
  return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dunkl transform atoms and Hardy-type inequality harness"};
  app.require_subcommand(1);

  std::string config, out, cells;
  int threads = 0;

  auto* validate = app.add_subcommand("validate", "check root systems and measure constants for each cell");
  validate->add_option("--config", config, "config file (JSON)")->required();
  validate->add_option("--cells", cells, "comma-separated cell key filter");

  auto* sw = app.add_subcommand("sweep", "run the Hardy sweep and write reports.csv and summary.json");
  sw->add_option("--config", config, "config file (JSON)")->required();
  sw->add_option("--out", out, "output directory");
  sw->add_option("--cells", cells, "comma-separated cell key filter");
  sw->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  std::string preset = "Z2^d";
  int d = 1;
  std::vector<double> k;
  double lo = -10.0, hi = 10.0;
  int n = 21;
  auto* kt = app.add_subcommand("kernel-table", "tabulate E_k(ix, y) along the diagonal direction");
  kt->add_option("--preset", preset, "root-system preset")->capture_default_str();
  kt->add_option("--d", d, "dimension")->capture_default_str();
  kt->add_option("--k", k, "multiplicities, one per orbit");
  kt->add_option("--lo", lo, "grid start")->capture_default_str();
  kt->add_option("--hi", hi, "grid end")->capture_default_str();
  kt->add_option("--n", n, "points per axis")->capture_default_str()->check(CLI::PositiveNumber);
  kt->add_option("--out", out, "output CSV (stdout when omitted)");

  auto* am = app.add_subcommand("atom-make", "construct and certify the atom corpus");
  am->add_option("--config", config, "config file (JSON)")->required();
  am->add_option("--out", out, "output directory");
  am->add_option("--cells", cells, "comma-separated cell key filter");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(config, cells);
    if (*sw) return cmd_sweep(config, out, cells, threads);
    if (*kt) return cmd_kernel_table(preset, d, k, lo, hi, n, out);
    if (*am) return cmd_atom_make(config, out, cells);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

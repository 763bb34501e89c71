#include "dunkl/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <thread>

#include "dunkl/errors.hpp"
#include "dunkl/kernel.hpp"

namespace dunkl {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt_g(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double number_or_fraction(const json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(what + ": expected a number or a fraction string");
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double ols(const std::vector<double>& x, const std::vector<double>& y) {
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

std::string join(const std::vector<std::string>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s.push_back(sep);
    s += v[i];
  }
  return s;
}

// Max over |j| <= J divided by max over |j| <= J - 1.
double plateau(const std::vector<int>& js, const std::vector<double>& values) {
  int J = 0;
  for (int j : js) J = std::max(J, std::abs(j));
  if (J == 0) return 1.0;
  double all = 0.0, inner = 0.0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    all = std::max(all, values[i]);
    if (std::abs(js[i]) < J) inner = std::max(inner, values[i]);
  }
  return inner > 0.0 ? all / inner : std::numeric_limits<double>::infinity();
}

struct Point {
  double S1 = kNaN, S2 = kNaN, total = kNaN, mismatch = 0.0, rho = kNaN;
  bool certified = false;
  double slope = kNaN, expected = kNaN;
};

struct TaskResult {
  std::vector<std::vector<Point>> in_strip;  // [sigma][r]
  std::vector<std::vector<Point>> probes;
  std::vector<std::vector<Point>> beyond;
  std::string error;
};

struct CellPlan {
  CellSpec spec;
  std::string key;
  StripSpec strip;
  std::vector<double> sigmas, probes, beyond;
};

TaskResult run_task(const SweepConfig& cfg, const CellPlan& plan, std::uint64_t seed) {
  TaskResult out;
  try {
    const MeasureContext ctx = plan.spec.context();
    const auto& js = cfg.radius_exponents;
    std::vector<Atom> atoms;
    for (int j : js) atoms.push_back(construct_atom(ctx, AtomSpec::make(ctx, plan.spec.p, std::ldexp(1.0, j), seed, cfg.extra_order)));
    const auto profile = std::make_shared<FrequencyProfile>(ctx, atoms.front(), cfg.profile);
    std::vector<HardyEvaluator> ev;
    for (const auto& a : atoms) ev.emplace_back(ctx, a, profile);

    for (double sigma : plan.sigmas) {
      std::vector<Point> row;
      for (std::size_t i = 0; i < js.size(); ++i) {
        Point pt;
        const double r = atoms[i].spec.r;
        const auto res = ev[i].integral(sigma);
        const auto& hv = std::get<HardyValue>(res);
        pt.rho = rho_choice(r, plan.strip, sigma);
        const SplitResult sp = ev[i].split(sigma, pt.rho);
        pt.S1 = sp.S1;
        pt.S2 = sp.S2;
        pt.total = hv.value;
        pt.mismatch = std::max(sp.mismatch, hv.value > 0.0 ? std::abs(sp.S1 + sp.S2 - hv.value) / hv.value : 0.0);
        pt.certified = hv.certified;
        row.push_back(pt);
      }
      out.in_strip.push_back(std::move(row));
    }
    for (double sigma : plan.probes) {
      std::vector<Point> row;
      for (std::size_t i = 0; i < js.size(); ++i) {
        Point pt;
        const DivergenceReport rep = ev[i].divergence(sigma);
        pt.slope = rep.slope;
        pt.expected = rep.expected_slope;
        row.push_back(pt);
      }
      out.probes.push_back(std::move(row));
    }
    for (double sigma : plan.beyond) {
      std::vector<Point> row;
      for (std::size_t i = 0; i < js.size(); ++i) {
        Point pt;
        pt.rho = 1.0 / atoms[i].spec.r;
        const SplitResult sp = ev[i].split(sigma, pt.rho);
        pt.S1 = sp.S1;
        pt.S2 = sp.S2;
        pt.total = sp.total;
        pt.mismatch = sp.mismatch;
        pt.certified = true;
        row.push_back(pt);
      }
      out.beyond.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    out.error = "seed " + std::to_string(seed) + ": " + e.what();
  }
  return out;
}

// Index of the seed with the largest total (first on ties; NaN counts as largest).
std::size_t worst(const std::vector<TaskResult>& tasks, int which, std::size_t s, std::size_t r) {
  std::size_t best = 0;
  double bv = -1.0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& rows = which == 0 ? tasks[t].in_strip : tasks[t].beyond;
    const double v = rows[s][r].total;
    if (std::isnan(v)) return t;
    if (v > bv) {
      bv = v;
      best = t;
    }
  }
  return best;
}

}  // namespace

std::string to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::InStrip: return "in_strip";
    case ReportKind::Probe: return "probe";
    case ReportKind::BeyondTheorem: return "beyond_theorem";
  }
  return "?";
}

std::string CellSpec::key() const {
  if (!name.empty()) return name;
  std::string s = "d" + std::to_string(d) + "-";
  switch (preset) {
    case Preset::Z2Product: s += "Z2"; break;
    case Preset::A1: s += "A1"; break;
    case Preset::Dihedral: s += "I2(" + std::to_string(order) + ")"; break;
  }
  s += "-k";
  for (std::size_t i = 0; i < multiplicities.size(); ++i) s += (i ? "_" : "") + fmt_g(multiplicities[i], 6);
  return s + "-p" + fmt_g(p, 6);
}

MeasureContext CellSpec::context() const {
  return MeasureContext(WeightContext(build_root_system(preset, d, order), MultiplicityFunction(multiplicities)));
}

SweepConfig SweepConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, {"schema_version", "cells", "sigma_policy", "radius_exponents", "seeds", "extra_order", "quadrature", "threads", "output"}, "config");
  SweepConfig c;
  try {
    c.schema_version = j.value("schema_version", 0);
    if (!j.contains("cells") || !j["cells"].is_array()) throw ConfigError("config: 'cells' must be an array");
    for (std::size_t i = 0; i < j["cells"].size(); ++i) {
      const json& cj = j["cells"][i];
      const std::string where = "cell " + std::to_string(i);
      reject_unknown(cj, {"name", "preset", "d", "order", "multiplicities", "p"}, where);
      CellSpec cell;
      cell.name = cj.value("name", "");
      cell.preset = parse_preset(cj.value("preset", "Z2^d"));
      cell.d = cj.value("d", 1);
      cell.order = cj.value("order", 0);
      if (!cj.contains("multiplicities")) throw ConfigError(where + ": missing 'multiplicities'");
      for (const auto& k : cj["multiplicities"]) cell.multiplicities.push_back(number_or_fraction(k, where + " multiplicity"));
      if (!cj.contains("p")) throw ConfigError(where + ": missing 'p'");
      cell.p = number_or_fraction(cj["p"], where + " p");
      c.cells.push_back(cell);
    }
    if (j.contains("sigma_policy")) {
      const json& sp = j["sigma_policy"];
      reject_unknown(sp, {"grid_size", "sigmas", "probes", "probe_offset", "beyond_theorem"}, "sigma_policy");
      c.sigma.grid_size = sp.value("grid_size", 5);
      if (sp.contains("sigmas"))
        for (const auto& s : sp["sigmas"]) c.sigma.explicit_sigmas.push_back(number_or_fraction(s, "sigma_policy.sigmas"));
      c.sigma.probes = sp.value("probes", true);
      c.sigma.probe_offset = sp.value("probe_offset", 0.25);
      c.sigma.beyond_theorem = sp.value("beyond_theorem", true);
    }
    if (j.contains("radius_exponents")) {
      const json& r = j["radius_exponents"];
      if (r.is_object()) {
        for (int e = r.at("min").get<int>(); e <= r.at("max").get<int>(); ++e) c.radius_exponents.push_back(e);
      } else {
        c.radius_exponents = r.get<std::vector<int>>();
      }
    } else {
      for (int e = -6; e <= 6; ++e) c.radius_exponents.push_back(e);
    }
    c.seeds = j.contains("seeds") ? j["seeds"].get<std::vector<std::uint64_t>>() : std::vector<std::uint64_t>{0, 1, 2};
    c.extra_order = j.value("extra_order", 0);
    if (j.contains("quadrature")) {
      const json& q = j["quadrature"];
      reject_unknown(q, {"series_terms", "panel_nodes", "base_order"}, "quadrature");
      c.profile.series_terms = q.value("series_terms", c.profile.series_terms);
      c.profile.panel_nodes = q.value("panel_nodes", c.profile.panel_nodes);
      c.profile.base_order = q.value("base_order", c.profile.base_order);
    }
    c.threads = j.value("threads", 1);
    if (j.contains("output")) c.out_dir = j["output"].value("dir", c.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

void SweepConfig::validate() const {
  if (schema_version != 1) throw ConfigError("config: unsupported schema_version " + std::to_string(schema_version));
  if (cells.empty()) throw ConfigError("config: no cells");
  std::set<std::string> keys;
  for (const auto& c : cells) {
    const std::string where = "cell '" + c.key() + "'";
    if (!keys.insert(c.key()).second) throw ConfigError(where + ": duplicate cell key");
    if (!(c.p > 0.0 && c.p <= 1.0)) throw ConfigError(where + ": p must lie in (0, 1]");
    for (double k : c.multiplicities)
      if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError(where + ": multiplicities must be finite and >= 0");
    if (c.d < 1) throw ConfigError(where + ": d must be >= 1");
    if (c.d > 2) throw ConfigError(where + ": Hardy sweeps support d <= 2");
    try {
      const MeasureContext ctx = c.context();
      (void)KernelContext::automatic(ctx.weights());
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (sigma.grid_size < 1 || sigma.grid_size > 5) throw ConfigError("sigma_policy: grid_size must be in 1..5");
  if (radius_exponents.empty()) throw ConfigError("config: empty radius_exponents");
  for (int e : radius_exponents)
    if (std::abs(e) > 30) throw ConfigError("config: radius exponents must lie in [-30, 30]");
  if (seeds.empty()) throw ConfigError("config: no seeds");
  if (extra_order < 0) throw ConfigError("config: extra_order must be >= 0");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
}

std::vector<double> sigma_grid(const StripSpec& s, int n) {
  const double eps = (s.sigma_max - s.sigma_min) / 20.0;
  const std::vector<double> all = {s.sigma_min, s.sigma_min + eps, 0.5 * (s.sigma_min + s.sigma_max),
                                   s.sigma_max - 2.0 * eps, s.sigma_max - eps};
  return {all.begin(), all.begin() + std::clamp(n, 0, 5)};
}

bool SigmaSummary::pass() const { return flags.empty(); }

bool CellSummary::positive_pass() const {
  if (!errors.empty()) return false;
  for (const auto& s : sigmas)
    if (!s.pass()) return false;
  return true;
}

bool CellSummary::probes_pass() const {
  for (const auto& p : probes)
    if (!p.ok) return false;
  return true;
}

int SweepResult::exit_code() const {
  bool any_probe = false;
  for (const auto& c : cells) {
    if (!c.positive_pass() || !c.probes_pass()) return 2;
    any_probe = any_probe || !c.probes.empty();
  }
  return any_probe ? 1 : 0;
}

SweepResult sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<CellPlan> plans;
  for (const auto& c : cfg.cells) {
    CellPlan pl;
    pl.spec = c;
    pl.key = c.key();
    const MeasureContext ctx = c.context();
    pl.strip = strip(c.p, ctx.gamma(), c.d);
    pl.sigmas = cfg.sigma.explicit_sigmas.empty() ? sigma_grid(pl.strip, cfg.sigma.grid_size) : cfg.sigma.explicit_sigmas;
    if (cfg.sigma.probes) pl.probes = {pl.strip.sigma_max + cfg.sigma.probe_offset};
    if (cfg.sigma.beyond_theorem) pl.beyond = {0.5 * (0.5 * pl.strip.sigma_min + pl.strip.sigma_min)};
    plans.push_back(pl);
  }
  std::sort(plans.begin(), plans.end(), [](const CellPlan& a, const CellPlan& b) { return a.key < b.key; });

  struct Job {
    std::size_t cell, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < plans.size(); ++c)
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({c, s});
  std::vector<TaskResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      results[i] = run_task(cfg, plans[jobs[i].cell], cfg.seeds[jobs[i].seed]);
  };
  const int nthreads = std::min<int>(cfg.threads, static_cast<int>(jobs.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  const auto& js = cfg.radius_exponents;
  std::vector<double> logr;
  for (int j : js) logr.push_back(j * std::log(2.0));
  std::size_t job = 0;
  for (const auto& pl : plans) {
    CellSummary cs;
    cs.key = pl.key;
    cs.spec = pl.spec;
    cs.strip = pl.strip;
    std::vector<TaskResult> tasks;
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s, ++job) {
      if (!results[job].error.empty()) cs.errors.push_back(results[job].error);
      else tasks.push_back(std::move(results[job]));
    }
    if (tasks.empty()) {
      out.cells.push_back(std::move(cs));
      continue;
    }

    for (std::size_t si = 0; si < pl.sigmas.size(); ++si) {
      const double sigma = pl.sigmas[si];
      SigmaSummary ss;
      ss.sigma = sigma;
      ss.critical = is_critical(pl.strip, sigma);
      std::vector<double> totals, s1, s2, e1, e2;
      for (std::size_t ri = 0; ri < js.size(); ++ri) {
        const std::size_t w = worst(tasks, 0, si, ri);
        const Point& pt = tasks[w].in_strip[si][ri];
        HardyReport rep;
        rep.cell = pl.key;
        rep.kind = ReportKind::InStrip;
        rep.p = pl.spec.p;
        rep.sigma = sigma;
        rep.r = std::ldexp(1.0, js[ri]);
        rep.rho = pt.rho;
        rep.S1 = pt.S1;
        rep.S2 = pt.S2;
        rep.total = pt.total;
        const Envelopes env = envelopes(rep.r, rep.rho, pl.strip, sigma);
        rep.env1 = env.env1;
        rep.env2 = env.env2;
        rep.seed = cfg.seeds[w];
        double mm = 0.0;
        bool cert = true, fin = true;
        for (const auto& t : tasks) {
          const Point& q = t.in_strip[si][ri];
          mm = std::max(mm, q.mismatch);
          cert = cert && q.certified;
          fin = fin && std::isfinite(q.total) && std::isfinite(q.S1) && std::isfinite(q.S2);
        }
        rep.split_mismatch = mm;
        if (ss.critical) rep.flags.push_back("critical");
        rep.flags.push_back("seed=" + std::to_string(rep.seed));
        std::vector<std::string> problems;
        if (!fin) problems.push_back("nonfinite");
        if (!cert) problems.push_back("uncertified");
        if (!(mm <= kSplitTolerance)) problems.push_back("split_mismatch");
        if (problems.empty()) problems.push_back("ok");
        rep.flags.insert(rep.flags.end(), problems.begin(), problems.end());
        ss.finite = ss.finite && fin;
        ss.max_split_mismatch = std::max(ss.max_split_mismatch, mm);
        totals.push_back(rep.total);
        s1.push_back(rep.S1);
        s2.push_back(rep.S2);
        e1.push_back(rep.env1);
        e2.push_back(rep.env2);
        out.reports.push_back(rep);
      }
      ss.sup = *std::max_element(totals.begin(), totals.end());
      ss.plateau_ratio = plateau(js, totals);
      const auto regress = [&](const std::vector<double>& S, const std::vector<double>& E) {
        Regression g;
        std::vector<double> ls, le;
        bool positive = true;
        for (std::size_t i = 0; i < S.size(); ++i) {
          positive = positive && S[i] > 0.0 && std::isfinite(S[i]);
          ls.push_back(std::log(S[i]));
          le.push_back(std::log(E[i]));
        }
        if (S.size() < 2) {
          g.ok = true;
          g.measured = g.expected = kNaN;
          return g;
        }
        g.expected = ols(logr, le);
        g.measured = positive ? ols(logr, ls) : kNaN;
        g.ok = positive && std::abs(g.measured - g.expected) <= kRegressionTolerance * std::max(1.0, std::abs(g.expected));
        return g;
      };
      ss.s1 = regress(s1, e1);
      ss.s2 = regress(s2, e2);
      if (!ss.finite) ss.flags.push_back("nonfinite");
      if (!(ss.plateau_ratio < kPlateauLimit)) ss.flags.push_back("plateau_exceeded");
      if (!ss.s1.ok) ss.flags.push_back(std::isnan(ss.s1.measured) ? "s1_vanishes" : "s1_exponent_mismatch");
      if (!ss.s2.ok) ss.flags.push_back(std::isnan(ss.s2.measured) ? "s2_vanishes" : "s2_exponent_mismatch");
      if (!(ss.max_split_mismatch <= kSplitTolerance)) ss.flags.push_back("split_mismatch");
      bool certified = true;
      for (const auto& t : tasks)
        for (const auto& q : t.in_strip[si]) certified = certified && q.certified;
      if (!certified) ss.flags.push_back("uncertified");
      if (ss.critical) {
        ss.s1_plateau = plateau(js, s1);
        ss.s2_plateau = plateau(js, s2);
        if (!(ss.s1_plateau < kPlateauLimit && ss.s2_plateau < kPlateauLimit)) ss.flags.push_back("critical_unbounded");
      }
      cs.sigmas.push_back(ss);
    }

    for (std::size_t pi = 0; pi < pl.probes.size(); ++pi) {
      ProbeSummary ps;
      ps.sigma = pl.probes[pi];
      ps.ok = true;
      for (std::size_t ri = 0; ri < js.size(); ++ri) {
        HardyReport rep;
        rep.cell = pl.key;
        rep.kind = ReportKind::Probe;
        rep.p = pl.spec.p;
        rep.sigma = ps.sigma;
        rep.r = std::ldexp(1.0, js[ri]);
        rep.rho = rep.S1 = rep.S2 = rep.total = rep.env1 = rep.env2 = kNaN;
        double worst_dev = -1.0;
        for (std::size_t t = 0; t < tasks.size(); ++t) {
          const Point& q = tasks[t].probes[pi][ri];
          const double dev = std::abs(q.slope - q.expected);
          if (std::isnan(dev) || dev > worst_dev) {
            worst_dev = std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev;
            rep.slope = q.slope;
            rep.expected_slope = q.expected;
            rep.seed = cfg.seeds[t];
          }
        }
        const bool ok = rep.expected_slope < 0.0 &&
                        std::abs(rep.slope - rep.expected_slope) <= kProbeTolerance * std::abs(rep.expected_slope);
        rep.flags = {"probe", "divergent", "expected_negative", "seed=" + std::to_string(rep.seed), ok ? "slope_ok" : "slope_mismatch"};
        if (ri == 0 || std::abs(rep.slope - rep.expected_slope) > std::abs(ps.slope - ps.expected)) {
          ps.slope = rep.slope;
          ps.expected = rep.expected_slope;
        }
        ps.ok = ps.ok && ok;
        out.reports.push_back(rep);
      }
      cs.probes.push_back(ps);
    }

    for (std::size_t bi = 0; bi < pl.beyond.size(); ++bi) {
      BeyondSummary bs;
      bs.sigma = pl.beyond[bi];
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (std::size_t ri = 0; ri < js.size(); ++ri) {
        const std::size_t w = worst(tasks, 1, bi, ri);
        const Point& pt = tasks[w].beyond[bi][ri];
        HardyReport rep;
        rep.cell = pl.key;
        rep.kind = ReportKind::BeyondTheorem;
        rep.p = pl.spec.p;
        rep.sigma = bs.sigma;
        rep.r = std::ldexp(1.0, js[ri]);
        rep.rho = pt.rho;
        rep.S1 = pt.S1;
        rep.S2 = pt.S2;
        rep.total = pt.total;
        const Envelopes env = envelopes(rep.r, rep.rho, pl.strip, bs.sigma);
        rep.env1 = env.env1;
        rep.env2 = env.env2;
        rep.seed = cfg.seeds[w];
        rep.split_mismatch = pt.mismatch;
        rep.flags = {"beyond_theorem", "seed=" + std::to_string(rep.seed)};
        const double ratio = rep.S2 / rep.env2;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        out.reports.push_back(rep);
      }
      bs.spread = hi / lo;
      cs.beyond.push_back(bs);
    }
    out.cells.push_back(std::move(cs));
  }
  std::stable_sort(out.reports.begin(), out.reports.end(), [](const HardyReport& a, const HardyReport& b) {
    if (a.cell != b.cell) return a.cell < b.cell;
    if (a.sigma != b.sigma) return a.sigma < b.sigma;
    return a.r < b.r;
  });
  return out;
}

std::string reports_csv(const SweepResult& result) {
  std::string s = "cell,p,sigma,r,rho,S1,S2,total,env1,env2,flags\n";
  for (const auto& r : result.reports) {
    s += r.cell;
    for (double v : {r.p, r.sigma, r.r, r.rho, r.S1, r.S2, r.total, r.env1, r.env2}) s += "," + fmt_g(v);
    s += "," + join(r.flags, ';') + "\n";
  }
  return s;
}

std::string summary_json(const SweepResult& result) {
  const auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  json root;
  root["schema_version"] = 1;
  root["exit_code"] = result.exit_code();
  json cells = json::object();
  for (const auto& c : result.cells) {
    json cj;
    cj["preset"] = to_string(c.spec.preset);
    cj["d"] = c.spec.d;
    cj["multiplicities"] = c.spec.multiplicities;
    cj["p"] = c.spec.p;
    cj["N"] = c.strip.N;
    cj["sigma_min"] = c.strip.sigma_min;
    cj["sigma_max"] = c.strip.sigma_max;
    double sup = 0.0, plat = 0.0;
    std::vector<std::string> flags;
    json sig = json::array();
    for (const auto& s : c.sigmas) {
      sup = std::max(sup, s.sup);
      plat = std::max(plat, s.plateau_ratio);
      json sj;
      sj["sigma"] = s.sigma;
      sj["critical"] = s.critical;
      sj["sup"] = num(s.sup);
      sj["plateau_ratio"] = num(s.plateau_ratio);
      sj["regression_exponents"] = {
          {"S1", {{"measured", num(s.s1.measured)}, {"expected", num(s.s1.expected)}, {"ok", s.s1.ok}}},
          {"S2", {{"measured", num(s.s2.measured)}, {"expected", num(s.s2.expected)}, {"ok", s.s2.ok}}}};
      if (s.critical) sj["critical_plateau"] = {{"S1", num(s.s1_plateau)}, {"S2", num(s.s2_plateau)}};
      sj["max_split_mismatch"] = num(s.max_split_mismatch);
      sj["flags"] = s.flags;
      sj["pass"] = s.pass();
      for (const auto& f : s.flags)
        if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
      sig.push_back(sj);
    }
    cj["sup"] = sup;
    cj["plateau_ratio"] = plat;
    cj["sigmas"] = sig;
    json pr = json::array();
    for (const auto& p : c.probes) {
      pr.push_back({{"sigma", p.sigma}, {"slope", num(p.slope)}, {"expected", p.expected}, {"expected_negative", true}, {"ok", p.ok}});
      if (!p.ok) flags.push_back("probe_slope_mismatch");
    }
    cj["probes"] = pr;
    json bt = json::array();
    for (const auto& b : c.beyond) bt.push_back({{"sigma", b.sigma}, {"S2_over_env2_spread", num(b.spread)}});
    cj["beyond_theorem"] = bt;
    cj["errors"] = c.errors;
    if (!c.errors.empty()) flags.push_back("error");
    cj["flags"] = flags;
    cells[c.key] = cj;
  }
  root["cells"] = cells;
  return root.dump(2) + "\n";
}

}  // namespace dunkl

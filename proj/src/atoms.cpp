#include "dunkl/atoms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

constexpr int kConstructionOrder = 96;
constexpr int kVerifyOrder = 160;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double monomial(std::span<const double> u, const MultiIndex& l) {
  double v = 1.0;
  for (std::size_t j = 0; j < l.size(); ++j)
    for (int e = 0; e < l[j]; ++e) v *= u[j];
  return v;
}

int total_degree(const MultiIndex& l) {
  int s = 0;
  for (int e : l) s += e;
  return s;
}

void enumerate(int d, int degree_left, MultiIndex& cur, std::size_t pos, std::vector<MultiIndex>& out) {
  if (pos + 1 == static_cast<std::size_t>(d)) {
    cur[pos] = degree_left;
    out.push_back(cur);
    return;
  }
  for (int e = degree_left; e >= 0; --e) {
    cur[pos] = e;
    enumerate(d, degree_left - e, cur, pos + 1, out);
  }
}

double norm(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

double compass_refine(const std::function<double(std::span<const double>)>& g, std::vector<double> x, double step) {
  double best = g(x);
  const std::size_t d = x.size();
  std::vector<double> trial(d);
  while (step > 1e-12) {
    bool moved = false;
    for (std::size_t j = 0; j < d && !moved; ++j) {
      for (double dir : {1.0, -1.0}) {
        trial = x;
        trial[j] += dir * step;
        const double v = g(trial);
        if (v > best) {
          best = v;
          x = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_degree(int d, int deg) {
  if (d < 1 || deg < 0) return {};
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(d), 0);
  enumerate(d, deg, cur, 0, out);
  return out;
}

std::vector<MultiIndex> multi_indices(int d, int max_degree) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= max_degree; ++n) {
    auto part = multi_indices_of_degree(d, n);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

int compute_N(double p, double gamma, int d) {
  if (!(p > 0.0) || !(p <= 1.0)) throw DomainError("compute_N: p must lie in (0, 1]");
  const double x = (2.0 * gamma + d) * (1.0 / p - 1.0);
  const double near = std::round(x);
  if (std::abs(x - near) < 1e-9) return static_cast<int>(near);
  return static_cast<int>(std::floor(x));
}

double bump(double s) {
  const double a = s * s;
  if (!(a < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - a));
}

AtomSpec AtomSpec::make(const MeasureContext& ctx, double p, double r, std::uint64_t seed, int extra_order) {
  AtomSpec s;
  s.p = p;
  s.r = r;
  s.seed = seed;
  if (!(p > 0.0) || !(p <= 1.0)) throw ConfigError("atom: p must lie in (0, 1]");
  s.N = compute_N(p, ctx.gamma(), ctx.dimension());
  s.s = s.N + extra_order;
  s.validate(ctx);
  return s;
}

void AtomSpec::validate(const MeasureContext& ctx) const {
  if (!(p > 0.0) || !(p <= 1.0)) throw ConfigError("atom: p must lie in (0, 1]");
  if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("atom: radius must be finite and > 0");
  if (N != compute_N(p, ctx.gamma(), ctx.dimension())) throw ConfigError("atom: stored N does not match (p, gamma, d)");
  if (s < N) throw ConfigError("atom: cancellation order s must be >= N");
}

double Atom::unit_shape(std::span<const double> u) const {
  const double b = bump(norm(u));
  if (b == 0.0) return 0.0;
  double poly = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) poly += unit_coefficients[i] * monomial(u, indices[i]);
  return b * poly;
}

double Atom::operator()(std::span<const double> y) const {
  if (lambda == 0.0) return 0.0;
  std::vector<double> u(y.begin(), y.end());
  for (double& v : u) v /= spec.r;
  return lambda * unit_shape(u);
}

std::vector<double> Atom::coefficients() const {
  std::vector<double> c(unit_coefficients.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = lambda * unit_coefficients[i] / std::pow(spec.r, total_degree(indices[i]));
  return c;
}

Atom Atom::zero(const AtomSpec& spec, int dimension) {
  Atom a;
  a.spec = spec;
  a.dimension = dimension;
  a.indices = multi_indices(dimension, spec.s + 1);
  a.unit_coefficients.assign(a.indices.size(), 0.0);
  return a;
}

double unit_ball_sup(const std::function<double(std::span<const double>)>& f, int d, int resolution) {
  if (d < 1 || d > 3) throw DomainError("unit_ball_sup: 1 <= d <= 3");
  const auto g = [&](std::span<const double> u) { return norm(u) < 1.0 ? std::abs(f(u)) : 0.0; };
  const auto n = static_cast<std::size_t>(resolution);
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= n;
  std::vector<double> vals(total);
  std::vector<double> u(static_cast<std::size_t>(d));
  const auto coord = [&](std::size_t i) { return -1.0 + (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n); };
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int j = d - 1; j >= 0; --j) {
      u[static_cast<std::size_t>(j)] = coord(rem % n);
      rem /= n;
    }
    vals[flat] = g(u);
  }
  const double grid_best = *std::max_element(vals.begin(), vals.end());
  if (grid_best == 0.0) return 0.0;
  double best = grid_best;
  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  stride[static_cast<std::size_t>(d - 1)] = 1;
  for (int j = d - 2; j >= 0; --j) stride[static_cast<std::size_t>(j)] = stride[static_cast<std::size_t>(j + 1)] * n;
  for (std::size_t flat = 0; flat < total; ++flat) {
    if (vals[flat] < 0.5 * grid_best) continue;
    bool peak = true;
    std::size_t rem = flat;
    for (int j = d - 1; j >= 0 && peak; --j) {
      const std::size_t i = rem % n;
      rem /= n;
      const std::size_t s = stride[static_cast<std::size_t>(j)];
      if (i > 0 && vals[flat - s] > vals[flat]) peak = false;
      if (i + 1 < n && vals[flat + s] > vals[flat]) peak = false;
    }
    if (!peak) continue;
    rem = flat;
    for (int j = d - 1; j >= 0; --j) {
      u[static_cast<std::size_t>(j)] = coord(rem % n);
      rem /= n;
    }
    best = std::max(best, compass_refine(g, u, 1.0 / static_cast<double>(n)));
  }
  return best;
}

Atom construct_atom(const MeasureContext& ctx, const AtomSpec& spec) {
  spec.validate(ctx);
  const int d = ctx.dimension();
  Atom atom;
  atom.spec = spec;
  atom.dimension = d;
  atom.indices = multi_indices(d, spec.s + 1);
  const auto lower = multi_indices(d, spec.s);
  const auto top = multi_indices_of_degree(d, spec.s + 1);

  // Top-degree part Q: u_1^{s+1} for seed 0, random otherwise.
  std::vector<double> q(top.size(), 0.0);
  if (spec.seed == 0) {
    q[0] = 1.0;
  } else {
    std::uint64_t state = spec.seed;
    std::mt19937_64 gen(splitmix64(state));
    for (double& c : q) c = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
  }

  const QuadratureRule rule = build_rule(ctx, Domain::ball(1.0), kConstructionOrder);
  const std::size_t nl = lower.size();
  std::vector<double> psi(rule.size()), qv(rule.size());
  std::vector<std::vector<double>> mono(nl, std::vector<double>(rule.size()));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto u = rule.node(i);
    psi[i] = rule.mu_weights[i] * bump(norm(u));
    double qq = 0.0;
    for (std::size_t t = 0; t < top.size(); ++t) qq += q[t] * monomial(u, top[t]);
    qv[i] = qq;
    for (std::size_t a = 0; a < nl; ++a) mono[a][i] = monomial(u, lower[a]);
  }
  const auto inner = [&](const std::vector<double>& f, const std::vector<double>& g) {
    std::vector<double> t(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) t[i] = psi[i] * f[i] * g[i];
    return pairwise_sum(t);
  };
  Eigen::MatrixXd M(static_cast<Eigen::Index>(nl), static_cast<Eigen::Index>(nl));
  Eigen::VectorXd b(static_cast<Eigen::Index>(nl));
  for (std::size_t a = 0; a < nl; ++a) {
    b(static_cast<Eigen::Index>(a)) = inner(qv, mono[a]);
    for (std::size_t c = a; c < nl; ++c) {
      const double v = inner(mono[a], mono[c]);
      M(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
      M(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = v;
    }
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < static_cast<Eigen::Index>(nl)) throw ConstructionError("atom: moment Gram matrix is singular");
  const Eigen::VectorXd c = qr.solve(b);

  // P = Q - sum c_m u^m, normalized so that <P, Q> = 1.
  std::vector<double> pv(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double v = qv[i];
    for (std::size_t a = 0; a < nl; ++a) v -= c(static_cast<Eigen::Index>(a)) * mono[a][i];
    pv[i] = v;
  }
  const double norm_pq = inner(pv, qv);
  if (!(norm_pq > 0.0)) throw ConstructionError("atom: projected polynomial vanishes");
  atom.unit_coefficients.assign(atom.indices.size(), 0.0);
  for (std::size_t a = 0; a < nl; ++a) atom.unit_coefficients[a] = -c(static_cast<Eigen::Index>(a)) / norm_pq;
  for (std::size_t t = 0; t < top.size(); ++t) atom.unit_coefficients[nl + t] = q[t] / norm_pq;
  for (double& v : pv) v /= norm_pq;

  const int resolution = d == 1 ? 4001 : (d == 2 ? 301 : 61);
  atom.unit_sup = unit_ball_sup([&](std::span<const double> u) { return atom.unit_shape(u); }, d, resolution);
  if (!(atom.unit_sup > 0.0)) throw ConstructionError("atom: profile vanishes identically");
  const double bound = std::pow(ball_volume(ctx, spec.r), -1.0 / spec.p);
  atom.lambda = bound / atom.unit_sup;
  atom.sup_norm = atom.lambda * atom.unit_sup;

  const double scale = atom.unit_sup * ball_volume(ctx, 1.0);
  for (const auto& l : multi_indices(d, spec.N)) {
    std::vector<double> ml(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) ml[i] = monomial(rule.node(i), l);
    const double res = std::abs(inner(pv, ml)) / scale;
    atom.moment_residuals.push_back(res);
    if (!(res <= kMomentTolerance))
      throw CertificationError("atom: moment residual " + std::to_string(res) + " above certificate threshold");
  }
  return atom;
}

AtomCertificate verify_atom(const MeasureContext& ctx, const Atom& atom) {
  AtomCertificate cert;
  const int d = ctx.dimension();
  const double r = atom.spec.r;
  cert.size_bound = std::pow(ball_volume(ctx, r), -1.0 / atom.spec.p);

  // (i) support: a vanishes on spheres of radius r .. 2r.
  cert.support_ok = true;
  const QuadratureRule sph = sphere_rule(ctx, 8);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (int k = 0; k <= 16 && cert.support_ok; ++k) {
    const double rad = r * (1.0 + k / 16.0);
    for (std::size_t i = 0; i < sph.size(); ++i) {
      const auto w = sph.node(i);
      for (std::size_t j = 0; j < y.size(); ++j) y[j] = rad * w[j];
      if (atom(y) != 0.0) {
        cert.support_ok = false;
        break;
      }
    }
  }

  // (ii) size, with a grid unrelated to the construction's.
  const int resolution = d == 1 ? 2999 : (d == 2 ? 227 : 47);
  cert.measured_sup = unit_ball_sup(
      [&](std::span<const double> u) {
        std::vector<double> yy(u.begin(), u.end());
        for (double& v : yy) v *= r;
        return atom(yy);
      },
      d, resolution);
  cert.size_ratio = cert.measured_sup / cert.size_bound;
  cert.size_ok = cert.measured_sup <= cert.size_bound * (1.0 + kSizeTolerance);

  // (iii) moments on a tensor box rule over [-r, r]^d.
  const QuadratureRule box = build_rule(ctx, Domain::box(r), d == 3 ? 48 : kVerifyOrder);
  std::vector<double> av(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) av[i] = atom(box.node(i));
  const double vol = ball_volume(ctx, r);
  for (const auto& l : multi_indices(d, atom.spec.N)) {
    std::vector<double> t(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) t[i] = box.mu_weights[i] * av[i] * monomial(box.node(i), l);
    const double m = std::abs(pairwise_sum(t));
    const double scale = cert.measured_sup * vol * std::pow(r, total_degree(l));
    const double res = scale > 0.0 ? m / scale : m;
    cert.moment_residuals.push_back(res);
    cert.max_moment_residual = std::max(cert.max_moment_residual, res);
  }
  cert.moments_ok = cert.max_moment_residual <= kMomentTolerance;
  return cert;
}

std::string atom_to_json(const Atom& atom, const AtomCertificate* cert) {
  nlohmann::ordered_json j;
  j["spec"] = {{"p", atom.spec.p}, {"q", "inf"},       {"s", atom.spec.s},
               {"N", atom.spec.N}, {"r", atom.spec.r}, {"seed", atom.spec.seed}};
  j["dimension"] = atom.dimension;
  j["indices"] = atom.indices;
  j["unit_coefficients"] = atom.unit_coefficients;
  j["coefficients"] = atom.coefficients();
  j["lambda"] = atom.lambda;
  j["unit_sup"] = atom.unit_sup;
  j["sup_norm"] = atom.sup_norm;
  j["moment_residuals"] = atom.moment_residuals;
  if (cert) {
    j["certificate"] = {{"support_ok", cert->support_ok},
                        {"size_ok", cert->size_ok},
                        {"moments_ok", cert->moments_ok},
                        {"measured_sup", cert->measured_sup},
                        {"size_bound", cert->size_bound},
                        {"max_moment_residual", cert->max_moment_residual},
                        {"pass", cert->pass()}};
  }
  return j.dump(2);
}

Atom atom_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Atom a;
    const auto& s = j.at("spec");
    a.spec.p = s.at("p").get<double>();
    a.spec.s = s.at("s").get<int>();
    a.spec.N = s.at("N").get<int>();
    a.spec.r = s.at("r").get<double>();
    a.spec.seed = s.at("seed").get<std::uint64_t>();
    a.dimension = j.at("dimension").get<int>();
    a.indices = j.at("indices").get<std::vector<MultiIndex>>();
    a.unit_coefficients = j.at("unit_coefficients").get<std::vector<double>>();
    a.lambda = j.at("lambda").get<double>();
    a.unit_sup = j.at("unit_sup").get<double>();
    a.sup_norm = j.at("sup_norm").get<double>();
    a.moment_residuals = j.value("moment_residuals", std::vector<double>{});
    if (a.indices.size() != a.unit_coefficients.size()) throw ConfigError("atom json: coefficient count mismatch");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("atom json: ") + e.what());
  }
}

}  // namespace dunkl

#include "dunkl/root_system.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "dunkl/errors.hpp"

namespace dunkl {

namespace {

constexpr double kMatchTol = 1e-9;
// Perturbed functional (1, eps, eps^2, ...) selecting the positive subsystem.
constexpr double kGenericEps = 1e-4;

bool same(std::span<const double> a, std::span<const double> b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector reflect(std::span<const double> alpha, std::span<const double> y) {
  if (alpha.size() != y.size()) throw DomainError("reflect: dimension mismatch");
  const double norm2 = dot(alpha, alpha);
  if (!(norm2 > 0.0)) throw DomainError("reflect: zero root vector");
  const double c = 2.0 * dot(alpha, y) / norm2;
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * alpha[i];
  return out;
}

Preset parse_preset(const std::string& name) {
  std::string s;
  for (char ch : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "z2^d" || s == "z2" || s == "z2d") return Preset::Z2Product;
  if (s == "a1") return Preset::A1;
  if (s == "dihedral" || s == "i2") return Preset::Dihedral;
  throw ConfigError("unknown root-system preset '" + name + "'");
}

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::Z2Product: return "Z2^d";
    case Preset::A1: return "A1";
    case Preset::Dihedral: return "dihedral";
  }
  return "?";
}

RootSystemData RootSystemData::from_roots(int dimension, const std::vector<Vector>& raw) {
  if (dimension < 1) throw ConfigError("root system dimension must be >= 1");
  RootSystemData rs;
  rs.dimension_ = dimension;
  for (const auto& v : raw) {
    if (static_cast<int>(v.size()) != dimension)
      throw ConfigError("root has wrong dimension");
    const double n2 = dot(v, v);
    if (!(n2 > 0.0)) throw ConfigError("root system contains the zero vector");
    Vector scaled(v);
    const double s = std::sqrt(2.0 / n2);
    for (auto& c : scaled) c *= s;
    if (rs.find(scaled) < 0) rs.roots_.push_back(std::move(scaled));
  }
  if (rs.roots_.empty()) throw ConfigError("root system is empty");

  Vector beta(static_cast<std::size_t>(dimension));
  double e = 1.0;
  for (auto& b : beta) {
    b = e;
    e *= kGenericEps;
  }
  for (std::size_t i = 0; i < rs.roots_.size(); ++i) {
    const double s = dot(rs.roots_[i], beta);
    if (std::abs(s) < 1e-13) throw ConfigError("positive-subsystem functional is not generic");
    if (s > 0.0) rs.positive_.push_back(i);
  }

  // Orbits under the group generated by all reflections.
  rs.orbit_.assign(rs.roots_.size(), -1);
  for (std::size_t start = 0; start < rs.roots_.size(); ++start) {
    if (rs.orbit_[start] >= 0) continue;
    const int label = rs.orbit_count_++;
    std::queue<std::size_t> pending;
    pending.push(start);
    rs.orbit_[start] = label;
    while (!pending.empty()) {
      const std::size_t cur = pending.front();
      pending.pop();
      for (const auto& alpha : rs.roots_) {
        const Vector img = reflect(alpha, rs.roots_[cur]);
        const int idx = rs.find(img);
        if (idx >= 0 && rs.orbit_[static_cast<std::size_t>(idx)] < 0) {
          rs.orbit_[static_cast<std::size_t>(idx)] = label;
          pending.push(static_cast<std::size_t>(idx));
        }
      }
    }
  }
  return rs;
}

int RootSystemData::find(std::span<const double> v) const {
  for (std::size_t i = 0; i < roots_.size(); ++i)
    if (same(roots_[i], v, kMatchTol)) return static_cast<int>(i);
  return -1;
}

int RootSystemData::axis_of(std::size_t i) const {
  const auto& r = roots_.at(i);
  int axis = -1;
  for (int j = 0; j < dimension_; ++j) {
    if (std::abs(r[static_cast<std::size_t>(j)]) > kMatchTol) {
      if (axis >= 0) return -1;
      axis = j;
    }
  }
  return axis;
}

RootSystemData build_root_system(Preset preset, int d, int order) {
  std::vector<Vector> roots;
  switch (preset) {
    case Preset::Z2Product:
      if (d < 1) throw ConfigError("preset Z2^d requires d >= 1");
      for (int j = 0; j < d; ++j) {
        Vector e(static_cast<std::size_t>(d), 0.0);
        e[static_cast<std::size_t>(j)] = std::sqrt(2.0);
        roots.push_back(e);
        e[static_cast<std::size_t>(j)] = -std::sqrt(2.0);
        roots.push_back(e);
      }
      break;
    case Preset::A1: {
      if (d < 1) throw ConfigError("preset A1 requires d >= 1");
      Vector e(static_cast<std::size_t>(d), 0.0);
      if (d == 1) {
        e[0] = 1.0;
      } else {
        e[0] = 1.0;
        e[1] = -1.0;
      }
      roots.push_back(e);
      for (auto& v : e) v = -v;
      roots.push_back(e);
      break;
    }
    case Preset::Dihedral:
      if (d != 2) throw ConfigError("dihedral preset requires d = 2");
      if (order < 2 || order % 2 != 0)
        throw ConfigError("dihedral preset requires an even order m >= 2");
      for (int j = 0; j < 2 * order; ++j) {
        const double t = std::numbers::pi * j / order;
        // Snap tiny components so axis detection is exact.
        double c = std::cos(t), s = std::sin(t);
        if (std::abs(c) < 1e-15) c = 0.0;
        if (std::abs(s) < 1e-15) s = 0.0;
        roots.push_back({c, s});
      }
      break;
  }
  return RootSystemData::from_roots(d, roots);
}

AxiomReport check_axioms(const RootSystemData& rs, double tol) {
  AxiomReport rep;
  const auto& roots = rs.roots();
  for (const auto& a : roots) {
    if (std::abs(dot(a, a) - 2.0) > tol) rep.normalized = false;
    Vector neg(a);
    for (auto& c : neg) c = -c;
    if (rs.find(neg) < 0) rep.reduced = false;
    for (const auto& b : roots) {
      if (&a == &b) continue;
      // The only other root on the line through a must be -a.
      const double c = dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
      if (std::abs(std::abs(c) - 1.0) < 1e-12 && !same(b, neg, 1e-9)) rep.reduced = false;
      const Vector img = reflect(a, b);
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c2 : roots) {
        double dev = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i) dev = std::max(dev, std::abs(img[i] - c2[i]));
        best = std::min(best, dev);
      }
      rep.max_closure_defect = std::max(rep.max_closure_defect, best);
    }
  }
  if (rep.max_closure_defect > tol) rep.closed = false;

  std::vector<int> count(roots.size(), 0);
  for (std::size_t i : rs.positive_roots()) {
    Vector neg(roots[i]);
    for (auto& c : neg) c = -c;
    const int j = rs.find(neg);
    if (j < 0) {
      rep.positive_split = false;
      continue;
    }
    ++count[i];
    ++count[static_cast<std::size_t>(j)];
  }
  for (int c : count)
    if (c != 1) rep.positive_split = false;
  return rep;
}

MultiplicityFunction::MultiplicityFunction(std::vector<double> per_orbit)
    : values_(std::move(per_orbit)) {
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError("multiplicity values must be finite and nonnegative");
}

WeightContext::WeightContext(RootSystemData roots, MultiplicityFunction k)
    : roots_(std::move(roots)), k_(std::move(k)) {
  if (static_cast<int>(k_.values().size()) != roots_.orbit_count())
    throw ConfigError("multiplicity needs one value per orbit (" +
                      std::to_string(roots_.orbit_count()) + " orbits, " +
                      std::to_string(k_.values().size()) + " values)");
  for (std::size_t i : roots_.positive_roots()) gamma_ += k_(roots_.orbit_of(i));

  product_ = true;
  axis_k_.assign(static_cast<std::size_t>(dimension()), 0.0);
  std::vector<bool> used(static_cast<std::size_t>(dimension()), false);
  for (std::size_t i : roots_.positive_roots()) {
    const double kv = k_(roots_.orbit_of(i));
    if (kv == 0.0) continue;
    const int axis = roots_.axis_of(i);
    if (axis < 0 || used[static_cast<std::size_t>(axis)]) {
      product_ = false;
      continue;
    }
    used[static_cast<std::size_t>(axis)] = true;
    axis_k_[static_cast<std::size_t>(axis)] = kv;
  }
  if (!product_) axis_k_.clear();
}

double WeightContext::positive_multiplicity(std::size_t i) const {
  return k_(roots_.orbit_of(roots_.positive_roots().at(i)));
}

double weight_eval(const WeightContext& ctx, std::span<const double> y) {
  const auto& rs = ctx.root_system();
  double w = 1.0;
  const auto& pos = rs.positive_roots();
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double kv = ctx.positive_multiplicity(i);
    if (kv == 0.0) continue;
    const double a = std::abs(dot(rs.roots()[pos[i]], y));
    w *= std::pow(a, 2.0 * kv);
  }
  return w;
}

}  // namespace dunkl

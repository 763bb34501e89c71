#include <doctest.h>

#include <cmath>

#include "dunkl/atoms.hpp"
#include "dunkl/errors.hpp"

using namespace dunkl;

namespace {

MeasureContext z2(std::vector<double> k) {
  const int d = static_cast<int>(k.size());
  return MeasureContext(WeightContext(build_root_system(Preset::Z2Product, d), MultiplicityFunction(std::move(k))));
}

}  // namespace

TEST_CASE("N = floor((2 gamma + d)(1/p - 1))") {
  CHECK(compute_N(1.0, 0.0, 1) == 0);
  CHECK(compute_N(2.0 / 3.0, 1.0, 1) == 1);   // 3 * 1/2
  CHECK(compute_N(2.0 / 3.0, 0.0, 2) == 1);   // 2 * 1/2
  CHECK(compute_N(0.5, 0.0, 1) == 1);
  CHECK(compute_N(0.5, 1.0, 2) == 4);
  CHECK(compute_N(0.25, 0.0, 1) == 3);
  CHECK_THROWS_AS(compute_N(0.0, 0.0, 1), DomainError);
}

TEST_CASE("multi-index enumeration") {
  CHECK(multi_indices(2, 3).size() == 10);
  CHECK(multi_indices(3, 2).size() == 10);
  CHECK(multi_indices_of_degree(2, 4).size() == 5);
}

TEST_CASE("bump profile") {
  CHECK(bump(0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
}

TEST_CASE("constructed atoms pass the independent certificate") {
  struct Cell {
    std::vector<double> k;
    double p;
  };
  for (const auto& c : std::vector<Cell>{{{0.0}, 1.0}, {{1.0}, 2.0 / 3.0}, {{0.5, 0.5}, 1.0}, {{0.0}, 0.5}}) {
    const auto ctx = z2(c.k);
    for (std::uint64_t seed : {0u, 1u}) {
      for (double r : {1.0 / 64, 1.0, 64.0}) {
        const Atom a = construct_atom(ctx, AtomSpec::make(ctx, c.p, r, seed));
        const AtomCertificate cert = verify_atom(ctx, a);
        CAPTURE(c.p);
        CAPTURE(r);
        CHECK(cert.support_ok);
        CHECK(cert.size_ok);
        CHECK(cert.moments_ok);
        CHECK(std::abs(cert.size_ratio - 1.0) <= kSizeTolerance);
        CHECK(a.sup_norm == doctest::Approx(std::pow(ball_volume(ctx, r), -1.0 / c.p)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("d = 1, k = 0, N = 0 atom is odd and vanishes outside the ball") {
  const auto ctx = z2({0.0});
  const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 2.0, 0));
  for (double y : {0.1, 0.77, 1.5, 1.99}) {
    const double yp[1] = {y}, ym[1] = {-y};
    CHECK(a(yp) == doctest::Approx(-a(ym)).epsilon(1e-13));
  }
  const double out[1] = {2.0};
  CHECK(a(out) == 0.0);
  // mean zero by a plain midpoint sum
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double y[1] = {-2.0 + 4.0 * (i + 0.5) / n};
    s += a(y) * 4.0 / n;
  }
  CHECK(std::abs(s) < 1e-12);
}

TEST_CASE("json round trip") {
  const auto ctx = z2({0.5, 0.5});
  const Atom a = construct_atom(ctx, AtomSpec::make(ctx, 1.0, 3.0, 2));
  const Atom b = atom_from_json(atom_to_json(a));
  CHECK(b.spec.seed == 2);
  CHECK(b.spec.r == 3.0);
  CHECK(b.lambda == a.lambda);
  REQUIRE(b.unit_coefficients.size() == a.unit_coefficients.size());
  for (std::size_t i = 0; i < a.unit_coefficients.size(); ++i) CHECK(b.unit_coefficients[i] == a.unit_coefficients[i]);
  const double y[2] = {0.4, -1.1};
  CHECK(b(y) == a(y));
  CHECK_THROWS_AS(atom_from_json("{"), ConfigError);
}

TEST_CASE("zero atom and spec validation") {
  const auto ctx = z2({0.0});
  const Atom z = Atom::zero(AtomSpec::make(ctx, 1.0, 1.0, 0), 1);
  const double y[1] = {0.3};
  CHECK(z(y) == 0.0);
  AtomSpec bad = AtomSpec::make(ctx, 1.0, 1.0, 0);
  bad.s = -1;
  CHECK_THROWS_AS(bad.validate(ctx), ConfigError);
  CHECK_THROWS_AS(AtomSpec::make(ctx, 1.5, 1.0, 0), ConfigError);
}

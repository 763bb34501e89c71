#include <doctest.h>

#include <cmath>

#include "dunkl/errors.hpp"
#include "dunkl/root_system.hpp"

using namespace dunkl;

TEST_CASE("Z2^d has 2d axis roots, d orbits and satisfies the axioms") {
  for (int d = 1; d <= 3; ++d) {
    const auto rs = build_root_system(Preset::Z2Product, d);
    CHECK(rs.roots().size() == static_cast<std::size_t>(2 * d));
    CHECK(rs.positive_roots().size() == static_cast<std::size_t>(d));
    CHECK(rs.orbit_count() == d);
    CHECK(check_axioms(rs).ok());
    for (const auto& a : rs.roots()) CHECK(dot(a, a) == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("A1 in d = 2 is the pair +-(1,-1)") {
  const auto rs = build_root_system(Preset::A1, 2);
  REQUIRE(rs.roots().size() == 2);
  const double v[2] = {1.0, -1.0};
  const double w[2] = {-1.0, 1.0};
  CHECK(rs.find(v) >= 0);
  CHECK(rs.find(w) >= 0);
  CHECK(check_axioms(rs).ok());
}

TEST_CASE("dihedral systems: 2m roots, orbit counts by parity of m/2") {
  for (int m : {2, 4, 6, 8}) {
    const auto rs = build_root_system(Preset::Dihedral, 2, m);
    CHECK(rs.roots().size() == static_cast<std::size_t>(2 * m));
    CHECK(rs.orbit_count() == 2);
    CHECK(check_axioms(rs).ok());
  }
}

TEST_CASE("reflections are involutions fixing the hyperplane") {
  const double a[3] = {1.0, -1.0, 0.0};
  const double y[3] = {0.3, 2.0, -1.5};
  const Vector s = reflect(a, y);
  const Vector ss = reflect(a, s);
  for (int i = 0; i < 3; ++i) CHECK(ss[static_cast<std::size_t>(i)] == doctest::Approx(y[i]).epsilon(1e-15));
  const Vector sa = reflect(a, a);
  CHECK(sa[0] == doctest::Approx(-1.0));
  CHECK(sa[1] == doctest::Approx(1.0));
  const double h[3] = {1.0, 1.0, 7.0};
  const Vector sh = reflect(a, h);
  for (int i = 0; i < 3; ++i) CHECK(sh[static_cast<std::size_t>(i)] == doctest::Approx(h[i]));
}

TEST_CASE("gamma and weight for Z2^2 match the direct product over positive roots") {
  const WeightContext w(build_root_system(Preset::Z2Product, 2), MultiplicityFunction({0.5, 1.5}));
  CHECK(w.gamma() == doctest::Approx(2.0));
  CHECK(w.homogeneous_dimension() == doctest::Approx(6.0));
  CHECK(w.is_product());
  const double y[2] = {0.7, -1.3};
  // roots sqrt2 e_j: |<alpha,y>|^{2k} = (sqrt2 |y_j|)^{2k}
  const double expect = std::pow(std::sqrt(2.0) * 0.7, 1.0) * std::pow(std::sqrt(2.0) * 1.3, 3.0);
  CHECK(weight_eval(w, y) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("weight is reflection invariant and homogeneous of degree 2 gamma") {
  const WeightContext w(build_root_system(Preset::Dihedral, 2, 6), MultiplicityFunction({0.4, 1.1}));
  const double y[2] = {0.37, 1.21};
  const double w0 = weight_eval(w, y);
  for (std::size_t i : w.root_system().positive_roots()) {
    const Vector s = reflect(w.root_system().roots()[i], y);
    CHECK(weight_eval(w, s) == doctest::Approx(w0).epsilon(1e-12));
  }
  const double t = 2.5;
  const double ty[2] = {t * y[0], t * y[1]};
  CHECK(weight_eval(w, ty) == doctest::Approx(std::pow(t, w.homogeneity_degree()) * w0).epsilon(1e-12));
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(build_root_system(Preset::Z2Product, 0), ConfigError);
  CHECK_THROWS_AS(build_root_system(Preset::Dihedral, 2, 3), ConfigError);
  CHECK_THROWS_AS(parse_preset("E8"), ConfigError);
  CHECK_THROWS_AS(WeightContext(build_root_system(Preset::Z2Product, 1), MultiplicityFunction({-1.0})), ConfigError);
  CHECK_THROWS_AS(WeightContext(build_root_system(Preset::Z2Product, 2), MultiplicityFunction({1.0})), ConfigError);
  CHECK(parse_preset("z2^D") == Preset::Z2Product);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dunkl/errors.hpp"
#include "dunkl/transform.hpp"

using namespace dunkl;

namespace {

MeasureContext z2(std::vector<double> k) {
  const int d = static_cast<int>(k.size());
  return MeasureContext(WeightContext(build_root_system(Preset::Z2Product, d), MultiplicityFunction(std::move(k))));
}

double gauss(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::exp(-0.5 * s);
}

double bump_shape(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s < 1.0 ? std::exp(-1.0 / (1.0 - s)) * (1.0 + y[0]) : 0.0;
}

}  // namespace

TEST_CASE("indicator of [-1,1] for k = 0 gives the sinc transform") {
  const TransformPlan plan(z2({0.0}), 1.0);
  const RealFunction chi = [](std::span<const double> y) { return std::abs(y[0]) <= 1.0 ? 1.0 : 0.0; };
  for (double x : {0.0, 0.3, 1.0, 4.5, 17.0, -9.2}) {
    const double ref = x == 0.0 ? 2.0 / std::sqrt(2.0 * std::numbers::pi) : 2.0 * std::sin(x) / (x * std::sqrt(2.0 * std::numbers::pi));
    const auto v = forward(plan, chi, std::span<const double>(&x, 1));
    CHECK(std::abs(v - std::complex<double>(ref, 0.0)) < 1e-14);
  }
}

TEST_CASE("Gaussian is a fixed point") {
  for (const auto& k : std::vector<std::vector<double>>{{0.0}, {0.8}, {0.5, 1.5}}) {
    const TransformPlan plan(z2(k), 12.0);
    const BoundTransform F(plan, gauss);
    for (double t : {0.0, 0.5, 1.3, 2.7, 4.0}) {
      std::vector<double> x(k.size(), t / std::sqrt(static_cast<double>(k.size())));
      const auto v = F(x);
      CHECK(std::abs(v - std::complex<double>(gauss(x), 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("grid and along_ray agree with pointwise evaluation") {
  const TransformPlan plan(z2({0.5, 0.5}), 1.0);
  const BoundTransform F(plan, bump_shape);
  const std::vector<std::vector<double>> axes = {{-3.0, 0.2, 5.0}, {-1.0, 0.0, 2.5, 7.0}};
  const auto g = F.grid(axes);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double x[2] = {axes[0][i], axes[1][j]};
      CHECK(std::abs(g[i * 4 + j] - F(x)) < 1e-14);
    }
  const double om[2] = {0.6, -0.8};
  const std::vector<double> ts = {0.0, 0.7, 3.0, 11.0};
  const auto ray = F.along_ray(om, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double x[2] = {ts[i] * om[0], ts[i] * om[1]};
    CHECK(std::abs(ray[i] - F(x)) < 1e-11);
  }
}

TEST_CASE("Plancherel defect for a bump, d = 1") {
  const TransformPlan plan(z2({0.8}), 1.0);
  CHECK(plancherel_defect(plan, bump_shape) < 1e-8);
}

TEST_CASE("accuracy envelope") {
  const TransformPlan plan(z2({0.0}), 1.0);
  CHECK(plan.order_for(0.0) >= plan.base_order());
  CHECK(plan.order_for(100.0) % TransformPlan::kOrderBucket == 0);
  CHECK(plan.order_for(100.0) >= plan.base_order() + 75);
  CHECK_THROWS_AS(plan.order_for(1e5), AccuracyError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "models.hpp"
#include "mvsde/density.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/quadrature.hpp"
#include "oracles.hpp"

using namespace mvsde;

TEST_CASE("Gaussian closed forms: mean, variance, normalization constant") {
  for (double theta : {0.5, 1.0, 2.0}) {
    for (double sigma : {0.3, 1.0, 3.0}) {
      for (double m : {-1.0, 0.0, 0.6}) {
        auto g = fixtures::gaussian(theta);
        DensityContext ctx = build_context(g, sigma, m);
        double mean = expectation(ctx, [](double x) { return x; });
        CHECK(mean == doctest::Approx(theta * m / (1.0 + theta)).epsilon(1e-10));
        double var = expectation(ctx, [&](double x) { return (x - mean) * (x - mean); });
        CHECK(var == doctest::Approx(sigma * sigma / (2.0 * (1.0 + theta))).epsilon(1e-9));
        // Z = sqrt(pi sigma^2 / (1 + theta)) in shifted units
        CHECK(ctx.log_norm ==
              doctest::Approx(0.5 * std::log(std::numbers::pi * sigma * sigma / (1.0 + theta)))
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("normalization across models and sigmas") {
  std::vector<ModelSpec> models{fixtures::bistable(2.0), fixtures::bistable_k2(2.0),
                                fixtures::perturbed(2.0), fixtures::multiwell5(8.25)};
  for (const auto& m : models) {
    for (double sigma : {0.05, 0.3, 1.0, 3.0}) {
      DensityContext ctx = build_context(m, sigma, 0.0);
      CHECK(expectation(ctx, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(ctx.density(ctx.x_mode) > 0.0);
      CHECK(std::exp(ctx.exponent(ctx.x_mode)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("symmetric window and parity at m = 0") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 1.0, 0.0);
  CHECK(std::abs(ctx.x_lo + ctx.x_hi) < 1e-9);
  CHECK(std::abs(expectation(ctx, [](double x) { return x; })) < 1e-11);
  CHECK(std::abs(expectation(ctx, [](double x) { return x * x * x; })) < 1e-11);
  CHECK(std::abs(expectation(ctx, [](double x) { return x * x * x * x * x; })) < 1e-11);
}

TEST_CASE("shift invariance bookkeeping") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.7, 0.2);
  DensityContext shifted = ctx;
  shifted.shift += 5.0;
  shifted.log_norm += 5.0;
  for (int p = 1; p <= 4; ++p) {
    auto g = [p](double x) { return std::pow(x, p); };
    CHECK(expectation(ctx, g) == doctest::Approx(expectation(shifted, g)).epsilon(1e-12));
  }
}

TEST_CASE("window robustness: +20% changes nothing") {
  auto b = fixtures::bistable_k2(2.0);
  DensityContext ctx = build_context(b, 0.8, 0.1);
  DensityContext wide = ctx;
  wide.x_lo *= 1.2;
  wide.x_hi *= 1.2;
  wide.panel_edges.insert(wide.panel_edges.begin(), wide.x_lo);
  wide.panel_edges.push_back(wide.x_hi);
  for (int p = 1; p <= 4; ++p) {
    auto g = [p](double x) { return std::pow(x, p); };
    double a = expectation(ctx, g), c = expectation(wide, g);
    CHECK(c == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("half-line expectations") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.6, 0.0);
  auto one = [](double) { return 1.0; };
  CHECK(half_line_expectation(ctx, one, HalfLine::nonneg) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(half_line_expectation(ctx, one, HalfLine::nonpos) == doctest::Approx(0.5).epsilon(1e-10));
  // additivity on [0, x*] + [x*, inf) = [0, inf)
  auto g = [](double x) { return x * x; };
  double lhs = half_line_expectation(ctx, g, HalfLine::zero_to_x_star) +
               half_line_expectation(ctx, g, HalfLine::beyond_x_star);
  CHECK(lhs == doctest::Approx(half_line_expectation(ctx, g, HalfLine::nonneg)).epsilon(1e-11));
  // (-V')_+ vanishes beyond the farthest root
  double pos_tail = half_line_expectation(
      ctx, [&](double x) { return std::max(-b.drift_v(x), 0.0); }, HalfLine::beyond_x_star);
  CHECK(pos_tail == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sign of a forced half-line integral at small sigma") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.2, 0.0);
  // integrand x^2 (1 - x^2) >= 0 on [0, 1]
  double v = half_line_expectation(ctx, [&](double x) { return -x * b.drift_v(x); },
                                   HalfLine::zero_to_x_star);
  CHECK(v > 0.0);
}

TEST_CASE("agrees with the dense grid oracle") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.7, 0.3);
  oracle::DenseDensity dense(b, 0.7, 0.3, 6.0);
  for (int p = 1; p <= 4; ++p) {
    auto g = [p](double x) { return std::pow(x, p); };
    CHECK(expectation(ctx, g) == doctest::Approx(dense.expect(g)).epsilon(1e-7));
  }
  auto bk = fixtures::bistable_k2(2.0);
  DensityContext ctxk = build_context(bk, 1.1, -0.4);
  oracle::DenseDensity densek(bk, 1.1, -0.4, 8.0);
  CHECK(expectation(ctxk, [](double x) { return x; }) ==
        doctest::Approx(densek.expect([](double x) { return x; })).epsilon(1e-7));
}

TEST_CASE("Laplace regime concentrates at the mode") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.05, 0.0);
  // Vbar''(0) = theta - 1 = 1: variance approx sigma^2 / 2
  double var = expectation(ctx, [](double x) { return x * x; });
  CHECK(var == doctest::Approx(0.05 * 0.05 / 2.0).epsilon(0.01));
}

TEST_CASE("unconfined potential is rejected") {
  ModelSpec m = fixtures::gaussian(0.5);
  m.v_prime = FunctionSpec::polynomial({0.0, -1.0}, "-x");  // Vbar = (theta-1) x^2 / 2 < 0
  CHECK_THROWS_AS(build_context(m, 1.0, 0.0), NotNormalizable);
}

TEST_CASE("small-sigma shift location for the quartic") {
  auto b = fixtures::bistable(2.0);
  DensityContext ctx = build_context(b, 0.1, 0.0);
  CHECK(std::abs(ctx.x_mode) < 1e-6);  // Vbar = x^4/4 + x^2/2 minimized at 0
}

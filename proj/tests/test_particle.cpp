#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "models.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/particle.hpp"
#include "mvsde/util.hpp"

using namespace mvsde;

TEST_CASE("counter_normal is a pure function with standard moments") {
  CHECK(counter_normal(7, 3, 11) == counter_normal(7, 3, 11));
  CHECK(counter_normal(7, 3, 11) != counter_normal(7, 3, 12));
  CHECK(counter_normal(7, 3, 11) != counter_normal(7, 4, 11));
  CHECK(counter_normal(8, 3, 11) != counter_normal(7, 3, 11));
  const std::size_t n = 200000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = counter_normal(42, 1, i);
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("init laws") {
  ParticleEnsemble pm = init_ensemble(100, {InitLaw::point_mass, 0.7, 1.0}, 1, 1e-3);
  for (double x : pm.positions) CHECK(x == 0.7);

  ParticleEnsemble u = init_ensemble(50000, {InitLaw::uniform, -1.0, 3.0}, 2, 1e-3);
  double lo = 1e9, hi = -1e9, mean = 0.0;
  for (double x : u.positions) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    mean += x;
  }
  mean /= static_cast<double>(u.positions.size());
  CHECK(lo >= -1.0);
  CHECK(hi <= 3.0);
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));

  ParticleEnsemble g = init_ensemble(50000, {InitLaw::gaussian, 0.5, 2.0}, 3, 1e-3);
  double gm = 0.0, gv = 0.0;
  for (double x : g.positions) gm += x;
  gm /= static_cast<double>(g.positions.size());
  for (double x : g.positions) gv += (x - gm) * (x - gm);
  gv /= static_cast<double>(g.positions.size());
  CHECK(std::abs(gm - 0.5) < 4.0 * 2.0 / std::sqrt(50000.0));
  CHECK(gv == doctest::Approx(4.0).epsilon(0.05));

  // same seed, same draw
  ParticleEnsemble g2 = init_ensemble(50000, {InitLaw::gaussian, 0.5, 2.0}, 3, 1e-3);
  CHECK(g.positions == g2.positions);
}

TEST_CASE("single deterministic step") {
  auto b = fixtures::bistable(2.0);
  // sigma = 0: pure drift; point mass at x0 stays a point mass
  const double x0 = 0.4, dt = 1e-3;
  ParticleEnsemble e = init_ensemble(10, {InitLaw::point_mass, x0, 1.0}, 1, dt);
  advance(e, b, 0.0);
  // mean-field term vanishes at a point mass: P'(x0) - mean P' = 0
  double expected = x0 - b.drift_v(x0) * dt;
  for (double x : e.positions) CHECK(x == doctest::Approx(expected).epsilon(1e-14));
  CHECK(e.step_index == 1);
  CHECK(e.time == doctest::Approx(dt));
  REQUIRE(e.mean_trace.size() == 1);
}

TEST_CASE("traces are bit-identical across reruns and thread counts") {
  auto b = fixtures::bistable(2.0);
  auto run = [&](int threads) {
    set_max_threads(threads);
    ParticleEnsemble e = init_ensemble(4000, {InitLaw::gaussian, 0.0, 1.0}, 99, 1e-3);
    for (int s = 0; s < 50; ++s) advance(e, b, 0.7);
    return e;
  };
  ParticleEnsemble a = run(1), c = run(4), d = run(4);
  set_max_threads(0);
  CHECK(a.positions == c.positions);
  CHECK(c.positions == d.positions);
  REQUIRE(a.mean_trace.size() == c.mean_trace.size());
  for (std::size_t i = 0; i < a.mean_trace.size(); ++i) {
    CHECK(a.mean_trace[i].second == c.mean_trace[i].second);
    CHECK(c.mean_trace[i].second == d.mean_trace[i].second);
  }
}

TEST_CASE("negating the initial data and the noise stream negates the trace") {
  auto b = fixtures::bistable(2.0);
  ParticleEnsemble e = init_ensemble(2000, {InitLaw::point_mass, 1.0, 1.0}, 5, 1e-3);
  ParticleEnsemble f = init_ensemble(2000, {InitLaw::point_mass, -1.0, 1.0}, 5, 1e-3);
  f.noise_sign = -1;
  for (int s = 0; s < 200; ++s) {
    advance(e, b, 0.5);
    advance(f, b, 0.5);
  }
  for (std::size_t i = 0; i < e.positions.size(); ++i)
    CHECK(f.positions[i] == -e.positions[i]);
  for (std::size_t i = 0; i < e.mean_trace.size(); ++i)
    CHECK(f.mean_trace[i].second == -e.mean_trace[i].second);
}

TEST_CASE("divergence is detected") {
  ModelSpec runaway = fixtures::bistable(2.0);
  runaway.v_prime = FunctionSpec::polynomial({0.0, -10.0}, "-10x");  // repelling
  runaway.p_prime = FunctionSpec::polynomial({0.0}, "0");
  ParticleEnsemble e = init_ensemble(10, {InitLaw::point_mass, 1.0, 1.0}, 1, 1.0);
  CHECK_THROWS_AS(
      [&] {
        for (int s = 0; s < 10000; ++s) advance(e, runaway, 0.0);
      }(),
      Divergence);
}

TEST_CASE("Gaussian stationary mean is zero within error bars") {
  auto g = fixtures::gaussian(1.0);
  MeanEstimate est = stationary_mean_estimate(g, 1.0, {InitLaw::gaussian, 0.0, 1.0}, 4000, 1e-3,
                                              5.0, 5.0, 7);
  CHECK(est.stderr_ > 0.0);
  CHECK(std::abs(est.mean) < 3.0 * est.stderr_ + 0.02);
}

TEST_CASE("bistable mean tracks the initial basin below the transition") {
  auto b = fixtures::bistable(2.0);
  // sigma well below critical: the ensemble stays in the seeded well
  for (std::uint64_t seed : {1ull, 2ull}) {
    MeanEstimate plus = stationary_mean_estimate(b, 0.3, {InitLaw::point_mass, 1.0, 1.0}, 2000,
                                                 1e-3, 5.0, 5.0, seed);
    MeanEstimate minus = stationary_mean_estimate(b, 0.3, {InitLaw::point_mass, -1.0, 1.0}, 2000,
                                                  1e-3, 5.0, 5.0, seed);
    CHECK(plus.mean > 0.5);
    CHECK(minus.mean < -0.5);
  }
}

TEST_CASE("weak convergence under dt halving") {
  auto g = fixtures::gaussian(1.0);
  MeanEstimate coarse = stationary_mean_estimate(g, 1.0, {InitLaw::point_mass, 0.5, 1.0}, 4000,
                                                 2e-3, 5.0, 5.0, 11);
  MeanEstimate fine = stationary_mean_estimate(g, 1.0, {InitLaw::point_mass, 0.5, 1.0}, 4000,
                                               1e-3, 5.0, 5.0, 11);
  CHECK(std::abs(coarse.mean - fine.mean) < coarse.stderr_ + fine.stderr_);
}

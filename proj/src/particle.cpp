#include "mvsde/particle.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "mvsde/errors.hpp"
#include "mvsde/util.hpp"

namespace mvsde {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t u) {
  // (0, 1]: never 0, so log() below is safe
  return (static_cast<double>(u >> 11) + 1.0) * 0x1p-53;
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t particle) {
  std::uint64_t k = mix64(seed ^ mix64(step ^ mix64(particle)));
  double u1 = to_unit(k);
  double u2 = to_unit(mix64(k));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ParticleEnsemble init_ensemble(std::size_t n, InitSpec init, std::uint64_t seed, double dt) {
  if (n < 2) throw Error("init_ensemble: need at least 2 particles");
  if (!(dt > 0.0)) throw Error("init_ensemble: dt must be positive");
  ParticleEnsemble e;
  e.seed = seed;
  e.dt = dt;
  e.positions.resize(n);
  constexpr std::uint64_t kInitStep = 0xffffffffffffffffULL;  // reserved counter slot
  for (std::size_t i = 0; i < n; ++i) {
    switch (init.law) {
      case InitLaw::point_mass:
        e.positions[i] = init.a;
        break;
      case InitLaw::uniform: {
        double u = to_unit(mix64(seed ^ mix64(kInitStep ^ mix64(i))));
        e.positions[i] = init.a + (init.b - init.a) * u;
        break;
      }
      case InitLaw::gaussian:
        e.positions[i] = init.a + init.b * counter_normal(seed, kInitStep, i);
        break;
    }
  }
  return e;
}

void advance(ParticleEnsemble& e, const ModelSpec& model, double sigma) {
  const std::size_t n = e.positions.size();
  if (!e.has_cached_mean) {
    std::vector<double> pvals(n);
    for (std::size_t i = 0; i < n; ++i) pvals[i] = model.p_prime(e.positions[i]);
    e.cached_mean_p = pairwise_mean(pvals);
    e.has_cached_mean = true;
  }
  const double mean_p = e.cached_mean_p;

  const double dt = e.dt;
  const double sdt = sigma * std::sqrt(dt);
  const double ns = static_cast<double>(e.noise_sign);
  std::atomic<bool> diverged{false};
  parallel_for(n, [&](std::size_t i) {
    double x = e.positions[i];
    double drift = -model.drift_v(x) - model.theta * (model.p_prime(x) - mean_p);
    double xi = ns * counter_normal(e.seed, e.step_index, i);
    x += drift * dt + sdt * model.diffusion.k(x) * xi;
    if (!(std::abs(x) <= 1e6)) diverged.store(true, std::memory_order_relaxed);
    e.positions[i] = x;
  });
  if (diverged.load()) throw Divergence("advance: particle position exceeded 1e6");
  e.step_index += 1;
  e.time += dt;

  std::vector<double> pafter(n);
  for (std::size_t i = 0; i < n; ++i) pafter[i] = model.p_prime(e.positions[i]);
  e.cached_mean_p = pairwise_mean(pafter);
  e.mean_trace.emplace_back(e.time, e.cached_mean_p);
}

MeanEstimate stationary_mean_estimate(const ModelSpec& model, double sigma, InitSpec init,
                                      std::size_t n, double dt, double t_burn, double t_sample,
                                      std::uint64_t seed) {
  if (!(t_burn > 0.0) || !(t_sample > 0.0))
    throw Error("stationary_mean_estimate: burn-in and sampling times must be positive");
  ParticleEnsemble e = init_ensemble(n, init, seed, dt);
  const std::uint64_t burn_steps = static_cast<std::uint64_t>(std::llround(t_burn / dt));
  const std::uint64_t sample_steps = static_cast<std::uint64_t>(std::llround(t_sample / dt));
  for (std::uint64_t s = 0; s < burn_steps; ++s) {
    advance(e, model, sigma);
    e.mean_trace.clear();  // keep memory flat during burn-in
  }
  constexpr int kBatches = 20;
  const std::uint64_t batch = sample_steps / kBatches;
  std::vector<double> batch_means(kBatches, 0.0);
  for (int b = 0; b < kBatches; ++b) {
    std::vector<double> means;
    means.reserve(batch);
    for (std::uint64_t s = 0; s < batch; ++s) {
      advance(e, model, sigma);
      means.push_back(e.mean_trace.back().second);
      e.mean_trace.clear();
    }
    batch_means[static_cast<std::size_t>(b)] = pairwise_mean(means);
  }
  MeanEstimate est;
  est.mean = pairwise_mean(batch_means);
  double ss = 0.0;
  for (double bm : batch_means) ss += (bm - est.mean) * (bm - est.mean);
  est.stderr_ = std::sqrt(ss / (kBatches * (kBatches - 1.0)));
  return est;
}

}  // namespace mvsde

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mvsde/model.hpp"

namespace mvsde {

enum class InitLaw { point_mass, uniform, gaussian };

struct InitSpec {
  InitLaw law = InitLaw::point_mass;
  double a = 0.0;  // point: location; uniform: lo; gaussian: mean
  double b = 1.0;  // uniform: hi; gaussian: sd
};

struct ParticleEnsemble {
  std::vector<double> positions;
  std::uint64_t seed = 0;
  double dt = 1e-3;
  double time = 0.0;
  std::uint64_t step_index = 0;
  int noise_sign = 1;  // -1 flips the whole noise stream (symmetry checks)
  std::vector<std::pair<double, double>> mean_trace;  // (t, empirical mean of P')

  // cache of the current empirical mean of P' (recomputed when invalid)
  double cached_mean_p = 0.0;
  bool has_cached_mean = false;
};

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// counter-based normal variate: a pure function of (seed, step, particle)
double counter_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t particle);

ParticleEnsemble init_ensemble(std::size_t n, InitSpec init, std::uint64_t seed, double dt);

// One Euler-Maruyama step (Ito, no correction term); the empirical mean of P'
// uses a fixed pairwise reduction so parallel and serial runs agree bitwise.
void advance(ParticleEnsemble& e, const ModelSpec& model, double sigma);

inline ParticleEnsemble step(ParticleEnsemble e, const ModelSpec& model, double sigma) {
  advance(e, model, sigma);
  return e;
}

// Time-average of the empirical mean of P' over [t_burn, t_burn + t_sample];
// stderr by batch means over 20 batches.
MeanEstimate stationary_mean_estimate(const ModelSpec& model, double sigma, InitSpec init,
                                      std::size_t n, double dt, double t_burn, double t_sample,
                                      std::uint64_t seed);

}  // namespace mvsde

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mvsde/model.hpp"
#include "mvsde/particle.hpp"

namespace mvsde::io {

inline constexpr const char* kVersion = "mvsde 1.0.0";

// strict: unknown fields raise ValidationError
ModelSpec parse_model(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& model);

struct JobConfig {
  ModelSpec model;
  std::string command;
  std::string output_prefix;
  std::string format = "json";  // csv | json | both

  double sigma = 1.0;
  std::vector<double> sigma_grid;
  std::vector<double> theta_grid;
  std::pair<double, double> bracket{0.2, 2.0};
  int grid_points = 401;
  int t_resolution = 2001;
  std::string regime = "generic";
  double x1 = 0.0, x2 = 0.0;
  bool construct = false;

  std::uint64_t seed = 1;
  std::size_t n_particles = 10000;
  double dt = 1e-3;
  double t_burn = 10.0, t_sample = 10.0;
  InitSpec init;

  nlohmann::json resolved;  // full config with defaults materialized
};

JobConfig parse_config(const std::string& path);

void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace mvsde::io

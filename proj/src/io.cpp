#include "mvsde/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mvsde/errors.hpp"

namespace mvsde::io {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError(where + ": unknown field \"" + it.key() + "\"");
  }
}

double require_number(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field \"" + key + "\"");
  if (!j[key].is_number()) throw ValidationError(where + "." + key + ": expected a number");
  return j[key].get<double>();
}

FunctionSpec parse_function(const json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  check_keys(j, where, {"poly", "trig", "description"});
  FunctionSpec f;
  if (j.contains("poly")) {
    if (!j["poly"].is_array()) throw ValidationError(where + ".poly: expected an array");
    for (const auto& c : j["poly"]) {
      if (!c.is_number()) throw ValidationError(where + ".poly: expected numbers");
      f.poly.push_back(c.get<double>());
    }
  }
  if (j.contains("trig")) {
    if (!j["trig"].is_array()) throw ValidationError(where + ".trig: expected an array");
    for (const auto& t : j["trig"]) {
      if (!t.is_object()) throw ValidationError(where + ".trig: expected objects");
      check_keys(t, where + ".trig[]", {"amplitude", "frequency"});
      TrigTerm term;
      term.amplitude = require_number(t, where + ".trig[]", "amplitude");
      term.frequency = require_number(t, where + ".trig[]", "frequency");
      f.trig.push_back(term);
    }
  }
  if (j.contains("description")) f.description = j["description"].get<std::string>();
  return f;
}

json function_to_json(const FunctionSpec& f) {
  json j;
  j["poly"] = f.poly;
  json trig = json::array();
  for (const auto& t : f.trig) trig.push_back({{"amplitude", t.amplitude}, {"frequency", t.frequency}});
  j["trig"] = trig;
  if (!f.description.empty()) j["description"] = f.description;
  return j;
}

std::vector<double> parse_grid(const json& j, const std::string& where) {
  std::vector<double> g;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number()) throw ValidationError(where + ": expected numbers");
      g.push_back(v.get<double>());
    }
  } else if (j.is_object()) {
    check_keys(j, where, {"start", "stop", "count"});
    double start = require_number(j, where, "start");
    double stop = require_number(j, where, "stop");
    int count = static_cast<int>(require_number(j, where, "count"));
    if (count < 1) throw ValidationError(where + ".count: must be >= 1");
    for (int i = 0; i < count; ++i)
      g.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1.0));
  } else {
    throw ValidationError(where + ": expected an array or {start, stop, count}");
  }
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    if (g[i + 1] <= g[i]) throw ValidationError(where + ": grid must be strictly increasing");
  return g;
}

}  // namespace

ModelSpec parse_model(const json& j) {
  if (!j.is_object()) throw ValidationError("model: expected an object");
  check_keys(j, "model", {"v_prime", "p_prime", "k_squared", "epsilon", "theta"});
  ModelSpec m;
  if (!j.contains("v_prime")) throw ValidationError("model: missing field \"v_prime\"");
  if (!j.contains("p_prime")) throw ValidationError("model: missing field \"p_prime\"");
  m.v_prime = parse_function(j["v_prime"], "model.v_prime");
  m.p_prime = parse_function(j["p_prime"], "model.p_prime");
  if (j.contains("k_squared"))
    m.diffusion.k_squared = parse_function(j["k_squared"], "model.k_squared");
  else
    m.diffusion.k_squared = FunctionSpec::polynomial({1.0});
  m.diffusion.epsilon = j.contains("epsilon") ? require_number(j, "model", "epsilon") : 1.0;
  if (!(m.diffusion.epsilon > 0.0)) throw ValidationError("model.epsilon: must be positive");
  m.theta = require_number(j, "model", "theta");
  if (!(m.theta > 0.0)) throw ValidationError("model.theta: must be positive");
  return m;
}

json model_to_json(const ModelSpec& model) {
  json j;
  j["v_prime"] = function_to_json(model.v_prime);
  j["p_prime"] = function_to_json(model.p_prime);
  j["k_squared"] = function_to_json(model.diffusion.k_squared);
  j["epsilon"] = model.diffusion.epsilon;
  j["theta"] = model.theta;
  return j;
}

JobConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  check_keys(j, "config",
             {"model", "model_file", "command", "output", "format", "sigma", "sigma_grid",
              "theta_grid", "bracket", "grid_points", "t_resolution", "regime", "x1", "x2",
              "construct", "particles"});

  JobConfig cfg;
  if (j.contains("model") == j.contains("model_file"))
    throw ValidationError("config: exactly one of \"model\" or \"model_file\" is required");
  if (j.contains("model_file")) {
    std::ifstream mf(j["model_file"].get<std::string>());
    if (!mf) throw ParseError("cannot open model file: " + j["model_file"].get<std::string>());
    json mj;
    try {
      mj = json::parse(mf);
    } catch (const json::parse_error& e) {
      throw ParseError(j["model_file"].get<std::string>() + ": " + e.what());
    }
    cfg.model = parse_model(mj);
  } else {
    cfg.model = parse_model(j["model"]);
  }

  if (!j.contains("command")) throw ValidationError("config: missing field \"command\"");
  cfg.command = j["command"].get<std::string>();
  static const char* commands[] = {"audit",      "roots",   "phase-diagram",  "critical",
                                   "critical-curve", "sigma-r", "multiwell-check", "simulate"};
  bool known = false;
  for (const char* c : commands) known = known || cfg.command == c;
  if (!known) throw ValidationError("config.command: unknown command \"" + cfg.command + "\"");

  if (j.contains("output")) cfg.output_prefix = j["output"].get<std::string>();
  if (j.contains("format")) {
    cfg.format = j["format"].get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "both")
      throw ValidationError("config.format: must be csv, json, or both");
  }
  if (j.contains("sigma")) {
    cfg.sigma = require_number(j, "config", "sigma");
    if (!(cfg.sigma > 0.0)) throw ValidationError("config.sigma: must be positive");
  }
  if (j.contains("sigma_grid")) {
    cfg.sigma_grid = parse_grid(j["sigma_grid"], "config.sigma_grid");
    for (double s : cfg.sigma_grid)
      if (!(s > 0.0)) throw ValidationError("config.sigma_grid: entries must be positive");
  }
  if (j.contains("theta_grid")) {
    cfg.theta_grid = parse_grid(j["theta_grid"], "config.theta_grid");
    for (double t : cfg.theta_grid)
      if (!(t > 0.0)) throw ValidationError("config.theta_grid: entries must be positive");
  }
  if (j.contains("bracket")) {
    const auto& b = j["bracket"];
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
      throw ValidationError("config.bracket: expected [lo, hi]");
    cfg.bracket = {b[0].get<double>(), b[1].get<double>()};
  }
  if (j.contains("grid_points")) {
    cfg.grid_points = static_cast<int>(require_number(j, "config", "grid_points"));
    if (cfg.grid_points < 10) throw ValidationError("config.grid_points: too small");
  }
  if (j.contains("t_resolution"))
    cfg.t_resolution = static_cast<int>(require_number(j, "config", "t_resolution"));
  if (j.contains("regime")) {
    cfg.regime = j["regime"].get<std::string>();
    if (cfg.regime != "generic" && cfg.regime != "symmetric-bistable" &&
        cfg.regime != "symmetric-multiwell")
      throw ValidationError("config.regime: unknown regime \"" + cfg.regime + "\"");
  }
  if (j.contains("x1")) cfg.x1 = require_number(j, "config", "x1");
  if (j.contains("x2")) cfg.x2 = require_number(j, "config", "x2");
  if (j.contains("construct")) {
    if (!j["construct"].is_boolean()) throw ValidationError("config.construct: expected a boolean");
    cfg.construct = j["construct"].get<bool>();
  }
  if (j.contains("particles")) {
    const auto& p = j["particles"];
    check_keys(p, "config.particles", {"n", "dt", "t_burn", "t_sample", "seed", "init"});
    if (p.contains("n")) cfg.n_particles = static_cast<std::size_t>(require_number(p, "particles", "n"));
    if (p.contains("dt")) {
      cfg.dt = require_number(p, "particles", "dt");
      if (!(cfg.dt > 0.0)) throw ValidationError("config.particles.dt: must be positive");
    }
    if (p.contains("t_burn")) cfg.t_burn = require_number(p, "particles", "t_burn");
    if (p.contains("t_sample")) cfg.t_sample = require_number(p, "particles", "t_sample");
    if (p.contains("seed")) cfg.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("init")) {
      const auto& init = p["init"];
      check_keys(init, "config.particles.init", {"law", "a", "b"});
      std::string law = init.contains("law") ? init["law"].get<std::string>() : "point";
      if (law == "point")
        cfg.init.law = InitLaw::point_mass;
      else if (law == "uniform")
        cfg.init.law = InitLaw::uniform;
      else if (law == "gaussian")
        cfg.init.law = InitLaw::gaussian;
      else
        throw ValidationError("config.particles.init.law: unknown law \"" + law + "\"");
      if (init.contains("a")) cfg.init.a = require_number(init, "init", "a");
      if (init.contains("b")) cfg.init.b = require_number(init, "init", "b");
    }
  }

  // echo the fully resolved config for reproducible outputs
  json r;
  r["model"] = model_to_json(cfg.model);
  r["command"] = cfg.command;
  r["output"] = cfg.output_prefix;
  r["format"] = cfg.format;
  r["sigma"] = cfg.sigma;
  r["sigma_grid"] = cfg.sigma_grid;
  r["theta_grid"] = cfg.theta_grid;
  r["bracket"] = {cfg.bracket.first, cfg.bracket.second};
  r["grid_points"] = cfg.grid_points;
  r["t_resolution"] = cfg.t_resolution;
  r["regime"] = cfg.regime;
  r["x1"] = cfg.x1;
  r["x2"] = cfg.x2;
  r["construct"] = cfg.construct;
  r["particles"] = {{"n", cfg.n_particles},
                    {"dt", cfg.dt},
                    {"t_burn", cfg.t_burn},
                    {"t_sample", cfg.t_sample},
                    {"seed", cfg.seed},
                    {"init",
                     {{"law", cfg.init.law == InitLaw::point_mass
                                  ? "point"
                                  : (cfg.init.law == InitLaw::uniform ? "uniform" : "gaussian")},
                      {"a", cfg.init.a},
                      {"b", cfg.init.b}}}};
  cfg.resolved = r;
  return cfg;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("atomic_write: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace mvsde::io

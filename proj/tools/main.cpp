#include <cmath>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvsde/critical.hpp"
#include "mvsde/density.hpp"
#include "mvsde/errors.hpp"
#include "mvsde/io.hpp"
#include "mvsde/model.hpp"
#include "mvsde/particle.hpp"
#include "mvsde/selfconsistency.hpp"
#include "mvsde/util.hpp"

using nlohmann::json;
using namespace mvsde;

namespace {

std::string csv_header(const io::JobConfig& cfg) {
  std::ostringstream os;
  os << "# version: " << io::kVersion << "\n";
  os << "# config: " << cfg.resolved.dump() << "\n";
  return os.str();
}

void emit(const io::JobConfig& cfg, const json& results, const std::string& csv_body) {
  std::string prefix = cfg.output_prefix.empty() ? cfg.command : cfg.output_prefix;
  if (cfg.format == "json" || cfg.format == "both") {
    json doc;
    doc["version"] = io::kVersion;
    doc["config"] = cfg.resolved;
    doc["results"] = results;
    io::atomic_write(prefix + ".json", doc.dump(2) + "\n");
  }
  if (cfg.format == "csv" || cfg.format == "both")
    io::atomic_write(prefix + ".csv", csv_header(cfg) + csv_body);
}

const char* tri_name(Tri t) {
  switch (t) {
    case Tri::holds:
      return "holds";
    case Tri::fails:
      return "fails";
    default:
      return "undetermined";
  }
}

json root_report_json(const RootReport& rep) {
  json roots = json::array();
  for (const auto& r : rep.roots)
    roots.push_back({{"m", r.m}, {"residual", r.residual}, {"slope_sign", r.slope_sign}});
  return {{"sigma", rep.sigma},
          {"roots", roots},
          {"scan_window", {rep.m_lo, rep.m_hi}},
          {"grid_points", rep.grid_points}};
}

void run_audit(const io::JobConfig& cfg) {
  Regime regime = cfg.regime == "symmetric-bistable"
                      ? Regime::symmetric_bistable
                      : (cfg.regime == "symmetric-multiwell" ? Regime::symmetric_multiwell
                                                             : Regime::generic);
  AssumptionReport rep = audit_assumptions(cfg.model, regime);
  json entries = json::array();
  std::ostringstream csv;
  csv << "id,section,status,witness,notes\n";
  for (const auto& e : rep.entries) {
    entries.push_back({{"id", e.id},
                       {"section", e.section},
                       {"status", tri_name(e.status)},
                       {"witness", e.witness},
                       {"notes", e.notes}});
    csv << e.id << "," << e.section << "," << tri_name(e.status) << ","
        << io::format_double(e.witness) << ",\"" << e.notes << "\"\n";
  }
  emit(cfg, {{"entries", entries}, {"all_hold", rep.all_hold()}}, csv.str());
}

void run_roots(const io::JobConfig& cfg) {
  ScanOptions opts;
  opts.grid_points = cfg.grid_points;
  RootReport rep = find_roots(cfg.model, cfg.sigma, opts);
  std::ostringstream csv;
  csv << "m,residual,slope_sign\n";
  for (const auto& r : rep.roots)
    csv << io::format_double(r.m) << "," << io::format_double(r.residual) << "," << r.slope_sign
        << "\n";
  emit(cfg, root_report_json(rep), csv.str());
}

void run_phase_diagram(const io::JobConfig& cfg) {
  if (cfg.sigma_grid.empty()) {
    emit(cfg, {{"sigmas", json::array()}, {"transitions", json::array()}},
         "sigma,n_roots\n");
    return;
  }
  PhaseDiagram pd = phase_diagram(cfg.model, cfg.sigma_grid);
  std::size_t kmax = 0;
  for (const auto& r : pd.reports) kmax = std::max(kmax, r.roots.size());
  std::ostringstream csv;
  csv << "sigma,n_roots";
  for (std::size_t k = 1; k <= kmax; ++k) csv << ",m_" << k;
  csv << "\n";
  json rows = json::array();
  for (std::size_t i = 0; i < pd.sigmas.size(); ++i) {
    csv << io::format_double(pd.sigmas[i]) << "," << pd.reports[i].roots.size();
    for (std::size_t k = 0; k < kmax; ++k) {
      csv << ",";
      if (k < pd.reports[i].roots.size()) csv << io::format_double(pd.reports[i].roots[k].m);
    }
    csv << "\n";
    rows.push_back(root_report_json(pd.reports[i]));
  }
  emit(cfg,
       {{"reports", rows}, {"transitions", pd.transitions}, {"failures", pd.failures}},
       csv.str());
}

void run_critical(const io::JobConfig& cfg) {
  CriticalResult r = sigma_c(cfg.model, cfg.bracket);
  std::ostringstream csv;
  csv << "sigma_c,found,iterations,slope\n";
  csv << (r.has_sigma_c ? io::format_double(r.sigma_c) : std::string("")) << ","
      << (r.has_sigma_c ? 1 : 0) << "," << r.iterations << ","
      << io::format_double(r.d_at_root_slope) << "\n";
  emit(cfg,
       {{"has_sigma_c", r.has_sigma_c},
        {"sigma_c", r.sigma_c},
        {"bracket", {r.bracket_lo, r.bracket_hi}},
        {"iterations", r.iterations},
        {"d_at_root_slope", r.d_at_root_slope},
        {"notes", r.notes}},
       csv.str());
}

void run_critical_curve(const io::JobConfig& cfg) {
  if (cfg.theta_grid.empty()) throw ValidationError("critical-curve: theta_grid is required");
  CriticalCurve curve = sigma_star_curve(cfg.model, cfg.theta_grid);
  std::ostringstream csv;
  csv << "theta,sigma_star\n";
  for (std::size_t i = 0; i < curve.thetas.size(); ++i)
    csv << io::format_double(curve.thetas[i]) << "," << io::format_double(curve.sigma_stars[i])
        << "\n";
  emit(cfg,
       {{"thetas", curve.thetas},
        {"sigma_stars", curve.sigma_stars},
        {"monotone", curve.monotone},
        {"failures", curve.failures}},
       csv.str());
}

void run_sigma_r(const io::JobConfig& cfg) {
  double sr = sigma_r(cfg.model, cfg.bracket);
  std::ostringstream csv;
  csv << "sigma_r\n" << io::format_double(sr) << "\n";
  emit(cfg, {{"sigma_r", sr}}, csv.str());
}

void run_multiwell_check(const io::JobConfig& cfg) {
  ModelSpec model = cfg.model;
  json construction;
  if (cfg.construct) {
    model = construct_multiwell(cfg.model, cfg.x1, cfg.x2);
    construction = {{"alpha1", model.shaping.alpha1},
                    {"alpha2", model.shaping.alpha2},
                    {"x1", model.shaping.x1},
                    {"x2", model.shaping.x2},
                    {"x_star", model.shaping.x_star_scale}};
  }
  AssumptionReport audit = audit_assumptions(model, Regime::symmetric_multiwell);
  C2fgReport c2 = check_c2fg(model, cfg.t_resolution);
  std::vector<double> grid = cfg.sigma_grid.empty() ? std::vector<double>{0.3, 1.0, 3.0}
                                                    : cfg.sigma_grid;
  VainillaReport va = check_vainilla(model, grid, model.theta);
  UpperEstimate ue = sigma_c_upper_estimate(model);

  json audit_entries = json::array();
  for (const auto& e : audit.entries)
    audit_entries.push_back({{"id", e.id},
                             {"section", e.section},
                             {"status", tri_name(e.status)},
                             {"witness", e.witness},
                             {"notes", e.notes}});
  json va_rows = json::array();
  for (const auto& r : va.rows)
    va_rows.push_back(
        {{"sigma", r.sigma}, {"ii1", r.ii1}, {"ii2", r.ii2}, {"pass1", r.pass1}, {"pass2", r.pass2}});

  std::ostringstream csv;
  csv << "key,value\n";
  csv << "sigma_r," << io::format_double(va.sigma_r) << "\n";
  csv << "c2fg1_margin," << io::format_double(c2.margin1) << "\n";
  csv << "c2fg2_margin," << io::format_double(c2.margin2) << "\n";
  csv << "bound," << io::format_double(ue.bound) << "\n";
  csv << "scan_estimate," << io::format_double(ue.scan_estimate) << "\n";

  emit(cfg,
       {{"construction", construction},
        {"audit", {{"entries", audit_entries}, {"all_hold", audit.all_hold()}}},
        {"c2fg",
         {{"pass1", c2.pass1},
          {"pass2", c2.pass2},
          {"margin1", c2.margin1},
          {"margin2", c2.margin2},
          {"first_violation1", c2.first_violation1},
          {"first_violation2", c2.first_violation2}}},
        {"vainilla",
         {{"sigma_r", va.sigma_r},
          {"sigma_r_eval", va.sigma_r_eval},
          {"I1_at_sigma_r", va.I1_at_sigma_r},
          {"ii5", va.ii5},
          {"rows", va_rows},
          {"all_pass", va.all_pass()}}},
        {"upper_estimate",
         {{"bound", ue.bound},
          {"scan_estimate", ue.scan_estimate},
          {"sigma_c_dominating", ue.sigma_c_dominating},
          {"sigma_r", ue.sigma_r_value}}}},
       csv.str());
}

void run_simulate(const io::JobConfig& cfg) {
  ParticleEnsemble e = init_ensemble(cfg.n_particles, cfg.init, cfg.seed, cfg.dt);
  const std::uint64_t burn_steps = static_cast<std::uint64_t>(std::llround(cfg.t_burn / cfg.dt));
  const std::uint64_t sample_steps =
      static_cast<std::uint64_t>(std::llround(cfg.t_sample / cfg.dt));

  std::ostringstream csv;
  csv << "t,mean,stderr\n";
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t count = 0;
  std::vector<double> sampled;
  sampled.reserve(sample_steps);
  for (std::uint64_t s = 0; s < burn_steps + sample_steps; ++s) {
    advance(e, cfg.model, cfg.sigma);
    double mean = e.mean_trace.back().second;
    double se = 0.0;
    if (s >= burn_steps) {
      ++count;
      sum += mean;
      sumsq += mean * mean;
      sampled.push_back(mean);
      if (count > 1) {
        double var = (sumsq - sum * sum / static_cast<double>(count)) / (count - 1.0);
        se = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
      }
    }
    csv << io::format_double(e.mean_trace.back().first) << "," << io::format_double(mean) << ","
        << io::format_double(se) << "\n";
    e.mean_trace.clear();
  }

  // batch-means summary over the sampled window (20 batches)
  constexpr int kBatches = 20;
  const std::size_t batch = sampled.size() / kBatches;
  MeanEstimate est;
  if (batch > 0) {
    std::vector<double> bm(kBatches);
    for (int b = 0; b < kBatches; ++b)
      bm[static_cast<std::size_t>(b)] = pairwise_mean(
          {sampled.data() + static_cast<std::size_t>(b) * batch, batch});
    est.mean = pairwise_mean(bm);
    double ss = 0.0;
    for (double v : bm) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / (kBatches * (kBatches - 1.0)));
  }
  emit(cfg, {{"mean", est.mean}, {"stderr", est.stderr_}}, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary measures and critical thresholds of mean-field SDEs"};
  std::string command, config_path, output, format;
  double sigma = -1.0;
  int threads = 0;
  app.add_option("command", command,
                 "audit | roots | phase-diagram | critical | critical-curve | sigma-r | "
                 "multiwell-check | simulate (default: from config)");
  app.add_option("--config", config_path, "job config JSON")->required();
  app.add_option("--output", output, "output path prefix");
  app.add_option("--format", format, "csv | json | both");
  app.add_option("--sigma", sigma, "sigma override (roots)");
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    io::JobConfig cfg = io::parse_config(config_path);
    if (!command.empty()) cfg.command = command;
    if (!output.empty()) cfg.output_prefix = output;
    if (!format.empty()) {
      if (format != "csv" && format != "json" && format != "both") {
        std::cerr << "error: invalid --format " << format << "\n";
        return 1;
      }
      cfg.format = format;
    }
    if (sigma > 0.0) cfg.sigma = sigma;
    cfg.resolved["command"] = cfg.command;
    cfg.resolved["format"] = cfg.format;
    cfg.resolved["sigma"] = cfg.sigma;
    set_max_threads(threads > 0 ? static_cast<unsigned>(threads) : 0);

    if (cfg.command == "audit")
      run_audit(cfg);
    else if (cfg.command == "roots")
      run_roots(cfg);
    else if (cfg.command == "phase-diagram")
      run_phase_diagram(cfg);
    else if (cfg.command == "critical")
      run_critical(cfg);
    else if (cfg.command == "critical-curve")
      run_critical_curve(cfg);
    else if (cfg.command == "sigma-r")
      run_sigma_r(cfg);
    else if (cfg.command == "multiwell-check")
      run_multiwell_check(cfg);
    else if (cfg.command == "simulate")
      run_simulate(cfg);
    else {
      std::cerr << "error: unknown command \"" << cfg.command << "\"\n";
      return 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

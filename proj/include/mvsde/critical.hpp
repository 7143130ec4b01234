#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvsde/model.hpp"
#include "mvsde/selfconsistency.hpp"

namespace mvsde {

struct CriticalResult {
  bool has_sigma_c = false;
  double sigma_c = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  int iterations = 0;
  double d_at_root_slope = 0.0;  // finite-difference d/dsigma of D at sigma_c
  std::string notes;
};

struct CriticalCurve {
  std::vector<double> thetas;
  std::vector<double> sigma_stars;
  std::vector<std::string> failures;  // per-theta diagnostics, empty = ok
  bool monotone = false;
};

struct PhaseDiagram {
  std::vector<double> sigmas;
  std::vector<RootReport> reports;
  std::vector<double> transitions;
  std::vector<std::string> failures;
};

struct VainillaRow {
  double sigma = 0.0;
  double ii1 = 0.0, ii2 = 0.0;
  bool pass1 = false, pass2 = false;
};

struct VainillaReport {
  double sigma_r = 0.0;
  double sigma_r_eval = 0.0;     // sigma at which ii5 was evaluated
  double I1_at_sigma_r = 0.0;
  bool ii5 = false;
  std::vector<VainillaRow> rows;
  bool all_pass() const;
};

struct C2fgReport {
  bool pass1 = false, pass2 = false;
  double margin1 = 0.0, margin2 = 0.0;  // min of the running integral
  double first_violation1 = -1.0, first_violation2 = -1.0;
  bool passed() const { return pass1 && pass2; }
};

struct UpperEstimate {
  double bound = 0.0;          // max(sigma_c of the dominating bistable, sigma_r)
  double scan_estimate = 0.0;  // largest sigma with a positive root of F
  double sigma_c_dominating = 0.0;
  double sigma_r_value = 0.0;
};

// D(sigma) = dF/dm at m = 0.
double D(const ModelSpec& model, double sigma,
         std::shared_ptr<const PotentialTables> tables = nullptr);

// Unique root of D for an audited bistable model; bracket expanded
// geometrically (floor 0.05), bisected to 1e-8. has_sigma_c = false when D is
// negative across the expanded bracket (no transition).
CriticalResult sigma_c(const ModelSpec& model,
                       std::pair<double, double> bracket_hint = {0.2, 2.0});

// sigma_c per theta with warm-started brackets; sigma* = 0 where no root.
CriticalCurve sigma_star_curve(ModelSpec model_family, const std::vector<double>& thetas);

// Unique sign change (- to +) of
//   H(sigma) = int_0^inf (atilde^3 - atilde) (-V')_- rho(x, 0) dx;
// 0 when H is already positive at the bracket floor (pure bistable case).
double sigma_r(const ModelSpec& model, std::pair<double, double> bracket_hint = {0.2, 2.0});

// Clamp to the dominating bistable drift: -V'_D = (-V')_+ on [0, x*],
// -(-V')_- beyond, extended oddly.
ModelSpec dominating_bistable(const ModelSpec& model);

UpperEstimate sigma_c_upper_estimate(const ModelSpec& model);

VainillaReport check_vainilla(ModelSpec model, const std::vector<double>& sigma_grid,
                              double theta);

// Running-integral inequalities in coordinates rescaled so x* = 1; requires
// P' = x and k = 1.
C2fgReport check_c2fg(const ModelSpec& model, int t_resolution = 2001);

// Piecewise rescaling of the drift (alpha1 on [0,x1], alpha2 on [x2,x*],
// 1 elsewhere, C1-blended) with alphas doubled until the two integral
// dominations hold with a 10% margin.
ModelSpec construct_multiwell(const ModelSpec& base, double x1, double x2);

PhaseDiagram phase_diagram(const ModelSpec& model, const std::vector<double>& sigma_grid);

}  // namespace mvsde

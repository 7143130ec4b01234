#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mvsde/function_spec.hpp"

namespace mvsde {

struct DiffusionSpec {
  FunctionSpec k_squared;  // must stay >= epsilon^2
  double epsilon = 1.0;

  double k2(double x) const { return k_squared(x); }
  double k(double x) const { return std::sqrt(k_squared(x)); }
  bool is_constant() const { return k_squared.is_constant(); }

  static DiffusionSpec unit();
};

// Piecewise reshaping of the drift V' used by the multi-well machinery.
// Both operations act on |x| and extend oddly, so an antisymmetric drift
// stays antisymmetric.
//
//   scaled:    V' -> scale(|x|) * V', with plateaus alpha1 on [0, x1],
//              1 on [x1, x2], alpha2 on [x2, x_star_scale], 1 beyond,
//              blended C1 over bands of width `blend` at the junctions.
//   dominated: clamp to the dominating bistable drift,
//              -V'_D = (-V')_+ on [0, x_star], -(-V')_- beyond.
struct DriftShaping {
  bool scaled = false;
  double x1 = 0.0, x2 = 0.0, x_star_scale = 0.0;
  double alpha1 = 1.0, alpha2 = 1.0;
  double blend = 0.01;

  bool dominated = false;
  double x_star = 0.0;

  // Split hints for quadrature (signed x where the shaped drift has kinks).
  std::vector<double> breakpoints;

  bool active() const { return scaled || dominated; }
  double scale_at(double u) const;  // u >= 0
};

struct ModelSpec {
  FunctionSpec v_prime;
  FunctionSpec p_prime;
  DiffusionSpec diffusion;
  double theta = 1.0;
  DriftShaping shaping;

  // V' with shaping applied. Shaping assumes an odd base V'.
  double drift_v(double x) const;

  // x^{*-1}(x) = (V'(x) + theta P'(x)) / theta, the inverse mode map.
  double x_star_inv(double x) const {
    return (drift_v(x) + theta * p_prime(x)) / theta;
  }

  bool is_symmetric(double tol = 1e-12) const {
    return v_prime.is_odd(tol) && p_prime.is_odd(tol) && diffusion.k_squared.is_even(tol);
  }
};

struct ModeResult {
  double x = 0.0;
  bool tie = false;
  double x_alt = 0.0;  // second argmax when tied
};

struct VPrimeZero {
  double x = 0.0;
  bool simple = true;
};

struct ThetaStarResult {
  double theta_star = 0.0;
  bool found = false;  // false: already monotone at the bracket bottom,
                       // or no admissible theta in the bracket (see notes)
  std::string notes;
};

enum class Tri { holds, fails, undetermined };

struct AssumptionEntry {
  int id = 0;
  std::string section;
  Tri status = Tri::undetermined;
  double witness = 0.0;  // location of the violation, when one was found
  std::string notes;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool all_hold() const;
  const AssumptionEntry* find(int id) const;
};

enum class Regime { generic, symmetric_bistable, symmetric_multiwell };

struct AuditOptions {
  double half_width = 0.0;  // 0: derive from the drift's root structure
  int grid_points = 2001;
};

// a(x) = int_0^x 1/k^2, by adaptive quadrature.
double a_of_x(const ModelSpec& model, double x);

// Effective potential anchored at 0:
//   Vbar_theta(x, m) = int_0^x (V' + theta (P' - m)) / k^2.
double effective_potential(const ModelSpec& model, double x, double m);

// Mode map x*(m). If x^{*-1} is strictly increasing on the audit window the
// unique solution of V'(x) + theta (P'(x) - m) = 0 is bracketed and bisected;
// otherwise the global argmin of Vbar(., m) is located by grid scan plus
// refinement, with ties reported and broken toward larger |x|.
ModeResult mode_x_star(const ModelSpec& model, double m, AuditOptions opts = {});

// All zeros of the (shaped) V' on [lo, hi]: sign changes refined by bisection,
// plus even-order touch points reported as non-simple.
std::vector<VPrimeZero> zeros_of_v_prime(const ModelSpec& model, double lo, double hi);

// Largest |x| among the zeros of V' on the audit window (0 when none).
double farthest_root(const ModelSpec& model, AuditOptions opts = {});

// Default half-width of the audit window.
double audit_half_width(const ModelSpec& model);

// Smallest theta in [search_lo, search_hi] such that V' + theta P' has a
// strictly positive derivative on the audit grid.
ThetaStarResult find_theta_star(const ModelSpec& model, double search_lo, double search_hi,
                                AuditOptions opts = {});

AssumptionReport audit_assumptions(const ModelSpec& model, Regime regime, AuditOptions opts = {});

}  // namespace mvsde

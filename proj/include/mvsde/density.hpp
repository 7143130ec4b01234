#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mvsde/model.hpp"

namespace mvsde {

// m-independent antiderivatives shared by every context built on one model:
//   W(x) = int_0^x (V' + theta P') / k^2   (so Vbar(x, m) = W(x) - theta m a(x))
//   A(x) = int_0^x 1 / k^2
//   P(x) = int_0^x P' / k^2
// Closed forms when k^2 is constant and the drift is unshaped; otherwise a
// knot table with one fixed Gauss-Legendre panel from the nearest knot.
struct PotentialTables {
  std::function<double(double)> W;
  std::function<double(double)> A;
  std::function<double(double)> P;

  static std::shared_ptr<const PotentialTables> build(const ModelSpec& model,
                                                      double half_width = 0.0);
};

enum class HalfLine { nonneg, nonpos, beyond_x_star, zero_to_x_star };

// Everything needed to integrate against the stationary density
//   rho(x) = (1/Z) (1/k^2) exp(-(2/sigma^2) Vbar(x, m))
// in shifted units: exponent(x) = -(2/sigma^2) Vbar + shift with shift chosen
// so the exponent peaks at 0.
struct DensityContext {
  ModelSpec model;
  double sigma = 1.0;
  double m = 0.0;

  double shift = 0.0;     // (2/sigma^2) * min Vbar
  double log_norm = 0.0;  // log of Z = int (1/k^2) exp(exponent)
  double x_lo = 0.0, x_hi = 0.0;
  double x_mode = 0.0;    // global minimizer of Vbar(., m)
  double x_star = 0.0;    // farthest root of V' (0 when none)
  std::vector<double> panel_edges;
  std::shared_ptr<const PotentialTables> tables;

  double vbar(double x) const { return tables->W(x) - model.theta * m * tables->A(x); }
  double exponent(double x) const {
    return -(2.0 / (sigma * sigma)) * vbar(x) + shift;
  }
  // unnormalized (shifted) weight
  double weight(double x) const;
  // normalized density
  double density(double x) const;
};

// Locates the exponent peak, certifies the truncation window via the growth
// of Vbar, seeds panel edges at every local minimum of Vbar (sigma-scaled so
// narrow Laplace peaks cannot be skipped), and normalizes.
DensityContext build_context(const ModelSpec& model, double sigma, double m,
                             std::shared_ptr<const PotentialTables> tables = nullptr);

// E[g] under the normalized density, over the truncation window.
double expectation(const DensityContext& ctx, const std::function<double(double)>& g);

// Same, restricted to a subinterval (normalization constant unchanged).
double half_line_expectation(const DensityContext& ctx, const std::function<double(double)>& g,
                             HalfLine side);

// int g * (1/k^2) exp(exponent) over the subinterval, in shifted units; the
// true unnormalized integral is this times exp(-shift).
double half_line_unnormalized(const DensityContext& ctx, const std::function<double(double)>& g,
                              HalfLine side);

}  // namespace mvsde

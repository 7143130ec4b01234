#pragma once

#include <memory>
#include <vector>

#include "mvsde/density.hpp"
#include "mvsde/model.hpp"

namespace mvsde {

struct RootInfo {
  double m = 0.0;
  double residual = 0.0;
  int slope_sign = 0;  // sign of dF/dm at the root
};

struct RootReport {
  double sigma = 0.0;
  std::vector<RootInfo> roots;
  double m_lo = 0.0, m_hi = 0.0;
  int grid_points = 0;
};

struct SeriesParts {
  double a = 0.0, b = 0.0, c = 0.0;
};

// Odd-moment coefficients of the m-expansion at m = 0. Values are stored in
// shifted-unnormalized units (a common positive factor exp(log_scale) relates
// them to the raw integrals), which leaves every sign and ratio intact.
struct SeriesCoefficients {
  double sigma = 0.0;
  int n_max = 0;
  std::vector<double> I;         // I(2n-1), n = 1..n_max
  std::vector<double> I_scaled;  // I(2n-1) / a(x*)^{2n-1}
  std::vector<SeriesParts> parts;
  double x_star = 0.0;
  double log_scale = 0.0;
};

struct ScanOptions {
  int grid_points = 401;
  double window = 0.0;  // 0: derive from the growth of x^{*-1}
  std::shared_ptr<const PotentialTables> tables;
};

// F(sigma, m) = (1/theta) E[-V'] under the stationary density at (sigma, m).
double F(const ModelSpec& model, double sigma, double m,
         std::shared_ptr<const PotentialTables> tables = nullptr);

// G(sigma, m) = E[P'] - m; equals F by integration by parts.
double G(const ModelSpec& model, double sigma, double m,
         std::shared_ptr<const PotentialTables> tables = nullptr);

// dF/dm in covariance form: (2/sigma^2) (E[a (-V')] - E[a] E[-V']).
double dFdm(const ModelSpec& model, double sigma, double m,
            std::shared_ptr<const PotentialTables> tables = nullptr);

// All roots of F(sigma, .): sign-change scan over a growth-derived window,
// bisection to |F| < 1e-10, dedup, slope sign from the covariance derivative.
RootReport find_roots(const ModelSpec& model, double sigma, ScanOptions opts = {});

// sigma -> 0 limit of F: -V'(x*(m)) / (theta k^2(x*(m))). At a mode tie the
// average of the two branch values is returned.
double laplace_limit(const ModelSpec& model, double m);

// I(2n-1), Itilde(2n-1) and the (a_n, b_n, c_n) split for n = 1..n_max,
// computed from the m = 0 density of a symmetric model.
SeriesCoefficients series_coefficients(const ModelSpec& model, double sigma, int n_max = 12);

}  // namespace mvsde

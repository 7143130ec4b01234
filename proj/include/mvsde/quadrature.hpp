#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mvsde/errors.hpp"

namespace mvsde {

struct GaussLegendre {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Nodes/weights by Newton iteration on the Legendre polynomial; cached per n.
const GaussLegendre& gauss_legendre(int n);

struct QuadOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  int panel_order = 25;
  int max_depth = 40;
};

namespace detail {

template <class F>
double gl_panel(F& f, double lo, double hi, const GaussLegendre& rule) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
  return s * h;
}

template <class F>
double refine_panel(F& f, double lo, double hi, double whole, const GaussLegendre& rule,
                    const QuadOptions& opts, double scale, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = gl_panel(f, lo, mid, rule);
  const double right = gl_panel(f, mid, hi, rule);
  const double halves = left + right;
  const double err = std::abs(whole - halves);
  if (err <= std::max(opts.abs_tol, opts.rel_tol * (std::abs(halves) + scale))) return halves;
  if (depth >= opts.max_depth)
    throw QuadratureFailure("adaptive quadrature: tolerance unreachable at depth limit");
  return refine_panel(f, lo, mid, left, rule, opts, scale, depth + 1) +
         refine_panel(f, mid, hi, right, rule, opts, scale, depth + 1);
}

}  // namespace detail

// Adaptive composite Gauss-Legendre integration over the panels defined by
// `edges` (sorted). Each panel is bisected until the whole-vs-halves estimates
// agree. `scale` anchors the relative tolerance for integrals that cancel.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& edges, QuadOptions opts = {},
                        double scale = 0.0) {
  if (edges.size() < 2) return 0.0;
  const GaussLegendre& rule = gauss_legendre(opts.panel_order);
  if (scale <= 0.0) {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      scale += std::abs(detail::gl_panel(f, edges[i], edges[i + 1], rule));
    scale = std::max(scale, opts.abs_tol);
  }
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] <= edges[i]) continue;
    double whole = detail::gl_panel(f, edges[i], edges[i + 1], rule);
    total += detail::refine_panel(f, edges[i], edges[i + 1], whole, rule, opts, scale, 0);
  }
  return total;
}

template <class F>
double integrate(F&& f, double lo, double hi, QuadOptions opts = {},
                 const std::vector<double>* breakpoints = nullptr) {
  if (hi <= lo) return 0.0;
  std::vector<double> edges{lo, hi};
  if (breakpoints) {
    for (double b : *breakpoints)
      if (b > lo && b < hi) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
  }
  return integrate_panels(f, edges, opts);
}

// Clips a sorted edge list to [lo, hi], inserting the endpoints.
std::vector<double> clip_edges(const std::vector<double>& edges, double lo, double hi);

}  // namespace mvsde

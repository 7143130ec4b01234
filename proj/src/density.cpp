#include "mvsde/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvsde/errors.hpp"
#include "mvsde/quadrature.hpp"

namespace mvsde {

namespace {

// exact antiderivative of a FunctionSpec divided by a constant k^2
std::function<double(double)> closed_antiderivative(const FunctionSpec& f, double k2c) {
  std::vector<double> b(f.poly.size() + 1, 0.0);
  for (std::size_t i = 0; i < f.poly.size(); ++i)
    b[i + 1] = f.poly[i] / (static_cast<double>(i + 1) * k2c);
  std::vector<TrigTerm> trig = f.trig;
  return [b, trig, k2c](double x) {
    double p = 0.0;
    for (std::size_t i = b.size(); i-- > 0;) p = p * x + b[i];
    for (const auto& t : trig) {
      if (t.frequency == 0.0)
        p += t.amplitude * x / k2c;
      else
        p += t.amplitude * std::sin(t.frequency * x) / (t.frequency * k2c);
    }
    return p;
  };
}

struct KnotTable {
  std::vector<double> knots;
  std::vector<double> vals;  // cumulative integral anchored at 0
  std::function<double(double)> integrand;

  double operator()(double x) const {
    const GaussLegendre& rule = gauss_legendre(25);
    auto panel = [&](double a, double b) {
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      double s = 0.0;
      for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * integrand(c + h * rule.x[i]);
      return s * h;
    };
    if (x <= knots.front()) return vals.front() - integrate(integrand, x, knots.front(), {});
    if (x >= knots.back()) return vals.back() + integrate(integrand, knots.back(), x, {});
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t j = static_cast<std::size_t>(it - knots.begin()) - 1;
    return vals[j] + panel(knots[j], x);
  }
};

KnotTable make_table(std::function<double(double)> integrand, double L,
                     const std::vector<double>& breakpoints) {
  KnotTable t;
  t.integrand = std::move(integrand);
  const double h = 0.0625;
  const int half = static_cast<int>(std::ceil(L / h));
  for (int i = -half; i <= half; ++i) t.knots.push_back(i * h);
  for (double b : breakpoints)
    if (std::abs(b) < half * h) t.knots.push_back(b);
  std::sort(t.knots.begin(), t.knots.end());
  t.knots.erase(std::unique(t.knots.begin(), t.knots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                t.knots.end());
  // cumulative values anchored at the knot 0 (present by construction)
  const GaussLegendre& rule = gauss_legendre(25);
  auto panel = [&](double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * t.integrand(c + hw * rule.x[i]);
    return s * hw;
  };
  t.vals.assign(t.knots.size(), 0.0);
  std::size_t zero = static_cast<std::size_t>(
      std::lower_bound(t.knots.begin(), t.knots.end(), -1e-13) - t.knots.begin());
  for (std::size_t i = zero; i + 1 < t.knots.size(); ++i)
    t.vals[i + 1] = t.vals[i] + panel(t.knots[i], t.knots[i + 1]);
  for (std::size_t i = zero; i-- > 0;) t.vals[i] = t.vals[i + 1] - panel(t.knots[i], t.knots[i + 1]);
  return t;
}

}  // namespace

std::shared_ptr<const PotentialTables> PotentialTables::build(const ModelSpec& model,
                                                              double half_width) {
  auto tables = std::make_shared<PotentialTables>();
  const bool closed = model.diffusion.is_constant() && !model.shaping.active();
  if (closed) {
    const double k2c = model.diffusion.k_squared.poly.empty() ? 1.0 : model.diffusion.k_squared.poly[0];
    FunctionSpec combined = model.v_prime;
    if (combined.poly.size() < model.p_prime.poly.size())
      combined.poly.resize(model.p_prime.poly.size(), 0.0);
    for (std::size_t i = 0; i < model.p_prime.poly.size(); ++i)
      combined.poly[i] += model.theta * model.p_prime.poly[i];
    for (const auto& t : model.p_prime.trig)
      combined.trig.push_back({model.theta * t.amplitude, t.frequency});
    tables->W = closed_antiderivative(combined, k2c);
    tables->A = [k2c](double x) { return x / k2c; };
    tables->P = closed_antiderivative(model.p_prime, k2c);
    return tables;
  }
  const double L = std::max(3.0 * (half_width > 0.0 ? half_width : audit_half_width(model)), 30.0);
  ModelSpec mcopy = model;
  tables->W = make_table(
      [mcopy](double x) {
        return (mcopy.drift_v(x) + mcopy.theta * mcopy.p_prime(x)) / mcopy.diffusion.k2(x);
      },
      L, model.shaping.breakpoints);
  tables->A = make_table([mcopy](double x) { return 1.0 / mcopy.diffusion.k2(x); }, L, {});
  tables->P = make_table([mcopy](double x) { return mcopy.p_prime(x) / mcopy.diffusion.k2(x); }, L, {});
  return tables;
}

double DensityContext::weight(double x) const {
  return std::exp(exponent(x)) / model.diffusion.k2(x);
}

double DensityContext::density(double x) const { return weight(x) * std::exp(-log_norm); }

namespace {

constexpr double kExponentFloor = -750.0;  // exp() fully negligible below this

}  // namespace

DensityContext build_context(const ModelSpec& model, double sigma, double m,
                             std::shared_ptr<const PotentialTables> tables) {
  if (!(sigma > 0.0)) throw Error("build_context: sigma must be positive");
  DensityContext ctx;
  ctx.model = model;
  ctx.sigma = sigma;
  ctx.m = m;
  ctx.tables = tables ? std::move(tables) : PotentialTables::build(model);
  ctx.x_star = farthest_root(model);

  const double w2s = 2.0 / (sigma * sigma);
  auto vb = [&](double x) { return ctx.tables->W(x) - model.theta * m * ctx.tables->A(x); };

  // coarse scan for the global minimum and all local minima of Vbar(., m)
  const double w1 = audit_half_width(model) + std::abs(m);
  const int n = 1601;
  std::vector<double> gx(n), gv(n);
  for (int i = 0; i < n; ++i) {
    gx[static_cast<std::size_t>(i)] = -w1 + 2.0 * w1 * i / (n - 1);
    gv[static_cast<std::size_t>(i)] = vb(gx[static_cast<std::size_t>(i)]);
  }
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < gv.size(); ++i)
    if (gv[i] <= gv[i - 1] && gv[i] < gv[i + 1]) minima.push_back(i);
  std::size_t best = 0;
  for (std::size_t i = 1; i < gv.size(); ++i)
    if (gv[i] < gv[best]) best = i;
  if (minima.empty()) minima.push_back(best);

  // refine the global minimizer by ternary search
  {
    std::size_t i = best;
    double a = gx[i > 0 ? i - 1 : i], b = gx[i + 1 < gx.size() ? i + 1 : i];
    for (int it = 0; it < 100 && b > a; ++it) {
      double c1 = a + (b - a) / 3.0, c2 = b - (b - a) / 3.0;
      if (vb(c1) < vb(c2))
        b = c2;
      else
        a = c1;
    }
    ctx.x_mode = 0.5 * (a + b);
  }
  const double vmin = vb(ctx.x_mode);
  ctx.shift = w2s * vmin;
  auto expo = [&](double x) { return -w2s * vb(x) + ctx.shift; };

  // extend the window until the exponent is fully negligible and Vbar is
  // still climbing (certifying the discarded tail)
  auto extend = [&](double start, double dir) {
    double x = start, step = std::max(0.25, sigma);
    double last_e = 0.0, last_slope = 0.0, last_x = start;
    while (true) {
      if (std::abs(x) > 1e6)
        throw NotNormalizable("build_context: Vbar does not confine the density (x=" +
                              std::to_string(last_x) + ", exponent=" + std::to_string(last_e) +
                              ", outward slope=" + std::to_string(last_slope) + ")");
      double e = expo(x);
      last_e = e;
      last_x = x;
      if (e < kExponentFloor) {
        double h = 1e-4 * (1.0 + std::abs(x));
        // Vbar must still climb in the outward direction
        double slope = dir * (vb(x + h) - vb(x - h)) / (2.0 * h);
        last_slope = slope;
        if (slope > 1e-8) return x;
      }
      x += dir * step;
      step *= 1.25;
    }
  };
  ctx.x_hi = extend(gx.back(), +1.0);
  ctx.x_lo = extend(gx.front(), -1.0);

  // panel edges: window ends, drift kinks, and sigma-scaled brackets around
  // every local minimum of Vbar so no Laplace peak can slip between panels
  std::vector<double> edges{ctx.x_lo, ctx.x_hi, ctx.x_mode};
  for (double b : model.shaping.breakpoints) edges.push_back(b);
  const double gh = gx[1] - gx[0];
  for (std::size_t i : minima) {
    if (i == 0 || i + 1 >= gv.size()) continue;
    double x0 = gx[i];
    double curv = std::max((gv[i - 1] - 2.0 * gv[i] + gv[i + 1]) / (gh * gh), 0.05);
    double delta = sigma / std::sqrt(2.0 * curv);
    edges.push_back(x0);
    edges.push_back(x0 - delta);
    edges.push_back(x0 + delta);
    edges.push_back(x0 - 5.0 * delta);
    edges.push_back(x0 + 5.0 * delta);
  }
  if (ctx.x_star > 0.0) {
    edges.push_back(ctx.x_star);
    edges.push_back(-ctx.x_star);
  }
  ctx.panel_edges = clip_edges(edges, ctx.x_lo, ctx.x_hi);

  QuadOptions zopts;
  zopts.rel_tol = 1e-12;
  zopts.abs_tol = 1e-300;
  DensityContext& c = ctx;
  double z = integrate_panels([&c](double x) { return c.weight(x); }, ctx.panel_edges, zopts);
  if (!(z > 0.0) || !std::isfinite(z))
    throw NotNormalizable("build_context: normalization integral not positive/finite");
  ctx.log_norm = std::log(z);
  return ctx;
}

namespace {

std::vector<double> side_edges(const DensityContext& ctx, HalfLine side) {
  double lo = ctx.x_lo, hi = ctx.x_hi;
  switch (side) {
    case HalfLine::nonneg:
      lo = 0.0;
      break;
    case HalfLine::nonpos:
      hi = 0.0;
      break;
    case HalfLine::beyond_x_star:
      lo = ctx.x_star;
      break;
    case HalfLine::zero_to_x_star:
      lo = 0.0;
      hi = std::min(ctx.x_hi, ctx.x_star);
      break;
  }
  lo = std::max(lo, ctx.x_lo);
  hi = std::min(hi, ctx.x_hi);
  if (hi <= lo) return {};
  return clip_edges(ctx.panel_edges, lo, hi);
}

double integrate_weighted(const DensityContext& ctx, const std::function<double(double)>& g,
                          const std::vector<double>& edges) {
  if (edges.size() < 2) return 0.0;
  QuadOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-13;
  // anchor the relative tolerance to the density's own mass so integrals that
  // cancel (odd g) still converge
  double scale = std::exp(ctx.log_norm);
  return integrate_panels([&](double x) { return g(x) * ctx.weight(x); }, edges, opts, scale);
}

}  // namespace

double expectation(const DensityContext& ctx, const std::function<double(double)>& g) {
  return integrate_weighted(ctx, g, ctx.panel_edges) * std::exp(-ctx.log_norm);
}

double half_line_expectation(const DensityContext& ctx, const std::function<double(double)>& g,
                             HalfLine side) {
  return integrate_weighted(ctx, g, side_edges(ctx, side)) * std::exp(-ctx.log_norm);
}

double half_line_unnormalized(const DensityContext& ctx, const std::function<double(double)>& g,
                              HalfLine side) {
  return integrate_weighted(ctx, g, side_edges(ctx, side));
}

}  // namespace mvsde

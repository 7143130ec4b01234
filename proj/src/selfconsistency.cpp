#include "mvsde/selfconsistency.hpp"

#include <algorithm>
#include <cmath>

#include "mvsde/errors.hpp"
#include "mvsde/util.hpp"

namespace mvsde {

double F(const ModelSpec& model, double sigma, double m,
         std::shared_ptr<const PotentialTables> tables) {
  DensityContext ctx = build_context(model, sigma, m, std::move(tables));
  double e = expectation(ctx, [&](double x) { return -model.drift_v(x); });
  return e / model.theta;
}

double G(const ModelSpec& model, double sigma, double m,
         std::shared_ptr<const PotentialTables> tables) {
  DensityContext ctx = build_context(model, sigma, m, std::move(tables));
  return expectation(ctx, [&](double x) { return model.p_prime(x); }) - m;
}

double dFdm(const ModelSpec& model, double sigma, double m,
            std::shared_ptr<const PotentialTables> tables) {
  DensityContext ctx = build_context(model, sigma, m, std::move(tables));
  const auto& A = ctx.tables->A;
  double e_av = expectation(ctx, [&](double x) { return -A(x) * model.drift_v(x); });
  double e_a = expectation(ctx, [&](double x) { return A(x); });
  double e_v = expectation(ctx, [&](double x) { return -model.drift_v(x); });
  return (2.0 / (sigma * sigma)) * (e_av - e_a * e_v);
}

namespace {

double scan_window(const ModelSpec& model) {
  double xf = farthest_root(model, {});
  double m_far = std::abs(model.x_star_inv(xf));
  m_far = std::max(m_far, std::abs(model.x_star_inv(-xf)));
  return 1.1 * m_far + 1.0;
}

}  // namespace

RootReport find_roots(const ModelSpec& model, double sigma, ScanOptions opts) {
  RootReport rep;
  rep.sigma = sigma;
  rep.grid_points = std::max(opts.grid_points, 400);
  const double M = opts.window > 0.0 ? opts.window : scan_window(model);
  rep.m_lo = -M;
  rep.m_hi = M;

  std::shared_ptr<const PotentialTables> tables =
      opts.tables ? opts.tables : PotentialTables::build(model);
  auto feval = [&](double m) { return F(model, sigma, m, tables); };

  const int n = rep.grid_points | 1;  // odd: include m = 0 exactly
  std::vector<double> gm(static_cast<std::size_t>(n)), gf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) gm[static_cast<std::size_t>(i)] = -M + 2.0 * M * i / (n - 1);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) { gf[i] = feval(gm[i]); });

  const double dedup = 1e-6 * 2.0 * M;
  std::vector<double> found;
  auto push = [&](double r) {
    for (double q : found)
      if (std::abs(q - r) < dedup) return;
    found.push_back(r);
  };
  for (std::size_t i = 0; i + 1 < gm.size(); ++i) {
    double fa = gf[i], fb = gf[i + 1];
    if (fa == 0.0 || std::abs(fa) < 1e-14) {
      push(gm[i]);
      continue;
    }
    if (fa * fb < 0.0) {
      double a = gm[i], b = gm[i + 1], fva = fa;
      double mid = 0.5 * (a + b), fmid = feval(mid);
      for (int it = 0; it < 120 && std::abs(fmid) > 1e-12 && b - a > 1e-15; ++it) {
        if (fva * fmid < 0.0)
          b = mid;
        else {
          a = mid;
          fva = fmid;
        }
        mid = 0.5 * (a + b);
        fmid = feval(mid);
      }
      push(mid);
    }
  }
  if (std::abs(gf.back()) < 1e-14) push(gm.back());

  if (found.empty()) {
    double fmin = std::abs(gf[0]);
    for (double v : gf) fmin = std::min(fmin, std::abs(v));
    if (gf.front() * gf.back() > 0.0 && fmin > 1e-9)
      throw WindowTooSmall("find_roots: F sign-definite on the scan window");
  }

  std::sort(found.begin(), found.end());
  for (double r : found) {
    RootInfo info;
    info.m = r;
    info.residual = std::abs(feval(r));
    double s = dFdm(model, sigma, r, tables);
    info.slope_sign = s > 1e-9 ? 1 : (s < -1e-9 ? -1 : 0);
    rep.roots.push_back(info);
  }
  return rep;
}

double laplace_limit(const ModelSpec& model, double m) {
  ModeResult mode = mode_x_star(model, m);
  auto val = [&](double x) { return -model.drift_v(x) / (model.diffusion.k2(x) * model.theta); };
  if (!mode.tie) return val(mode.x);
  return 0.5 * (val(mode.x) + val(mode.x_alt));
}

SeriesCoefficients series_coefficients(const ModelSpec& model, double sigma, int n_max) {
  if (!model.is_symmetric())
    throw NotApplicable("series_coefficients: model must be symmetric");
  DensityContext ctx = build_context(model, sigma, 0.0);
  if (!(ctx.x_star > 0.0))
    throw NotApplicable("series_coefficients: V' has no nonzero root");

  SeriesCoefficients sc;
  sc.sigma = sigma;
  sc.n_max = n_max;
  sc.x_star = ctx.x_star;
  sc.log_scale = -ctx.shift;

  const auto& A = ctx.tables->A;
  const double ax = A(ctx.x_star);
  for (int n = 1; n <= n_max; ++n) {
    const double p = 2.0 * n - 1.0;
    auto atil_pow = [&](double x) { return std::pow(A(x) / ax, p); };
    double itil = 2.0 * half_line_unnormalized(
                            ctx, [&](double x) { return -model.drift_v(x) * atil_pow(x); },
                            HalfLine::nonneg);
    SeriesParts parts;
    parts.a = half_line_unnormalized(
        ctx, [&](double x) { return std::max(-model.drift_v(x), 0.0) * atil_pow(x); },
        HalfLine::zero_to_x_star);
    parts.b = half_line_unnormalized(
        ctx, [&](double x) { return std::max(model.drift_v(x), 0.0) * atil_pow(x); },
        HalfLine::zero_to_x_star);
    parts.c = half_line_unnormalized(
        ctx, [&](double x) { return std::max(model.drift_v(x), 0.0) * atil_pow(x); },
        HalfLine::beyond_x_star);
    sc.I_scaled.push_back(itil);
    sc.I.push_back(itil * std::pow(ax, p));
    sc.parts.push_back(parts);
  }
  return sc;
}

}  // namespace mvsde

#include "mvsde/critical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mvsde/errors.hpp"
#include "mvsde/quadrature.hpp"
#include "mvsde/util.hpp"

namespace mvsde {

double D(const ModelSpec& model, double sigma, std::shared_ptr<const PotentialTables> tables) {
  return dFdm(model, sigma, 0.0, std::move(tables));
}

namespace {

constexpr double kSigmaFloor = 0.05;

}  // namespace

CriticalResult sigma_c(const ModelSpec& model, std::pair<double, double> bracket_hint) {
  auto tables = PotentialTables::build(model);
  CriticalResult res;
  double lo = std::max(std::min(bracket_hint.first, bracket_hint.second), kSigmaFloor);
  double hi = std::max(bracket_hint.second, lo * 2.0);

  double dlo = D(model, lo, tables);
  int guard = 0;
  while (dlo <= 0.0 && lo > kSigmaFloor) {
    lo = std::max(lo / 2.0, kSigmaFloor);
    dlo = D(model, lo, tables);
    if (++guard > 60) break;
  }
  if (dlo <= 0.0) {
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.notes = "D negative down to the sigma floor: no transition";
    return res;
  }
  double dhi = D(model, hi, tables);
  guard = 0;
  while (dhi >= 0.0) {
    hi *= 2.0;
    dhi = D(model, hi, tables);
    if (++guard > 60)
      throw NoSignChange("sigma_c: D stays positive after 60 doublings");
  }
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    double dm = D(model, mid, tables);
    ++res.iterations;
    (dm > 0.0 ? lo : hi) = mid;
  }
  res.has_sigma_c = true;
  res.sigma_c = 0.5 * (lo + hi);
  const double h = 1e-4 * std::max(1.0, res.sigma_c);
  res.d_at_root_slope =
      (D(model, res.sigma_c + h, tables) - D(model, res.sigma_c - h, tables)) / (2.0 * h);
  return res;
}

CriticalCurve sigma_star_curve(ModelSpec model_family, const std::vector<double>& thetas) {
  CriticalCurve curve;
  curve.thetas = thetas;
  std::pair<double, double> bracket{0.2, 2.0};
  for (double theta : thetas) {
    model_family.theta = theta;
    std::string failure;
    double star = 0.0;
    try {
      CriticalResult r = sigma_c(model_family, bracket);
      if (r.has_sigma_c) {
        star = r.sigma_c;
        bracket = {0.5 * star, 1.5 * star};  // warm start for the next theta
      }
    } catch (const Error& e) {
      failure = e.what();
    }
    curve.sigma_stars.push_back(star);
    curve.failures.push_back(failure);
  }
  curve.monotone = true;
  for (std::size_t i = 0; i + 1 < curve.sigma_stars.size(); ++i)
    if (curve.sigma_stars[i + 1] <= curve.sigma_stars[i] + 1e-6) curve.monotone = false;
  if (curve.sigma_stars.size() < 2) curve.monotone = true;
  return curve;
}

namespace {

double H_of_sigma(const ModelSpec& model, double sigma,
                  const std::shared_ptr<const PotentialTables>& tables) {
  DensityContext ctx = build_context(model, sigma, 0.0, tables);
  if (!(ctx.x_star > 0.0)) throw NotApplicable("sigma_r: V' has no nonzero root");
  const double ax = ctx.tables->A(ctx.x_star);
  return half_line_unnormalized(
      ctx,
      [&](double x) {
        double at = ctx.tables->A(x) / ax;
        return (at * at * at - at) * std::max(model.drift_v(x), 0.0);
      },
      HalfLine::nonneg);
}

}  // namespace

double sigma_r(const ModelSpec& model, std::pair<double, double> bracket_hint) {
  auto tables = PotentialTables::build(model);
  const double floor = 0.01;
  double lo = std::max(std::min(bracket_hint.first, bracket_hint.second), floor);
  double hi = std::max(bracket_hint.second, lo * 2.0);

  double hlo = H_of_sigma(model, lo, tables);
  int guard = 0;
  while (hlo >= 0.0 && lo > floor) {
    lo = std::max(lo / 2.0, floor);
    hlo = H_of_sigma(model, lo, tables);
    if (++guard > 60) break;
  }
  if (hlo >= 0.0) return 0.0;  // already past the sign change everywhere tested
  double hhi = H_of_sigma(model, hi, tables);
  guard = 0;
  while (hhi <= 0.0) {
    hi *= 2.0;
    hhi = H_of_sigma(model, hi, tables);
    if (++guard > 60) throw NoSignChange("sigma_r: H stays negative after 60 doublings");
  }
  while (hi - lo > 1e-8) {
    double mid = 0.5 * (lo + hi);
    (H_of_sigma(model, mid, tables) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ModelSpec dominating_bistable(const ModelSpec& model) {
  ModelSpec out = model;
  double xs = farthest_root(model, {});
  out.shaping.dominated = true;
  out.shaping.x_star = xs;
  double w = audit_half_width(model);
  for (const auto& z : zeros_of_v_prime(model, -w, w)) {
    out.shaping.breakpoints.push_back(z.x);
    out.shaping.breakpoints.push_back(-z.x);
  }
  out.shaping.breakpoints.push_back(xs);
  out.shaping.breakpoints.push_back(-xs);
  std::sort(out.shaping.breakpoints.begin(), out.shaping.breakpoints.end());
  out.shaping.breakpoints.erase(
      std::unique(out.shaping.breakpoints.begin(), out.shaping.breakpoints.end()),
      out.shaping.breakpoints.end());
  return out;
}

namespace {

// largest sigma at which F has a strictly positive root; 0 when none
double positive_root_scan(const ModelSpec& model, double sigma_top) {
  auto tables = PotentialTables::build(model);
  const double M = [&] {
    double xf = farthest_root(model, {});
    return 1.1 * std::max(std::abs(model.x_star_inv(xf)), std::abs(model.x_star_inv(-xf))) + 1.0;
  }();
  auto has_positive_root = [&](double sigma) {
    const int n = 1001;
    std::vector<double> fv(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      double m = M * static_cast<double>(i + 1) / n;
      fv[i] = F(model, sigma, m, tables);
    });
    // F(0) = 0 and F(M) < 0 for symmetric confined models; a positive root
    // exists iff F is positive somewhere on (0, M]
    for (double v : fv)
      if (v > 1e-12) return true;
    return false;
  };
  if (has_positive_root(sigma_top)) return sigma_top;  // top was too low; report it
  double lo = sigma_top / 2.0;
  while (!has_positive_root(lo)) {
    lo /= 2.0;
    if (lo < 1e-3) return 0.0;
  }
  double hi = lo * 2.0;
  while (hi - lo > 1e-4) {
    double mid = 0.5 * (lo + hi);
    (has_positive_root(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

UpperEstimate sigma_c_upper_estimate(const ModelSpec& model) {
  UpperEstimate est;
  ModelSpec dom = dominating_bistable(model);
  CriticalResult rd = sigma_c(dom);
  est.sigma_c_dominating = rd.has_sigma_c ? rd.sigma_c : 0.0;
  est.sigma_r_value = sigma_r(model);
  est.bound = std::max(est.sigma_c_dominating, est.sigma_r_value);
  est.scan_estimate = positive_root_scan(model, 1.5 * est.bound + 0.1);
  return est;
}

bool VainillaReport::all_pass() const {
  if (!ii5) return false;
  for (const auto& r : rows)
    if (!r.pass1 || !r.pass2) return false;
  return true;
}

VainillaReport check_vainilla(ModelSpec model, const std::vector<double>& sigma_grid,
                              double theta) {
  model.theta = theta;
  VainillaReport rep;
  rep.sigma_r = sigma_r(model);
  rep.sigma_r_eval = rep.sigma_r > kSigmaFloor ? rep.sigma_r : kSigmaFloor;
  SeriesCoefficients sc = series_coefficients(model, rep.sigma_r_eval, 1);
  rep.I1_at_sigma_r = sc.I_scaled[0];
  rep.ii5 = rep.I1_at_sigma_r > 0.0;

  auto tables = PotentialTables::build(model);
  for (double sigma : sigma_grid) {
    DensityContext ctx = build_context(model, sigma, 0.0, tables);
    const double ax = ctx.tables->A(ctx.x_star);
    const double vxs = ctx.vbar(ctx.x_star);
    const double pxs = ctx.tables->P(ctx.x_star);
    VainillaRow row;
    row.sigma = sigma;
    row.ii1 = half_line_unnormalized(
        ctx,
        [&](double x) {
          return (ctx.tables->A(x) / ax) * (-model.drift_v(x)) * (1.0 - ctx.vbar(x) / vxs);
        },
        HalfLine::nonneg);
    row.ii2 = half_line_unnormalized(
        ctx,
        [&](double x) {
          return (ctx.tables->A(x) / ax) * (-model.drift_v(x)) * (1.0 - ctx.tables->P(x) / pxs);
        },
        HalfLine::nonneg);
    row.pass1 = row.ii1 > 0.0;
    row.pass2 = row.ii2 > 0.0;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

bool is_identity_interaction(const ModelSpec& model) {
  const auto& p = model.p_prime;
  if (!p.trig.empty()) return false;
  for (std::size_t i = 0; i < p.poly.size(); ++i) {
    double want = i == 1 ? 1.0 : 0.0;
    if (std::abs(p.poly[i] - want) > 1e-12) return false;
  }
  if (p.poly.size() < 2) return false;
  const auto& k = model.diffusion.k_squared;
  if (!k.is_constant()) return false;
  double k0 = k.poly.empty() ? 1.0 : k.poly[0];
  return std::abs(k0 - 1.0) < 1e-12;
}

}  // namespace

C2fgReport check_c2fg(const ModelSpec& model, int t_resolution) {
  if (!is_identity_interaction(model))
    throw NotApplicable("check_c2fg: requires P' = x and k = 1");
  const double xs = farthest_root(model, {});
  if (!(xs > 0.0)) throw NotApplicable("check_c2fg: V' has no nonzero root");

  // rescaled coordinates y = x / x*; positive prefactors of the substitution
  // do not affect the signs being tested
  auto d = [&](double y) { return model.drift_v(xs * y); };
  std::vector<double> bps;  // kink locations in y
  for (double b : model.shaping.breakpoints) bps.push_back(b / xs);
  double w = audit_half_width(model);
  for (const auto& z : zeros_of_v_prime(model, 0.0, w)) bps.push_back(z.x / xs);
  std::sort(bps.begin(), bps.end());

  C2fgReport rep;
  auto run = [&](double t_max, const std::function<double(double)>& integrand, double& margin,
                 double& first_violation, bool& pass) {
    const int n = std::max(t_resolution, 16);
    double acc = 0.0, prev = 0.0;
    margin = std::numeric_limits<double>::infinity();
    first_violation = -1.0;
    pass = true;
    for (int i = 1; i < n; ++i) {
      double t = t_max * i / (n - 1);
      acc += integrate(integrand, prev, t, {}, &bps);
      prev = t;
      if (acc < margin) margin = acc;
      if (acc <= 0.0 && first_violation < 0.0) first_violation = t;
    }
    pass = first_violation < 0.0;
  };

  run(
      1.0,
      [&](double y) {
        return y * (1.0 - y) * std::max(-d(y), 0.0) - y * std::max(d(y), 0.0);
      },
      rep.margin1, rep.first_violation1, rep.pass1);
  run(
      std::sqrt(2.0),
      [&](double y) { return y * (std::max(-d(y), 0.0) - 2.0 * std::max(d(y), 0.0)); },
      rep.margin2, rep.first_violation2, rep.pass2);
  return rep;
}

ModelSpec construct_multiwell(const ModelSpec& base, double x1, double x2) {
  const double xs = farthest_root(base, {});
  if (!(xs > 0.0) || !(x1 > 0.0) || !(x2 > x1) || !(xs > x2))
    throw ConstructionFailure("construct_multiwell: junctions must satisfy 0 < x1 < x2 < x*");

  auto d = [&](double y) { return base.drift_v(xs * y); };  // rescaled drift, y = x/x*
  const double y1 = x1 / xs, y2 = x2 / xs;
  std::vector<double> bps{y1, y2, 1.0};
  double w = audit_half_width(base);
  for (const auto& z : zeros_of_v_prime(base, 0.0, w)) bps.push_back(z.x / xs);
  std::sort(bps.begin(), bps.end());

  const double L1 =
      integrate([&](double y) { return y * (1.0 - y) * std::max(-d(y), 0.0); }, 0.0, y1, {}, &bps);
  const double L1b = integrate([&](double y) { return y * std::max(-d(y), 0.0); }, 0.0, y1, {}, &bps);
  const double R1 = integrate([&](double y) { return y * std::max(d(y), 0.0); }, y1, y2, {}, &bps);
  const double L2 = integrate([&](double y) { return y * (-d(y)); }, y2, 1.0, {}, &bps);
  const double R2 =
      integrate([&](double y) { return y * std::max(d(y), 0.0); }, 1.0, std::sqrt(2.0), {}, &bps);
  if (L1 <= 0.0 || L1b <= 0.0 || L2 <= 0.0)
    throw ConstructionFailure("construct_multiwell: -V' not positive on [0,x1] and [x2,x*]");

  double alpha1 = 1.0, alpha2 = 1.0;
  int guard = 0;
  while (alpha1 * L1 < 1.1 * R1 || alpha1 * L1b < 2.2 * R1) {
    alpha1 *= 2.0;
    if (++guard > 40) throw ConstructionFailure("construct_multiwell: alpha1 exceeds 2^40");
  }
  guard = 0;
  while (alpha2 * L2 < 2.2 * R2) {
    alpha2 *= 2.0;
    if (++guard > 40) throw ConstructionFailure("construct_multiwell: alpha2 exceeds 2^40");
  }

  ModelSpec out = base;
  out.shaping.scaled = true;
  out.shaping.x1 = x1;
  out.shaping.x2 = x2;
  out.shaping.x_star_scale = xs;
  out.shaping.alpha1 = alpha1;
  out.shaping.alpha2 = alpha2;
  out.shaping.blend = 0.01;
  for (double j : {x1, x2, xs}) {
    for (double s : {-1.0, 1.0}) {
      out.shaping.breakpoints.push_back(s * (j - 0.005));
      out.shaping.breakpoints.push_back(s * j);
      out.shaping.breakpoints.push_back(s * (j + 0.005));
    }
  }
  std::sort(out.shaping.breakpoints.begin(), out.shaping.breakpoints.end());
  return out;
}

PhaseDiagram phase_diagram(const ModelSpec& model, const std::vector<double>& sigma_grid) {
  PhaseDiagram pd;
  pd.sigmas = sigma_grid;
  pd.failures.assign(sigma_grid.size(), "");
  pd.reports.assign(sigma_grid.size(), {});
  auto tables = PotentialTables::build(model);
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    try {
      ScanOptions opts;
      opts.tables = tables;
      pd.reports[i] = find_roots(model, sigma_grid[i], opts);
    } catch (const Error& e) {
      pd.failures[i] = e.what();
    }
  }
  auto count_at = [&](double sigma) {
    ScanOptions opts;
    opts.tables = tables;
    return find_roots(model, sigma, opts).roots.size();
  };
  for (std::size_t i = 0; i + 1 < sigma_grid.size(); ++i) {
    if (!pd.failures[i].empty() || !pd.failures[i + 1].empty()) continue;
    std::size_t ca = pd.reports[i].roots.size(), cb = pd.reports[i + 1].roots.size();
    if (ca == cb) continue;
    double lo = sigma_grid[i], hi = sigma_grid[i + 1];
    while (hi - lo > 1e-4) {
      double mid = 0.5 * (lo + hi);
      (count_at(mid) == ca ? lo : hi) = mid;
    }
    pd.transitions.push_back(0.5 * (lo + hi));
  }
  return pd;
}

}  // namespace mvsde

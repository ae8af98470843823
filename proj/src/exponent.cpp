#include "erexp/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace erexp::exponent {

using numerics::binary_entropy;
using numerics::kl_divergence;
using numerics::kNegInf;

double h_delta(const spectral::SpectralShape& shape, double delta, double omega) {
  if (!(omega > 0.0 && delta <= 1.0 && omega <= delta))
    throw std::invalid_argument("h_delta: need 0 < omega <= delta <= 1");
  return -delta * binary_entropy(omega / delta) + binary_entropy(omega) -
         shape.G(omega);
}

namespace {

// omega samples for the inner infimum: geometric points resolving the
// approach to 0 plus uniform points across (0, delta].
std::vector<double> inner_grid(double delta, const GridOptions& opt) {
  std::vector<double> g;
  g.reserve(opt.inner_log_points + opt.inner_lin_points);
  const double lo = std::min(opt.omega_min, delta * 0.5);
  const double la = std::log(lo), lb = std::log(delta);
  for (int i = 0; i < opt.inner_log_points; ++i)
    g.push_back(std::min(delta, std::exp(la + (lb - la) * i / (opt.inner_log_points - 1))));
  for (int i = 1; i <= opt.inner_lin_points; ++i)
    g.push_back(std::min(delta, delta * i / opt.inner_lin_points));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double inner_infimum(const spectral::SpectralShape& shape, double delta,
                     const GridOptions& opt) {
  const auto grid = inner_grid(delta, opt);
  auto f = [&](double w) { return h_delta(shape, delta, w); };
  double best = std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (std::isfinite(v) && v < best) {
      best = v;
      best_i = static_cast<int>(i);
    }
  }
  if (best_i >= 0) {
    const double a = best_i > 0 ? grid[best_i - 1] : grid[best_i];
    const double b = best_i + 1 < static_cast<int>(grid.size())
                         ? grid[best_i + 1]
                         : grid[best_i];
    if (a < b) {
      auto ref = numerics::detail::golden_refine(f, a, b, opt.refine_tol);
      if (std::isfinite(ref.min)) best = std::min(best, ref.min);
    }
  }
  // h_delta(omega) -> -G(0+) = -gamma as omega -> 0+
  if (std::isfinite(shape.gamma)) best = std::min(best, -shape.gamma);
  return best;
}

}  // namespace

double g_plus(const spectral::SpectralShape& shape, double delta,
              const GridOptions& opt) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("g_plus: delta must be in (0,1]");
  return std::max(0.0, inner_infimum(shape, delta, opt));
}

ExponentPoint exponent_lower_bound(const spectral::SpectralShape& shape,
                                   double epsilon, const GridOptions& opt,
                                   std::optional<double> warm_start) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("exponent_lower_bound: epsilon must be in (0,1)");
  auto f = [&](double d) { return kl_divergence(d, epsilon) + g_plus(shape, d, opt); };

  const int n = opt.outer_points;
  const double h = 1.0 / n;
  double best_v = std::numeric_limits<double>::infinity();
  double best_d = epsilon;
  auto consider = [&](double d, double v) {
    if (std::isfinite(v) && v < best_v) {
      best_v = v;
      best_d = d;
    }
  };
  for (int i = 1; i <= n; ++i) {
    const double d = static_cast<double>(i) / n;
    consider(d, f(d));
  }
  // delta = epsilon zeroes the divergence term; always worth a look
  consider(epsilon, f(epsilon));
  const double edge = 1.0 - shape.params.rate;
  if (edge > 0.0 && edge <= 1.0) consider(edge, f(edge));

  auto refine_around = [&](double center) {
    const double a = std::max(h * 0.25, center - h);
    const double b = std::min(1.0, center + h);
    if (a >= b) return;
    auto ref = numerics::detail::golden_refine(f, a, b, opt.refine_tol);
    consider(ref.argmin, ref.min);
  };
  refine_around(best_d);
  if (warm_start && *warm_start > 0.0 && *warm_start <= 1.0)
    refine_around(*warm_start);

  return ExponentPoint{epsilon, std::max(0.0, best_v), best_d};
}

namespace {

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] < 1.0))
      throw std::invalid_argument("exponent_curve: epsilon grid outside (0,1)");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("exponent_curve: epsilon grid not strictly increasing");
  }
}

}  // namespace

ExponentCurve exponent_curve(const spectral::SpectralShape& shape,
                             std::span<const double> grid,
                             const GridOptions& opt) {
  check_grid(grid);
  ExponentCurve curve;
  curve.shape_id = shape.id;
  curve.points.resize(grid.size());
  const auto m = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    curve.points[i] = exponent_lower_bound(shape, grid[i], opt);
  return curve;
}

ExponentCurve exponent_curve_serial(const spectral::SpectralShape& shape,
                                    std::span<const double> grid,
                                    const GridOptions& opt) {
  check_grid(grid);
  ExponentCurve curve;
  curve.shape_id = shape.id;
  curve.points.reserve(grid.size());
  std::optional<double> warm;
  for (double eps : grid) {
    auto p = exponent_lower_bound(shape, eps, opt, warm);
    warm = p.argmin_delta;
    curve.points.push_back(p);
  }
  return curve;
}

ThresholdResult threshold_bisection(const spectral::SpectralShape& shape,
                                    const GridOptions& opt) {
  ThresholdResult res;
  res.method = ThresholdMethod::bisection;
  if (!(shape.gamma < 0.0)) {
    // the bound is identically zero for such shapes
    res.delta_star = 0.0;
    res.useful = false;
    return res;
  }
  const double hi = 1.0 - shape.params.rate;
  const double lo = std::min(1e-6, hi * 0.5);
  long evals = 0;
  auto positive = [&](double d) {
    ++evals;
    return g_plus(shape, d, opt) > opt.tol_pos;
  };
  if (positive(hi)) {
    // g+ still positive at 1-r (e.g. interpolation error of a sampled
    // shape); the supremum over (0, 1-r] is the right edge itself
    res.delta_star = hi;
    res.evaluations = evals;
    return res;
  }
  res.delta_star = numerics::bisect_threshold(positive, lo, hi, opt.bisect_tol);
  res.evaluations = evals;
  return res;
}

double exponent_random_linear_closed_form(const spectral::EnsembleParams& params,
                                          double epsilon) {
  params.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("closed form: epsilon must be in (0,1)");
  const double r = params.rate;
  const double q = params.field_order;
  if (epsilon >= 1.0 - r) return 0.0;
  const double eps_c = (1.0 - r) / (1.0 + (q - 1.0) * r);
  if (epsilon < eps_c)
    return -std::log2((1.0 - epsilon) / q + epsilon) - r * std::log2(q);
  return kl_divergence(1.0 - r, epsilon);
}

ThresholdResult threshold_raptor(const spectral::RaptorParams& params,
                                 const GridOptions& opt) {
  params.validate();
  if (!membership_in_P(params))
    throw std::domain_error("threshold_raptor: ensemble outside the usefulness region");

  const double ri = params.inner_rate, ro = params.outer_rate;
  const auto& dist = params.omega;
  long evals = 0;

  // residuals of the stationarity system in (delta, lambda)
  auto res1 = [&](double delta, double lambda) {
    ++evals;
    return ri * (1.0 - ro) - ri * binary_entropy(lambda) -
           (1.0 - delta) * std::log2(1.0 - dist.rho(lambda));
  };
  auto res2 = [&](double delta, double lambda) {
    ++evals;
    return ri * std::log2((1.0 - lambda) / lambda) -
           (1.0 - delta) / (1.0 - dist.rho(lambda)) * dist.drho(lambda) *
               numerics::kLog2E;
  };

  // lambda(delta): first sign change of the second residual scanning lambda
  // upward from 0 (geometric grid), then bisection
  auto lambda_of = [&](double delta) -> std::optional<double> {
    const int n = 400;
    const double llo = 1e-9, lhi = 0.5;
    double prev_l = llo, prev_f = res2(delta, prev_l);
    for (int i = 1; i <= n; ++i) {
      const double l = llo * std::pow(lhi / llo, static_cast<double>(i) / n);
      const double fl = res2(delta, l);
      if (std::isfinite(prev_f) && std::isfinite(fl) && prev_f * fl <= 0.0) {
        double a = prev_l, b = l, fa = prev_f;
        while (b - a > 1e-14) {
          const double mid = 0.5 * (a + b);
          const double fm = res2(delta, mid);
          if (fa * fm <= 0.0)
            b = mid;
          else {
            a = mid;
            fa = fm;
          }
        }
        return 0.5 * (a + b);
      }
      prev_l = l;
      prev_f = fl;
    }
    return std::nullopt;
  };

  // outer scan upward in delta: the smallest sign change of the first
  // residual is the threshold
  const double dmax = 1.0 - params.overall_rate();
  double prev_d = 0.0;
  std::optional<double> prev_r;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool found = false;
  for (double d = opt.scan_step; d <= dmax + 1e-12 && !found; d += opt.scan_step) {
    const auto lam = lambda_of(d);
    if (!lam) continue;
    const double r1 = res1(d, *lam);
    if (prev_r && std::isfinite(r1) && (*prev_r) * r1 <= 0.0) {
      bracket_lo = prev_d;
      bracket_hi = d;
      found = true;
      break;
    }
    prev_d = d;
    prev_r = r1;
  }
  if (!found)
    throw numerics::convergence_error(
        "threshold_raptor: no sign change in the outer scan");

  // bisect the bracket, then polish the pair with the 2x2 Newton solve
  double a = bracket_lo, b = bracket_hi;
  double fa = *prev_r;
  while (b - a > 1e-10) {
    const double mid = 0.5 * (a + b);
    const auto lam = lambda_of(mid);
    if (!lam) break;
    const double fm = res1(mid, *lam);
    if (fa * fm <= 0.0)
      b = mid;
    else {
      a = mid;
      fa = fm;
    }
  }
  double delta_hat = 0.5 * (a + b);
  auto lam_hat = lambda_of(delta_hat);
  if (!lam_hat)
    throw numerics::convergence_error("threshold_raptor: lost the lambda root");

  numerics::Solve2x2Options sopt;
  sopt.tol = 1e-12;
  sopt.x_bracket = {bracket_lo, bracket_hi};
  sopt.y_bracket = {1e-9, 0.5};
  auto F = [&](double d, double l) {
    return numerics::Vec2{res1(d, l), res2(d, l)};
  };
  auto [rx, ry] = numerics::solve_2x2(F, numerics::Vec2{delta_hat, *lam_hat}, sopt);

  const double rho_hat = dist.rho(ry.x);
  if (rho_hat > 1.0 - 1e-9)
    throw numerics::convergence_error(
        "threshold_raptor: inner mix probability degenerated toward 1");

  ThresholdResult res;
  res.method = ThresholdMethod::system_2x2;
  res.delta_star = rx.x;
  res.lambda_hat = ry.x;
  res.residuals = {rx.residual, ry.residual};
  res.evaluations = evals;
  res.useful = true;
  return res;
}

const char* to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::bisection:
      return "bisection";
    case ThresholdMethod::closed_form:
      return "closed_form";
    case ThresholdMethod::system_2x2:
      return "system_2x2";
  }
  return "unknown";
}

}  // namespace erexp::exponent

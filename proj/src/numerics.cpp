#include "erexp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace erexp::numerics {

double binary_entropy(double u) {
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("binary_entropy: u outside [0,1]");
  if (u == 0.0 || u == 1.0) return 0.0;
  return -u * std::log2(u) - (1.0 - u) * std::log2(1.0 - u);
}

double kl_divergence(double u, double v) {
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("kl_divergence: u outside [0,1]");
  if (v <= 0.0 || v >= 1.0) {
    // Divergence is finite only when the u-mass sits where v has mass.
    if (v == 0.0 && u == 0.0) return 0.0;
    if (v == 1.0 && u == 1.0) return 0.0;
    throw std::domain_error("kl_divergence: v in {0,1} with mismatched u");
  }
  double t = 0.0;
  if (u > 0.0) t += u * std::log2(u / v);
  if (u < 1.0) t += (1.0 - u) * std::log2((1.0 - u) / (1.0 - v));
  return t;
}

double log2_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log2(1.0 + std::exp2(b - a));
}

double log2_sum(std::span<const double> terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf || std::isinf(m)) return m;
  double acc = 0.0;
  for (double t : terms) acc += std::exp2(t - m);
  return m + std::log2(acc);
}

LogValue log_binomial(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) throw std::invalid_argument("log_binomial: need 0 <= k <= n");
  if (k == 0 || k == n) return LogValue(0.0);
  const double l = std::lgamma(static_cast<double>(n) + 1.0) -
                   std::lgamma(static_cast<double>(k) + 1.0) -
                   std::lgamma(static_cast<double>(n - k) + 1.0);
  return LogValue(l * kLog2E);
}

namespace {

double norm_inf(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// Nested bisection: inner solve of F2(x, .) = 0, outer on F1(x, y*(x)).
// Scans for the first sign change on a uniform grid before bisecting.
std::pair<RootInfo, RootInfo> nested_bisection(
    const std::function<Vec2(double, double)>& F,
    std::pair<double, double> xb, std::pair<double, double> yb, double tol,
    long iterations_so_far) {
  constexpr int kScan = 256;

  auto inner = [&](double x) -> std::optional<double> {
    double prev_y = yb.first;
    double prev_f = F(x, prev_y).y;
    for (int i = 1; i <= kScan; ++i) {
      const double y = yb.first + (yb.second - yb.first) * i / kScan;
      const double fy = F(x, y).y;
      if (std::isfinite(prev_f) && std::isfinite(fy) && prev_f * fy <= 0.0) {
        double a = prev_y, b = y, fa = prev_f;
        while (b - a > 1e-15) {
          const double mid = 0.5 * (a + b);
          const double fm = F(x, mid).y;
          if (fa * fm <= 0.0)
            b = mid;
          else {
            a = mid;
            fa = fm;
          }
        }
        return 0.5 * (a + b);
      }
      prev_y = y;
      prev_f = fy;
    }
    return std::nullopt;
  };

  auto outer_res = [&](double x) -> std::optional<double> {
    auto y = inner(x);
    if (!y) return std::nullopt;
    return F(x, *y).x;
  };

  double prev_x = xb.first;
  std::optional<double> prev_r = outer_res(prev_x);
  for (int i = 1; i <= kScan; ++i) {
    const double x = xb.first + (xb.second - xb.first) * i / kScan;
    const std::optional<double> rx = outer_res(x);
    if (prev_r && rx && (*prev_r) * (*rx) <= 0.0) {
      double a = prev_x, b = x, fa = *prev_r;
      while (b - a > 1e-14) {
        const double mid = 0.5 * (a + b);
        const auto fm = outer_res(mid);
        if (!fm) break;
        if (fa * (*fm) <= 0.0)
          b = mid;
        else {
          a = mid;
          fa = *fm;
        }
      }
      const double x_root = 0.5 * (a + b);
      const auto y_root = inner(x_root);
      if (y_root) {
        const Vec2 r = F(x_root, *y_root);
        RootInfo rx_info{x_root, std::abs(r.x), iterations_so_far};
        RootInfo ry_info{*y_root, std::abs(r.y), iterations_so_far};
        if (norm_inf(r) < tol * 10) return {rx_info, ry_info};
        convergence_error err("solve_2x2: nested bisection stalled above tolerance");
        err.best_x = x_root;
        err.best_y = *y_root;
        err.best_residual = norm_inf(r);
        throw err;
      }
    }
    prev_x = x;
    prev_r = rx;
  }
  throw convergence_error("solve_2x2: nested bisection found no sign change");
}

}  // namespace

std::pair<RootInfo, RootInfo> solve_2x2(
    const std::function<Vec2(double, double)>& F, Vec2 x0,
    Solve2x2Options opt) {
  Vec2 p = x0;
  Vec2 f = F(p.x, p.y);
  long iters = 0;
  bool stagnated = false;

  while (iters < opt.max_iterations && std::isfinite(norm_inf(f))) {
    if (norm_inf(f) < opt.tol) {
      return {RootInfo{p.x, std::abs(f.x), iters},
              RootInfo{p.y, std::abs(f.y), iters}};
    }
    // central-difference Jacobian
    const double hx = std::max(1e-8, 1e-7 * std::abs(p.x));
    const double hy = std::max(1e-8, 1e-7 * std::abs(p.y));
    const Vec2 fxp = F(p.x + hx, p.y), fxm = F(p.x - hx, p.y);
    const Vec2 fyp = F(p.x, p.y + hy), fym = F(p.x, p.y - hy);
    const double j11 = (fxp.x - fxm.x) / (2 * hx), j12 = (fyp.x - fym.x) / (2 * hy);
    const double j21 = (fxp.y - fxm.y) / (2 * hx), j22 = (fyp.y - fym.y) / (2 * hy);
    const double det = j11 * j22 - j12 * j21;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) {
      stagnated = true;
      break;
    }
    const double dx = (-f.x * j22 + f.y * j12) / det;
    const double dy = (-j11 * f.y + j21 * f.x) / det;

    // damping: halve the step until the residual norm decreases
    double step = 1.0;
    bool improved = false;
    for (int h = 0; h < opt.max_halvings; ++h) {
      const Vec2 cand{p.x + step * dx, p.y + step * dy};
      const Vec2 fc = F(cand.x, cand.y);
      if (std::isfinite(norm_inf(fc)) && norm_inf(fc) < norm_inf(f)) {
        p = cand;
        f = fc;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    ++iters;
    if (!improved) {
      stagnated = true;
      break;
    }
  }

  if (norm_inf(f) < opt.tol) {
    return {RootInfo{p.x, std::abs(f.x), iters},
            RootInfo{p.y, std::abs(f.y), iters}};
  }
  if ((stagnated || iters >= opt.max_iterations) && opt.x_bracket && opt.y_bracket) {
    return nested_bisection(F, *opt.x_bracket, *opt.y_bracket, opt.tol, iters);
  }
  convergence_error err("solve_2x2: no convergence within iteration cap");
  err.best_x = p.x;
  err.best_y = p.y;
  err.best_residual = norm_inf(f);
  throw err;
}

}  // namespace erexp::numerics

#ifndef EREXP_NUMERICS_HPP
#define EREXP_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

// Shared mathematical kernel. All logarithms are base 2; the convention
// 0*log(0) = 0 applies throughout.
namespace erexp::numerics {

inline constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Binary entropy H_b(u) in bits; endpoints u in {0,1} return 0 by continuity.
double binary_entropy(double u);

/// KL divergence D(u||v) between Bernoulli(u) and Bernoulli(v), in bits.
/// Nonnegative, zero iff u == v. Throws std::domain_error when v in {0,1}
/// with mismatched u (the divergence is +inf there).
double kl_divergence(double u, double v);

// A nonnegative quantity x stored as log2(x); -inf encodes x == 0.
struct LogValue {
  double log2_value = kNegInf;

  LogValue() = default;
  explicit LogValue(double lv) : log2_value(lv) {}

  static LogValue from_linear(double x) {
    return LogValue(x > 0 ? std::log2(x) : kNegInf);
  }
  double linear() const { return std::exp2(log2_value); }
  bool is_zero() const { return std::isinf(log2_value) && log2_value < 0; }
};

/// log2(2^a + 2^b), safe against -inf operands.
double log2_add(double a, double b);

/// log2 of the sum of 2^t over all t in terms (max-shifted accumulation).
double log2_sum(std::span<const double> terms);

/// Exact log2 of the binomial coefficient C(n, k) via log-gamma.
/// Throws std::invalid_argument when k > n or either argument is negative.
LogValue log_binomial(std::int64_t n, std::int64_t k);

struct MinimizeOptions {
  int grid_points = 512;    // coarse scan resolution
  double tol = 1e-10;       // absolute interval tolerance for refinement
};

struct MinimizeResult {
  double argmin = 0;
  double min = std::numeric_limits<double>::infinity();
  long evaluations = 0;
};

struct evaluation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct convergence_error : std::runtime_error {
  double best_x = 0, best_y = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  explicit convergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Golden-section refinement of a minimum known to lie in [a, b].
template <class F>
MinimizeResult golden_refine(F&& f, double a, double b, double tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  MinimizeResult res;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  res.evaluations = 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++res.evaluations;
  }
  res.argmin = fc < fd ? c : d;
  res.min = std::min(fc, fd);
  return res;
}

}  // namespace detail

/// Deterministic 1-D minimization on [lo, hi]: coarse grid scan followed by
/// golden-section refinement on the bracket around the best sample.
/// Non-finite samples are skipped; throws evaluation_error when no sample
/// is finite.
template <class F>
MinimizeResult minimize_1d(F&& f, double lo, double hi,
                           MinimizeOptions opt = {}) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_1d: lo must be < hi");
  const int n = opt.grid_points;
  MinimizeResult best;
  int best_i = -1;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / n;
    const double y = f(x);
    ++best.evaluations;
    if (std::isfinite(y) && y < best.min) {
      best.min = y;
      best.argmin = x;
      best_i = i;
    }
  }
  if (best_i < 0) throw evaluation_error("minimize_1d: objective non-finite on the whole interval");

  const double h = (hi - lo) / n;
  const double a = std::max(lo, best.argmin - h);
  const double b = std::min(hi, best.argmin + h);
  auto refined = detail::golden_refine(f, a, b, opt.tol);
  best.evaluations += refined.evaluations;
  if (std::isfinite(refined.min) && refined.min < best.min) {
    best.min = refined.min;
    best.argmin = refined.argmin;
  }
  return best;
}

/// Bisection for the crossover of a monotone predicate: p(lo) must be true,
/// p(hi) false, with a single true->false transition in between. Returns the
/// crossover within tol. Throws std::invalid_argument when the bracket does
/// not straddle.
template <class P>
double bisect_threshold(P&& p, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("bisect_threshold: lo must be < hi");
  if (!p(lo)) throw std::invalid_argument("bisect_threshold: p(lo) is false");
  if (p(hi)) throw std::invalid_argument("bisect_threshold: p(hi) is true");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (p(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Vec2 {
  double x = 0, y = 0;
};

struct RootInfo {
  double x = 0;
  double residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
};

struct Solve2x2Options {
  double tol = 1e-10;
  int max_iterations = 200;
  int max_halvings = 40;
  // Brackets enable the nested-bisection fallback when Newton stagnates:
  // the inner bisection solves the second component in y at fixed x, the
  // outer bisection drives the first component in x.
  std::optional<std::pair<double, double>> x_bracket;
  std::optional<std::pair<double, double>> y_bracket;
};

/// Damped Newton iteration for F(x, y) = (0, 0) with a finite-difference
/// Jacobian. Falls back to nested bisection when Newton stagnates and
/// brackets are available. Throws convergence_error (carrying the best
/// iterate) when neither route reaches the tolerance.
std::pair<RootInfo, RootInfo> solve_2x2(
    const std::function<Vec2(double, double)>& F, Vec2 x0,
    Solve2x2Options opt = {});

}  // namespace erexp::numerics

#endif  // EREXP_NUMERICS_HPP

#ifndef EREXP_EXPONENT_HPP
#define EREXP_EXPONENT_HPP

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erexp/spectral.hpp"

// Error-exponent lower bound machinery: the inner objective h_delta(omega),
// its clipped infimum g_plus(delta), the exponent lower bound E_G(epsilon),
// decoding-threshold solvers and the random-linear closed form.
namespace erexp::exponent {

// Reference value of the general-purpose threshold bound the Raptor example
// is compared against in the literature. Documentation metadata only; the
// toolkit never computes it.
inline constexpr double kGeneralBoundReference = 0.003827;

struct GridOptions {
  int outer_points = 2048;      // delta grid for the exponent infimum
  int inner_log_points = 128;   // omega grid, geometric part near 0
  int inner_lin_points = 128;   // omega grid, uniform part up to delta
  double omega_min = 1e-9;      // smallest omega sample
  double refine_tol = 1e-10;    // golden-section absolute tolerance
  double tol_pos = 1e-10;       // positivity separation for g_plus
  double bisect_tol = 1e-8;     // threshold bisection tolerance
  double scan_step = 1e-3;      // outer scan step of the 2x2 threshold solve
};

/// Inner objective h_delta(omega) = -delta H_b(omega/delta) + H_b(omega)
/// - G(omega); requires 0 < omega <= delta <= 1 and is strictly decreasing
/// in delta at fixed omega.
double h_delta(const spectral::SpectralShape& shape, double delta, double omega);

/// g_plus(delta) = max{0, inf over omega in (0, delta] of h_delta(omega)}.
/// The infimum is taken over a geometric-plus-uniform omega grid refined by
/// golden section, together with the analytic omega -> 0+ limit -gamma.
double g_plus(const spectral::SpectralShape& shape, double delta,
              const GridOptions& opt = {});

struct ExponentPoint {
  double epsilon = 0;
  double value = 0;
  double argmin_delta = 0;
};

/// E_G(epsilon) = inf over delta in (0,1] of D(delta, epsilon) + g_plus(delta),
/// by grid scan plus local refinement; optional warm-start seed refines
/// around a previous argmin as an extra candidate.
ExponentPoint exponent_lower_bound(const spectral::SpectralShape& shape,
                                   double epsilon, const GridOptions& opt = {},
                                   std::optional<double> warm_start = {});

struct ExponentCurve {
  std::vector<ExponentPoint> points;
  std::string shape_id;
};

/// One exponent point per epsilon; grid must be strictly increasing in (0,1).
/// Points are evaluated concurrently.
ExponentCurve exponent_curve(const spectral::SpectralShape& shape,
                             std::span<const double> grid,
                             const GridOptions& opt = {});

/// Serial reference sweep; warm-starts each delta search from the previous
/// argmin. Kept alongside the parallel version for testing and benchmarks.
ExponentCurve exponent_curve_serial(const spectral::SpectralShape& shape,
                                    std::span<const double> grid,
                                    const GridOptions& opt = {});

enum class ThresholdMethod { bisection, closed_form, system_2x2 };

struct ThresholdResult {
  double delta_star = 0;
  ThresholdMethod method = ThresholdMethod::bisection;
  bool useful = true;  // false when gamma >= 0 degrades the bound to 0
  std::optional<double> lambda_hat;
  std::array<double, 2> residuals{0, 0};
  long evaluations = 0;
};

/// delta* = sup{delta in (0, 1-r] : g_plus(delta) > 0} by predicate bisection,
/// valid because g_plus is non-increasing and continuous. Shapes with
/// gamma >= 0 yield delta* = 0 flagged not useful.
ThresholdResult threshold_bisection(const spectral::SpectralShape& shape,
                                    const GridOptions& opt = {});

/// Closed-form E_G for the linear random parity-check ensemble:
/// three branches split at epsilon_c = (1-r)/(1+(q-1)r) and 1-r.
double exponent_random_linear_closed_form(const spectral::EnsembleParams& params,
                                          double epsilon);

/// Raptor threshold from the stationarity system: outer scan in delta
/// locating the first sign change of the first residual with the second
/// residual solved for lambda at each step, then a Newton polish of the
/// 2x2 system. Requires membership in the usefulness region.
ThresholdResult threshold_raptor(const spectral::RaptorParams& params,
                                 const GridOptions& opt = {});

const char* to_string(ThresholdMethod m);

}  // namespace erexp::exponent

#endif  // EREXP_EXPONENT_HPP

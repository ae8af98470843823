#ifndef EREXP_SPECTRAL_HPP
#define EREXP_SPECTRAL_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "erexp/numerics.hpp"

// Weight spectral shapes G(omega): the growth rate of an ensemble's average
// weight enumerator at fractional weight omega, plus its limit gamma at
// omega -> 0+. Shapes are immutable after construction and safe to evaluate
// concurrently.
namespace erexp::spectral {

struct EnsembleParams {
  double rate = 0.5;    // design rate r, 0 < r < 1
  int field_order = 2;  // q >= 2

  void validate() const;
};

// LT output degree distribution Omega(x) = sum_j Omega_j x^j as
// (degree, probability) pairs with strictly increasing positive degrees.
class DegreeDistribution {
 public:
  static DegreeDistribution from_pairs(
      std::vector<std::pair<int, double>> pairs);

  // rho(lambda): probability that an output symbol built from a uniformly
  // random degree-j subset is odd-weighted when the input has fractional
  // weight lambda; rho(lambda) = 1/2 sum_j Omega_j (1 - (1-2 lambda)^j).
  double rho(double lambda) const;
  double drho(double lambda) const;  // d rho / d lambda

  int max_degree() const { return degrees_.empty() ? 0 : degrees_.back(); }
  bool has_even_degree() const;  // structural test on exact zero coefficients
  double mean_degree() const;

  const std::vector<int>& degrees() const { return degrees_; }
  const std::vector<double>& probabilities() const { return probs_; }

 private:
  std::vector<int> degrees_;
  std::vector<double> probs_;
};

struct RaptorParams {
  double inner_rate = 1.0;  // LT code rate r_i in (0,1]
  double outer_rate = 1.0;  // precoder rate r_o in (0,1]
  DegreeDistribution omega;

  double overall_rate() const { return inner_rate * outer_rate; }
  // The lambda domain is [0,1) when Omega has no even-degree term and
  // (0,1) otherwise.
  bool lambda_domain_closed_at_zero() const { return !omega.has_even_degree(); }
  void validate() const;
};

struct SpectralShape {
  std::function<double(double)> G;     // omega in (0,1)
  std::function<double(double)> dG;    // optional; empty when unavailable
  double gamma = 0.0;                  // lim_{omega->0+} G(omega); -inf allowed
  EnsembleParams params;
  std::string id;

  bool useful() const { return gamma < 0.0; }
  bool has_derivative() const { return static_cast<bool>(dG); }
};

/// Shape of the linear random parity-check ensemble over F_q:
/// G(omega) = H_b(omega) + omega log2(q-1) - (1-r) log2(q), with closed-form
/// derivative and gamma = -(1-r) log2(q).
SpectralShape random_linear_shape(const EnsembleParams& params);

/// Mixture exponent of the LT layer at output weight fraction omega and
/// intermediate weight fraction lambda:
///   nu_omega(lambda) = r_i H_b(lambda) + omega log2 rho + (1-omega) log2(1-rho).
/// Returns -inf when a log diverges with nonzero weight.
double nu(const RaptorParams& params, double omega, double lambda);

/// Derivative of nu_omega with respect to lambda (finite lambda in (0,1)).
double dnu(const RaptorParams& params, double omega, double lambda);

struct Lambda0Result {
  double lambda = 0.0;
  double nu_value = 0.0;
  bool clamped = false;  // maximizer pinned at a clamped domain endpoint
};

/// Inner maximizer lambda_0(omega) = argmax over the lambda domain of
/// nu_omega(lambda). Stateless full-scan version.
Lambda0Result lambda0(const RaptorParams& params, double omega);

/// Raptor ensemble shape: G(omega) = H_b(omega) - r_i (1 - r_o) +
/// nu_omega(lambda_0(omega)), with closed-form derivative through the inner
/// maximizer and gamma computed from the analytic omega -> 0+ limit. The
/// returned shape precomputes a lambda_0 sweep table and refines from it, so
/// pointwise evaluation stays cheap.
SpectralShape raptor_shape(const RaptorParams& params);

/// Membership in the usefulness region: true iff
/// r_i (1 - r_o) > max_lambda [ r_i H_b(lambda) + log2(1 - rho(lambda)) ],
/// which is equivalent to gamma < 0.
bool membership_in_P(const RaptorParams& params);

/// Value of the right-hand side above (the limit of the inner maximum as
/// omega -> 0+); raptor_shape's gamma equals -r_i(1-r_o) + this value.
double limit_inner_max(const RaptorParams& params);

/// Shape interpolated from (omega, G) samples with strictly increasing
/// omega in (0,1). gamma is taken from the override when present, otherwise
/// extrapolated linearly from the two smallest samples. Adjacent samples are
/// checked against a continuity modulus and rejected on jumps.
SpectralShape shape_from_samples(std::vector<std::pair<double, double>> samples,
                                 std::optional<double> gamma_override,
                                 const EnsembleParams& params);

}  // namespace erexp::spectral

#endif  // EREXP_SPECTRAL_HPP

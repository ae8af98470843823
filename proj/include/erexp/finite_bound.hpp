#ifndef EREXP_FINITE_BOUND_HPP
#define EREXP_FINITE_BOUND_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "erexp/numerics.hpp"
#include "erexp/spectral.hpp"

// Finite-length ensemble-average upper bound on the ML block error
// probability over the erasure channel, evaluated in the log domain.
namespace erexp::finite_bound {

// Average weight enumerator of a length-n ensemble: log_A[w] is log2 of the
// expected number of weight-w codewords; log_A[0] = 0 (the all-zero word).
struct WeightEnumerator {
  int n = 0;
  std::vector<numerics::LogValue> log_A;  // size n + 1
  int redundancy = 0;                     // realized m where applicable

  void validate() const;
};

struct FiniteBoundResult {
  double epsilon = 0;
  int n = 0;
  numerics::LogValue log2_bound;
  double bound = 0;  // clamped to [0,1]
};

/// Random-linear AWE: log_A[w] = log2 C(n,w) + w log2(q-1) - m log2 q for
/// w >= 1 with m = round((1-r) n); the w = 0 entry is exactly 1.
WeightEnumerator awe_random_linear(int n, const spectral::EnsembleParams& params);

/// Two-column text import (w, log2_A), '#' comments allowed, weights
/// strictly increasing; n is the largest listed weight, omitted weights
/// carry no codewords. A w = 0 row, when present, must be 0.
WeightEnumerator load_weight_enumerator(std::istream& in);
WeightEnumerator load_weight_enumerator_file(const std::string& path);

/// Union-type bound as an exact log-domain double sum: over the erasure
/// count e, binomial weight times min{1, inner correction sum over w}; the
/// min is a cap at 0 in the log domain.
FiniteBoundResult evaluate_bound(const WeightEnumerator& awe,
                                 const spectral::EnsembleParams& params,
                                 double epsilon);

/// One bound per epsilon, evaluated concurrently.
std::vector<FiniteBoundResult> bound_curve(const WeightEnumerator& awe,
                                           const spectral::EnsembleParams& params,
                                           std::span<const double> grid);

/// Serial reference implementation kept for testing and benchmarks.
std::vector<FiniteBoundResult> bound_curve_serial(
    const WeightEnumerator& awe, const spectral::EnsembleParams& params,
    std::span<const double> grid);

}  // namespace erexp::finite_bound

#endif  // EREXP_FINITE_BOUND_HPP

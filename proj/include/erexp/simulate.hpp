#ifndef EREXP_SIMULATE_HPP
#define EREXP_SIMULATE_HPP

#include <cstdint>
#include <variant>

#include "erexp/gf.hpp"
#include "erexp/rng.hpp"
#include "erexp/spectral.hpp"

// Ensemble sampling, exact small-n block-error computation and Monte Carlo
// estimation of the ensemble-average ML block error probability. The
// simulator works over prime fields only; the bound modules are not so
// restricted.
namespace erexp::simulate {

struct SimulationEstimate {
  long long trials = 0;
  long long failures = 0;
  double p_hat = 0;
  double ci_halfwidth = 0;  // Wilson 95% interval half-width
  std::uint64_t seed = 0;

  bool operator==(const SimulationEstimate&) const = default;
};

/// Wilson score interval half-width at 95% confidence.
double wilson_halfwidth(long long failures, long long trials);

/// m x n parity-check matrix with i.i.d. entries uniform on GF(q),
/// m = round((1-r) n); q must be prime.
GfMatrix sample_random_linear(int n, const spectral::EnsembleParams& params,
                              Rng& rng);

struct RaptorSampleInfo {
  int realized_k = 0;            // information symbols
  int realized_h = 0;            // intermediate symbols
  int outer_resamples = 0;       // precoder parity-check rank-defect retries
};

/// k x n binary generator of a fixed-rate Raptor code: a random full-rank
/// precoder (resampled on rank defect) composed with a fixed-rate LT layer
/// whose output columns pick a degree from the distribution (capped at h)
/// and that many distinct intermediate positions.
GfMatrix sample_raptor_generator(int n, const spectral::RaptorParams& params,
                                 Rng& rng, RaptorSampleInfo* info = nullptr);

/// Exact block error probability by full enumeration of the 2^n erasure
/// patterns; n <= 24. Deterministic regardless of thread count.
double exact_block_error(const GfMatrix& code, CodeForm form, double epsilon);
double exact_block_error_serial(const GfMatrix& code, CodeForm form,
                                double epsilon);

struct RandomLinearEnsemble {
  spectral::EnsembleParams params;
};
struct RaptorEnsemble {
  spectral::RaptorParams params;
};
struct FixedCodeEnsemble {
  GfMatrix code;
  CodeForm form = CodeForm::parity_check;
};
using EnsembleSpec =
    std::variant<RandomLinearEnsemble, RaptorEnsemble, FixedCodeEnsemble>;

/// Monte Carlo estimate of the ensemble-average block error probability:
/// each trial samples a fresh code (unless a fixed code is given) and an
/// i.i.d. erasure pattern. Trials are split into fixed-size chunks with
/// independently derived substreams, so the estimate is identical for any
/// thread count and chunk tallies merge order-independently.
SimulationEstimate monte_carlo(const EnsembleSpec& spec, int n, double epsilon,
                               long long trials, std::uint64_t seed);

/// Serial reference implementation; bit-identical to monte_carlo.
SimulationEstimate monte_carlo_serial(const EnsembleSpec& spec, int n,
                                      double epsilon, long long trials,
                                      std::uint64_t seed);

}  // namespace erexp::simulate

#endif  // EREXP_SIMULATE_HPP

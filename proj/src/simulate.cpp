#include "erexp/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace erexp::simulate {

namespace {

constexpr long long kChunkTrials = 4096;
constexpr double kZ95 = 1.959963984540054;

struct PackedPattern {
  std::vector<std::uint64_t> erased;  // one bit per erased position
  int count = 0;

  void sample(int n, double epsilon, Rng& rng) {
    const int wpr = (n + 63) / 64;
    erased.assign(wpr, 0);
    count = 0;
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(epsilon)) {
        erased[i >> 6] |= (1ull << (i & 63));
        ++count;
      }
  }
};

// reusable per-chunk state so the trial loop does not allocate
struct TrialWorkspace {
  detail::BitMatrix code2;                  // GF(2) code matrix
  std::vector<std::uint64_t> mask;          // decoding column selector
  std::vector<std::uint64_t> scratch;       // elimination scratch
  PackedPattern pattern;
  std::vector<int> lt_index;                // Fisher-Yates buffer
  GfMatrix code_q;                          // general prime field code
};

void sample_random_linear_gf2(int n, int m, Rng& rng, detail::BitMatrix& out) {
  out.resize(m, n);
  const std::uint64_t tail =
      (n % 64) ? ((1ull << (n % 64)) - 1) : ~0ull;
  for (int r = 0; r < m; ++r) {
    auto* row = out.row(r);
    for (int k = 0; k < out.wpr; ++k) row[k] = rng.next();
    row[out.wpr - 1] &= tail;
  }
}

int sample_degree(const spectral::DegreeDistribution& dist, int cap, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  const auto& degs = dist.degrees();
  const auto& probs = dist.probabilities();
  for (std::size_t i = 0; i < degs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return std::min(degs[i], cap);
  }
  return std::min(degs.back(), cap);
}

void sample_lt_packed(int h, int n, const spectral::DegreeDistribution& dist,
                      Rng& rng, detail::BitMatrix& out,
                      std::vector<int>& index) {
  out.resize(h, n);
  index.resize(h);
  for (int c = 0; c < n; ++c) {
    const int d = sample_degree(dist, h, rng);
    std::iota(index.begin(), index.end(), 0);
    // partial Fisher-Yates: d distinct intermediate positions
    for (int j = 0; j < d; ++j) {
      const int pick = j + static_cast<int>(rng.below(static_cast<std::uint32_t>(h - j)));
      std::swap(index[j], index[pick]);
      out.set(index[j], c);
    }
  }
}

struct RaptorDims {
  int k = 0, h = 0;
};

RaptorDims raptor_dims(int n, const spectral::RaptorParams& params) {
  RaptorDims d;
  d.h = static_cast<int>(std::lround(params.inner_rate * n));
  d.k = static_cast<int>(std::lround(params.outer_rate * d.h));
  if (d.h < 1 || d.k < 1 || d.k > d.h)
    throw std::invalid_argument(
        "sample_raptor_generator: rounding produced infeasible dimensions");
  return d;
}

void sample_raptor_packed(int n, const spectral::RaptorParams& params, Rng& rng,
                          detail::BitMatrix& out, std::vector<int>& index,
                          RaptorSampleInfo* info) {
  const auto [k, h] = raptor_dims(n, params);
  if (info) {
    info->realized_k = k;
    info->realized_h = h;
    info->outer_resamples = 0;
  }

  detail::BitMatrix lt;
  sample_lt_packed(h, n, params.omega, rng, lt, index);

  if (k == h) {  // rate-1 precoder: the LT layer is the generator
    out = std::move(lt);
    return;
  }

  // full-rank random precoder parity-check, resampled on rank defect
  GfMatrix ho(h - k, h, 2);
  int resamples = -1;
  while (true) {
    ++resamples;
    if (resamples > 1000)
      throw std::runtime_error("sample_raptor_generator: precoder resampling did not terminate");
    for (int r = 0; r < h - k; ++r)
      for (int c = 0; c < h; ++c) ho.set(r, c, static_cast<std::uint8_t>(rng.below(2)));
    if (gf_rank(ho) == h - k) break;
  }
  if (info) info->outer_resamples = resamples;

  const GfMatrix go = null_space_basis(ho);  // k x h
  out = detail::multiply_gf2(detail::pack_gf2(go), lt);
}

bool decode_fails_gf2(const detail::BitMatrix& code, CodeForm form,
                      const PackedPattern& pattern, TrialWorkspace& ws) {
  const int n = code.cols;
  ws.mask.assign(code.wpr, 0);
  if (form == CodeForm::parity_check) {
    ws.mask = pattern.erased;
  } else {
    const std::uint64_t tail = (n % 64) ? ((1ull << (n % 64)) - 1) : ~0ull;
    for (int kx = 0; kx < code.wpr; ++kx) ws.mask[kx] = ~pattern.erased[kx];
    ws.mask[code.wpr - 1] &= tail;
  }
  const int rank = detail::rank_gf2_masked(code, ws.mask, ws.scratch);
  return form == CodeForm::parity_check ? rank < pattern.count
                                        : rank < code.rows;
}

bool run_trial(const EnsembleSpec& spec, int n, double epsilon, Rng& rng,
               TrialWorkspace& ws, const detail::BitMatrix* fixed2,
               const GfMatrix* fixedq, CodeForm fixed_form) {
  if (fixed2) {
    ws.pattern.sample(n, epsilon, rng);
    return decode_fails_gf2(*fixed2, fixed_form, ws.pattern, ws);
  }
  if (fixedq) {
    ws.pattern.sample(n, epsilon, rng);
    ErasurePattern p;
    for (int i = 0; i < n; ++i)
      if ((ws.pattern.erased[i >> 6] >> (i & 63)) & 1u) p.erased.push_back(i);
    return ml_decode_fails(*fixedq, fixed_form, p);
  }
  if (const auto* rl = std::get_if<RandomLinearEnsemble>(&spec)) {
    const int m = static_cast<int>(std::lround((1.0 - rl->params.rate) * n));
    if (rl->params.field_order == 2) {
      sample_random_linear_gf2(n, m, rng, ws.code2);
      ws.pattern.sample(n, epsilon, rng);
      return decode_fails_gf2(ws.code2, CodeForm::parity_check, ws.pattern, ws);
    }
    ws.code_q = sample_random_linear(n, rl->params, rng);
    ws.pattern.sample(n, epsilon, rng);
    ErasurePattern p;
    for (int i = 0; i < n; ++i)
      if ((ws.pattern.erased[i >> 6] >> (i & 63)) & 1u) p.erased.push_back(i);
    return ml_decode_fails(ws.code_q, CodeForm::parity_check, p);
  }
  const auto& rp = std::get<RaptorEnsemble>(spec);
  sample_raptor_packed(n, rp.params, rng, ws.code2, ws.lt_index, nullptr);
  ws.pattern.sample(n, epsilon, rng);
  return decode_fails_gf2(ws.code2, CodeForm::generator, ws.pattern, ws);
}

SimulationEstimate run_monte_carlo(const EnsembleSpec& spec, int n,
                                   double epsilon, long long trials,
                                   std::uint64_t seed, bool parallel) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("monte_carlo: epsilon outside [0,1]");
  if (const auto* rl = std::get_if<RandomLinearEnsemble>(&spec)) {
    rl->params.validate();
    if (!is_prime(rl->params.field_order))
      throw std::domain_error("monte_carlo: simulator requires prime q");
  } else if (const auto* rp = std::get_if<RaptorEnsemble>(&spec)) {
    rp->params.validate();
  }

  const detail::BitMatrix* fixed2 = nullptr;
  const GfMatrix* fixedq = nullptr;
  CodeForm fixed_form = CodeForm::parity_check;
  detail::BitMatrix packed_fixed;
  if (const auto* fc = std::get_if<FixedCodeEnsemble>(&spec)) {
    if (fc->code.cols() != n)
      throw std::invalid_argument("monte_carlo: fixed code length differs from n");
    fixed_form = fc->form;
    if (fc->code.field_order() == 2) {
      packed_fixed = detail::pack_gf2(fc->code);
      fixed2 = &packed_fixed;
    } else {
      if (!is_prime(fc->code.field_order()))
        throw std::domain_error("monte_carlo: simulator requires prime q");
      fixedq = &fc->code;
    }
  }

  const long long chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<long long> chunk_failures(static_cast<std::size_t>(chunks), 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long long c = 0; c < chunks; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    TrialWorkspace ws;
    const long long lo = c * kChunkTrials;
    const long long hi = std::min(trials, lo + kChunkTrials);
    long long fails = 0;
    for (long long t = lo; t < hi; ++t)
      if (run_trial(spec, n, epsilon, rng, ws, fixed2, fixedq, fixed_form))
        ++fails;
    chunk_failures[static_cast<std::size_t>(c)] = fails;
  }

  // fixed-order merge: associative, commutative, thread-count independent
  const long long failures =
      std::accumulate(chunk_failures.begin(), chunk_failures.end(), 0ll);

  SimulationEstimate est;
  est.trials = trials;
  est.failures = failures;
  est.p_hat = static_cast<double>(failures) / static_cast<double>(trials);
  est.ci_halfwidth = wilson_halfwidth(failures, trials);
  est.seed = seed;
  return est;
}

}  // namespace

double wilson_halfwidth(long long failures, long long trials) {
  if (trials < 1) throw std::invalid_argument("wilson_halfwidth: trials must be >= 1");
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / t;
  const double z2 = kZ95 * kZ95;
  return kZ95 * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / (1.0 + z2 / t);
}

GfMatrix sample_random_linear(int n, const spectral::EnsembleParams& params,
                              Rng& rng) {
  params.validate();
  if (!is_prime(params.field_order))
    throw std::domain_error("sample_random_linear: q must be prime");
  if (n < 1) throw std::invalid_argument("sample_random_linear: n must be >= 1");
  const int m = static_cast<int>(std::lround((1.0 - params.rate) * n));
  GfMatrix h(m, n, params.field_order);
  if (params.field_order == 2) {
    detail::BitMatrix b;
    sample_random_linear_gf2(n, m, rng, b);
    return detail::unpack_gf2(b);
  }
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c)
      h.set(r, c, static_cast<std::uint8_t>(rng.below(static_cast<std::uint32_t>(params.field_order))));
  return h;
}

GfMatrix sample_raptor_generator(int n, const spectral::RaptorParams& params,
                                 Rng& rng, RaptorSampleInfo* info) {
  params.validate();
  if (n < 1) throw std::invalid_argument("sample_raptor_generator: n must be >= 1");
  detail::BitMatrix packed;
  std::vector<int> index;
  sample_raptor_packed(n, params, rng, packed, index, info);
  return detail::unpack_gf2(packed);
}

namespace {

double exact_block_error_impl(const GfMatrix& code, CodeForm form,
                              double epsilon, bool parallel) {
  const int n = code.cols();
  if (n > 24) throw std::invalid_argument("exact_block_error: n must be <= 24");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("exact_block_error: epsilon outside [0,1]");
  if (!is_prime(code.field_order()))
    throw std::domain_error("exact_block_error: q must be prime");

  std::vector<double> pw(n + 1);
  for (int e = 0; e <= n; ++e)
    pw[e] = std::pow(epsilon, e) * std::pow(1.0 - epsilon, n - e);

  const std::uint64_t total = 1ull << n;
  const int chunk_bits = std::max(0, n - 10);  // 1024 chunks at most
  const std::uint64_t chunk_size = 1ull << chunk_bits;
  const std::uint64_t chunks = total >> chunk_bits;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);

  const bool use_gf2 = code.field_order() == 2;
  detail::BitMatrix packed;
  if (use_gf2) packed = detail::pack_gf2(code);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::uint64_t c = 0; c < chunks; ++c) {
    double acc = 0.0;
    std::vector<std::uint64_t> mask(1), scratch;
    for (std::uint64_t pat = c * chunk_size; pat < (c + 1) * chunk_size; ++pat) {
      const int e = std::popcount(pat);
      bool fails;
      if (use_gf2) {
        const std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
        mask[0] = (form == CodeForm::parity_check) ? pat : (~pat & full);
        const int rank = detail::rank_gf2_masked(packed, mask, scratch);
        fails = (form == CodeForm::parity_check) ? rank < e : rank < code.rows();
      } else {
        fails = ml_decode_fails(code, form, ErasurePattern::from_mask(pat, n));
      }
      if (fails) acc += pw[e];
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace

double exact_block_error(const GfMatrix& code, CodeForm form, double epsilon) {
  return exact_block_error_impl(code, form, epsilon, true);
}

double exact_block_error_serial(const GfMatrix& code, CodeForm form,
                                double epsilon) {
  return exact_block_error_impl(code, form, epsilon, false);
}

SimulationEstimate monte_carlo(const EnsembleSpec& spec, int n, double epsilon,
                               long long trials, std::uint64_t seed) {
  return run_monte_carlo(spec, n, epsilon, trials, seed, true);
}

SimulationEstimate monte_carlo_serial(const EnsembleSpec& spec, int n,
                                      double epsilon, long long trials,
                                      std::uint64_t seed) {
  return run_monte_carlo(spec, n, epsilon, trials, seed, false);
}

}  // namespace erexp::simulate

#include "erexp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace erexp::spectral {

using numerics::binary_entropy;
using numerics::kNegInf;

namespace {

constexpr double kLambdaClamp = 1e-12;  // clamp for open domain endpoints

std::vector<double> geomspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(la + (lb - la) * static_cast<double>(i) / (n - 1));
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

}  // namespace

void EnsembleParams::validate() const {
  if (!(rate > 0.0 && rate < 1.0))
    throw std::invalid_argument("EnsembleParams: rate must be in (0,1)");
  if (field_order < 2)
    throw std::invalid_argument("EnsembleParams: field order must be >= 2");
}

DegreeDistribution DegreeDistribution::from_pairs(
    std::vector<std::pair<int, double>> pairs) {
  if (pairs.empty())
    throw std::invalid_argument("DegreeDistribution: empty coefficient list");
  DegreeDistribution d;
  int prev = 0;
  double sum = 0.0;
  for (const auto& [deg, p] : pairs) {
    if (deg <= prev)
      throw std::invalid_argument(
          "DegreeDistribution: degrees must be strictly increasing positive integers");
    if (p < 0.0)
      throw std::invalid_argument("DegreeDistribution: negative coefficient");
    d.degrees_.push_back(deg);
    d.probs_.push_back(p);
    sum += p;
    prev = deg;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("DegreeDistribution: coefficients must sum to 1");
  if (d.probs_.back() <= 0.0)
    throw std::invalid_argument("DegreeDistribution: maximum degree must have positive mass");
  return d;
}

double DegreeDistribution::rho(double lambda) const {
  double acc = 0.0;
  const double b = 1.0 - 2.0 * lambda;
  for (std::size_t i = 0; i < degrees_.size(); ++i)
    acc += probs_[i] * (1.0 - std::pow(b, degrees_[i]));
  return 0.5 * acc;
}

double DegreeDistribution::drho(double lambda) const {
  double acc = 0.0;
  const double b = 1.0 - 2.0 * lambda;
  for (std::size_t i = 0; i < degrees_.size(); ++i)
    acc += probs_[i] * degrees_[i] * std::pow(b, degrees_[i] - 1);
  return acc;
}

bool DegreeDistribution::has_even_degree() const {
  // structural zeros: a coefficient parsed as exactly 0 does not count
  for (std::size_t i = 0; i < degrees_.size(); ++i)
    if (degrees_[i] % 2 == 0 && probs_[i] != 0.0) return true;
  return false;
}

double DegreeDistribution::mean_degree() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < degrees_.size(); ++i)
    acc += degrees_[i] * probs_[i];
  return acc;
}

void RaptorParams::validate() const {
  if (!(inner_rate > 0.0 && inner_rate <= 1.0))
    throw std::invalid_argument("RaptorParams: inner rate must be in (0,1]");
  if (!(outer_rate > 0.0 && outer_rate <= 1.0))
    throw std::invalid_argument("RaptorParams: outer rate must be in (0,1]");
  if (!(overall_rate() > 0.0 && overall_rate() < 1.0))
    throw std::invalid_argument("RaptorParams: overall rate must be in (0,1)");
  if (omega.degrees().empty())
    throw std::invalid_argument("RaptorParams: missing degree distribution");
}

SpectralShape random_linear_shape(const EnsembleParams& params) {
  params.validate();
  const double r = params.rate;
  const double q = params.field_order;
  const double log_qm1 = std::log2(q - 1.0);  // 0 for q = 2
  const double redundancy_bits = (1.0 - r) * std::log2(q);

  SpectralShape s;
  s.params = params;
  s.gamma = -redundancy_bits;
  s.G = [=](double w) {
    return binary_entropy(w) + w * log_qm1 - redundancy_bits;
  };
  s.dG = [=](double w) { return std::log2((1.0 - w) / w) + log_qm1; };
  std::ostringstream id;
  id << "random_linear(r=" << r << ",q=" << params.field_order << ")";
  s.id = id.str();
  return s;
}

double nu(const RaptorParams& params, double omega, double lambda) {
  const double rho = params.omega.rho(lambda);
  double t = params.inner_rate * binary_entropy(std::clamp(lambda, 0.0, 1.0));
  if (omega > 0.0) {
    if (rho <= 0.0) return kNegInf;
    t += omega * std::log2(rho);
  }
  if (omega < 1.0) {
    if (rho >= 1.0) return kNegInf;
    t += (1.0 - omega) * std::log2(1.0 - rho);
  }
  return t;
}

double dnu(const RaptorParams& params, double omega, double lambda) {
  const double rho = params.omega.rho(lambda);
  const double dr = params.omega.drho(lambda);
  double t = params.inner_rate * std::log2((1.0 - lambda) / lambda);
  if (omega > 0.0) t += omega * dr / rho * numerics::kLog2E;
  if (omega < 1.0) t += -(1.0 - omega) * dr / (1.0 - rho) * numerics::kLog2E;
  return t;
}

namespace {

// Candidate lambda grid covering both the near-zero region (geometric) and
// the bulk of the domain (uniform).
std::vector<double> lambda_candidates(double lo, double hi, int n_geom, int n_lin) {
  std::vector<double> g = geomspace(std::max(lo, 1e-10), std::min(0.5, hi), n_geom);
  if (hi > 0.5) {
    const auto l = linspace(0.5, hi, n_lin);
    g.insert(g.end(), l.begin(), l.end());
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

struct LambdaSearch {
  double lambda = 0;
  double value = kNegInf;
  bool clamped = false;
};

// Maximize nu_omega over [lo, hi] given a precomputed candidate list:
// best sample, golden refinement on its bracket, then a bisection polish on
// the analytic derivative so the stationarity residual is tiny.
LambdaSearch maximize_nu(const RaptorParams& params, double omega,
                         const std::vector<double>& cand, double lo, double hi) {
  LambdaSearch best;
  int best_i = -1;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const double v = nu(params, omega, cand[i]);
    if (std::isfinite(v) && v > best.value) {
      best.value = v;
      best.lambda = cand[i];
      best_i = static_cast<int>(i);
    }
  }
  if (best_i < 0) {
    // objective is -inf across the grid (e.g. omega = 1 with rho < 1 everywhere)
    best.lambda = lo;
    best.clamped = true;
    return best;
  }
  double a = best_i > 0 ? cand[best_i - 1] : lo;
  double b = best_i + 1 < static_cast<int>(cand.size()) ? cand[best_i + 1] : hi;
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (a < b) {
    auto ref = numerics::detail::golden_refine(
        [&](double l) { return -nu(params, omega, l); }, a, b, 1e-13);
    if (-ref.min > best.value) {
      best.value = -ref.min;
      best.lambda = ref.argmin;
    }
  }
  // derivative polish inside a shrunken bracket around the maximizer
  const double w = std::max(1e-9, 0.5 * (b - a));
  double pa = std::max(lo, best.lambda - w), pb = std::min(hi, best.lambda + w);
  double da = dnu(params, omega, pa), db = dnu(params, omega, pb);
  if (std::isfinite(da) && std::isfinite(db) && da > 0.0 && db < 0.0) {
    for (int it = 0; it < 200 && pb - pa > 1e-15; ++it) {
      const double mid = 0.5 * (pa + pb);
      const double dm = dnu(params, omega, mid);
      if (dm > 0.0)
        pa = mid;
      else
        pb = mid;
    }
    const double polished = 0.5 * (pa + pb);
    const double pv = nu(params, omega, polished);
    if (pv >= best.value - 1e-12) {
      best.lambda = polished;
      best.value = std::max(best.value, pv);
    }
  } else {
    best.clamped = (best.lambda <= lo + 1e-12) || (best.lambda >= hi - 1e-12);
  }
  return best;
}

struct RaptorContext {
  RaptorParams params;
  double lambda_lo = kLambdaClamp;
  double lambda_hi = 1.0 - kLambdaClamp;
  // lambda_0 sweep table over a fixed omega grid, used to seed refinement
  std::vector<double> omega_grid;
  std::vector<double> lambda_table;
  double gamma = 0.0;

  LambdaSearch lambda0_at(double omega) const {
    // seed window from the sweep table
    const auto it = std::lower_bound(omega_grid.begin(), omega_grid.end(), omega);
    std::size_t i = static_cast<std::size_t>(it - omega_grid.begin());
    std::size_t a = i > 0 ? i - 1 : 0;
    std::size_t b = std::min(i + 1, omega_grid.size() - 1);
    double llo = lambda_table[a], lhi = lambda_table[a];
    for (std::size_t k = a; k <= b; ++k) {
      llo = std::min(llo, lambda_table[k]);
      lhi = std::max(lhi, lambda_table[k]);
    }
    const double pad = std::max(1e-5, 2.0 * (lhi - llo));
    const double wlo = std::max(lambda_lo, llo - pad);
    const double whi = std::min(lambda_hi, lhi + pad);
    const auto local = geomspace(std::max(wlo, 1e-10), whi, 25);
    LambdaSearch s = maximize_nu(params, omega, local, wlo, whi);
    // accept only a verified stationary (or clamped) point; otherwise rescan
    if (!s.clamped && std::abs(dnu(params, omega, s.lambda)) < 1e-6) return s;
    if (s.clamped && (s.lambda <= wlo + 1e-12 ? wlo == lambda_lo : whi == lambda_hi))
      return s;
    const auto full = lambda_candidates(lambda_lo, lambda_hi, 384, 128);
    return maximize_nu(params, omega, full, lambda_lo, lambda_hi);
  }
};

}  // namespace

Lambda0Result lambda0(const RaptorParams& params, double omega) {
  params.validate();
  if (!(omega > 0.0 && omega < 1.0))
    throw std::invalid_argument("lambda0: omega must be in (0,1)");
  const double lo = kLambdaClamp, hi = 1.0 - kLambdaClamp;
  const auto cand = lambda_candidates(lo, hi, 384, 128);
  const auto s = maximize_nu(params, omega, cand, lo, hi);
  return Lambda0Result{s.lambda, s.value, s.clamped};
}

double limit_inner_max(const RaptorParams& params) {
  // omega -> 0+ objective: r_i H_b(lambda) + log2(1 - rho(lambda))
  const double lo = kLambdaClamp, hi = 1.0 - kLambdaClamp;
  auto neg = [&](double l) { return -nu(params, 0.0, l); };
  numerics::MinimizeOptions opt;
  opt.grid_points = 4096;
  opt.tol = 1e-13;
  auto res = numerics::minimize_1d(neg, lo, hi, opt);
  // the geometric near-zero region is outside the uniform scan's resolution
  for (double l : geomspace(1e-10, 0.01, 128)) {
    const double v = neg(l);
    if (v < res.min) {
      auto ref = numerics::detail::golden_refine(neg, l * 0.5, std::min(l * 2.0, hi), 1e-13);
      res.min = std::min(v, ref.min);
      res.argmin = ref.min < v ? ref.argmin : l;
    }
  }
  double m = -res.min;
  if (params.lambda_domain_closed_at_zero()) m = std::max(m, 0.0);  // lambda = 0 admissible
  return m;
}

bool membership_in_P(const RaptorParams& params) {
  params.validate();
  return params.inner_rate * (1.0 - params.outer_rate) > limit_inner_max(params);
}

SpectralShape raptor_shape(const RaptorParams& params) {
  params.validate();
  auto ctx = std::make_shared<RaptorContext>();
  ctx->params = params;

  // lambda_0 sweep over a fixed omega grid; warm start is implicit in the
  // full candidate scan, which is cheap at build time
  auto og = geomspace(1e-10, 0.5, 384);
  const auto lin = linspace(0.5, 1.0 - 1e-10, 172);
  og.insert(og.end(), lin.begin(), lin.end());
  std::sort(og.begin(), og.end());
  og.erase(std::unique(og.begin(), og.end()), og.end());
  const auto cand = lambda_candidates(ctx->lambda_lo, ctx->lambda_hi, 384, 128);
  ctx->omega_grid = og;
  ctx->lambda_table.resize(og.size());
  for (std::size_t i = 0; i < og.size(); ++i)
    ctx->lambda_table[i] =
        maximize_nu(params, og[i], cand, ctx->lambda_lo, ctx->lambda_hi).lambda;

  ctx->gamma = -params.inner_rate * (1.0 - params.outer_rate) + limit_inner_max(params);

  const double ri = params.inner_rate, ro = params.outer_rate;
  SpectralShape s;
  s.params.rate = params.overall_rate();
  s.params.field_order = 2;
  s.gamma = ctx->gamma;
  s.G = [ctx, ri, ro](double w) {
    const auto l0 = ctx->lambda0_at(w);
    return binary_entropy(w) - ri * (1.0 - ro) + l0.value;
  };
  s.dG = [ctx](double w) {
    const auto l0 = ctx->lambda0_at(w);
    const double rho = ctx->params.omega.rho(l0.lambda);
    return std::log2((1.0 - w) / w) + std::log2(rho / (1.0 - rho));
  };
  std::ostringstream id;
  id << "raptor(r_i=" << ri << ",r_o=" << ro
     << ",d_max=" << params.omega.max_degree() << ")";
  s.id = id.str();
  return s;
}

SpectralShape shape_from_samples(std::vector<std::pair<double, double>> samples,
                                 std::optional<double> gamma_override,
                                 const EnsembleParams& params) {
  params.validate();
  if (samples.size() < 2)
    throw std::invalid_argument("shape_from_samples: need at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0 && samples[i].first < 1.0))
      throw std::invalid_argument("shape_from_samples: omega outside (0,1)");
    if (i > 0 && samples[i].first <= samples[i - 1].first)
      throw std::invalid_argument("shape_from_samples: omega not strictly increasing");
    if (!std::isfinite(samples[i].second))
      throw std::invalid_argument("shape_from_samples: non-finite G sample");
  }
  // continuity modulus: entropy-type growth plus a generous linear term
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dw = samples[i].first - samples[i - 1].first;
    const double dg = std::abs(samples[i].second - samples[i - 1].second);
    const double bound =
        4.0 * binary_entropy(std::min(dw, 0.49999)) + 32.0 * dw + 1e-9;
    if (dg > bound)
      throw std::invalid_argument(
          "shape_from_samples: adjacent samples jump beyond the continuity modulus");
  }

  double gamma;
  if (gamma_override) {
    gamma = *gamma_override;
  } else {
    const auto& [w0, g0] = samples[0];
    const auto& [w1, g1] = samples[1];
    gamma = g0 - w0 * (g1 - g0) / (w1 - w0);
  }

  auto pts = std::make_shared<std::vector<std::pair<double, double>>>(std::move(samples));
  const double gamma_val = gamma;
  SpectralShape s;
  s.params = params;
  s.gamma = gamma;
  s.G = [pts, gamma_val](double w) {
    const auto& v = *pts;
    if (w <= v.front().first) {
      // interpolate toward the known limit at omega -> 0+
      const double t = w / v.front().first;
      return gamma_val + t * (v.front().second - gamma_val);
    }
    if (w >= v.back().first) return v.back().second;
    auto it = std::lower_bound(v.begin(), v.end(), w,
                               [](const auto& p, double x) { return p.first < x; });
    const auto& [wb, gb] = *it;
    const auto& [wa, ga] = *(it - 1);
    const double t = (w - wa) / (wb - wa);
    return ga + t * (gb - ga);
  };
  s.id = "user_shape";
  return s;
}

}  // namespace erexp::spectral

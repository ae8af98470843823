#include "erexp/finite_bound.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace erexp::finite_bound {

using numerics::kNegInf;
using numerics::log_binomial;
using numerics::LogValue;

void WeightEnumerator::validate() const {
  if (n < 1) throw std::invalid_argument("WeightEnumerator: n must be >= 1");
  if (log_A.size() != static_cast<std::size_t>(n) + 1)
    throw std::invalid_argument("WeightEnumerator: log_A must have n+1 entries");
  if (log_A[0].log2_value != 0.0)
    throw std::invalid_argument("WeightEnumerator: log_A[0] must be 0 (the all-zero codeword)");
  for (const auto& lv : log_A)
    if (std::isnan(lv.log2_value) || lv.log2_value == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("WeightEnumerator: entries must be finite or -inf");
}

WeightEnumerator awe_random_linear(int n, const spectral::EnsembleParams& params) {
  params.validate();
  if (n < 1) throw std::invalid_argument("awe_random_linear: n must be >= 1");
  const int m = static_cast<int>(std::lround((1.0 - params.rate) * n));
  const double log_q = std::log2(static_cast<double>(params.field_order));
  const double log_qm1 = std::log2(static_cast<double>(params.field_order - 1));

  WeightEnumerator awe;
  awe.n = n;
  awe.redundancy = m;
  awe.log_A.resize(n + 1);
  awe.log_A[0] = LogValue(0.0);
  for (int w = 1; w <= n; ++w)
    awe.log_A[w] =
        LogValue(log_binomial(n, w).log2_value + w * log_qm1 - m * log_q);
  return awe;
}

WeightEnumerator load_weight_enumerator(std::istream& in) {
  std::vector<std::pair<int, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int w;
    if (!(ls >> w)) continue;  // blank or comment-only line
    std::string tok;
    if (!(ls >> tok))
      throw std::invalid_argument("weight enumerator line " + std::to_string(lineno) +
                                  ": missing log2_A value");
    double lv;
    if (tok == "-inf" || tok == "-INF") {
      lv = kNegInf;
    } else {
      try {
        lv = std::stod(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("weight enumerator line " + std::to_string(lineno) +
                                    ": bad log2_A value '" + tok + "'");
      }
    }
    if (w < 0)
      throw std::invalid_argument("weight enumerator line " + std::to_string(lineno) +
                                  ": negative weight");
    if (!rows.empty() && w <= rows.back().first)
      throw std::invalid_argument("weight enumerator line " + std::to_string(lineno) +
                                  ": weights must be strictly increasing");
    rows.emplace_back(w, lv);
  }
  if (rows.empty())
    throw std::invalid_argument("weight enumerator: no rows");
  WeightEnumerator awe;
  awe.n = rows.back().first;
  awe.log_A.assign(awe.n + 1, LogValue());
  awe.log_A[0] = LogValue(0.0);
  for (const auto& [w, lv] : rows) {
    if (w == 0 && lv != 0.0)
      throw std::invalid_argument("weight enumerator: a w=0 row must be 0");
    if (w > 0) awe.log_A[w] = LogValue(lv);
  }
  awe.validate();
  return awe;
}

WeightEnumerator load_weight_enumerator_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open weight enumerator file: " + path);
  return load_weight_enumerator(f);
}

FiniteBoundResult evaluate_bound(const WeightEnumerator& awe,
                                 const spectral::EnsembleParams& params,
                                 double epsilon) {
  awe.validate();
  if (params.field_order < 2)
    throw std::invalid_argument("evaluate_bound: field order must be >= 2");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("evaluate_bound: epsilon outside [0,1]");

  const int n = awe.n;
  const double log_eps = epsilon > 0.0 ? std::log2(epsilon) : kNegInf;
  const double log_1me = epsilon < 1.0 ? std::log2(1.0 - epsilon) : kNegInf;
  const double log_qm1 = std::log2(static_cast<double>(params.field_order - 1));

  std::vector<double> log_nw(n + 1);
  for (int w = 0; w <= n; ++w) log_nw[w] = log_binomial(n, w).log2_value;

  std::vector<double> terms(n);
  std::vector<double> inner;
  inner.reserve(n);
  for (int e = 1; e <= n; ++e) {
    inner.clear();
    for (int w = 1; w <= e; ++w) {
      const double la = awe.log_A[w].log2_value;
      if (la == kNegInf) continue;
      inner.push_back(log_binomial(e, w).log2_value + la - log_nw[w]);
    }
    const double log_S = numerics::log2_sum(inner) - log_qm1;
    const double capped = std::min(0.0, log_S);  // min{1, .} in the log domain
    double t = log_nw[e] + capped;
    t += (e > 0) ? e * log_eps : 0.0;
    t += (n - e > 0) ? (n - e) * log_1me : 0.0;
    terms[e - 1] = t;
  }
  const double log_bound = numerics::log2_sum(terms);

  FiniteBoundResult res;
  res.epsilon = epsilon;
  res.n = n;
  res.log2_bound = LogValue(std::min(0.0, log_bound));
  res.bound = std::clamp(std::exp2(log_bound), 0.0, 1.0);
  return res;
}

std::vector<FiniteBoundResult> bound_curve(const WeightEnumerator& awe,
                                           const spectral::EnsembleParams& params,
                                           std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("bound_curve: epsilon grid must be increasing");
  std::vector<FiniteBoundResult> out(grid.size());
  const auto m = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < m; ++i)
    out[i] = evaluate_bound(awe, params, grid[i]);
  return out;
}

std::vector<FiniteBoundResult> bound_curve_serial(
    const WeightEnumerator& awe, const spectral::EnsembleParams& params,
    std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw std::invalid_argument("bound_curve: epsilon grid must be increasing");
  std::vector<FiniteBoundResult> out;
  out.reserve(grid.size());
  for (double eps : grid) out.push_back(evaluate_bound(awe, params, eps));
  return out;
}

}  // namespace erexp::finite_bound

// Benchmark comparing the OpenMP-parallel kernels against their serial
// reference implementations: Monte Carlo decoding, exact pattern
// enumeration, finite-length bound curves and exponent curves.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "erexp/exponent.hpp"
#include "erexp/finite_bound.hpp"
#include "erexp/simulate.hpp"

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("%-28s %12s %12s %8s\n", "kernel", "serial ms", "parallel ms", "speedup");

  auto report = [](const char* name, double serial, double parallel) {
    std::printf("%-28s %12.1f %12.1f %7.2fx\n", name, serial, parallel,
                serial / parallel);
  };

  using namespace erexp;
  spectral::EnsembleParams rl{0.5, 2};

  {
    simulate::EnsembleSpec spec = simulate::RandomLinearEnsemble{{0.5, 2}};
    simulate::SimulationEstimate a, b;
    const double ts = time_ms([&] { a = simulate::monte_carlo_serial(spec, 128, 0.42, 20000, 7); });
    const double tp = time_ms([&] { b = simulate::monte_carlo(spec, 128, 0.42, 20000, 7); });
    report("monte_carlo n=128 2e4", ts, tp);
    if (!(a == b)) std::printf("  mismatch between serial and parallel estimates!\n");
  }

  {
    Rng rng(21);
    const auto code = simulate::sample_random_linear(20, {0.5, 2}, rng);
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = simulate::exact_block_error_serial(code, simulate::CodeForm::parity_check, 0.35); });
    const double tp = time_ms([&] { b = simulate::exact_block_error(code, simulate::CodeForm::parity_check, 0.35); });
    report("exact_block_error n=20", ts, tp);
    if (a != b) std::printf("  mismatch: %.17g vs %.17g\n", a, b);
  }

  {
    const auto awe = finite_bound::awe_random_linear(600, rl);
    std::vector<double> grid;
    for (int i = 1; i <= 24; ++i) grid.push_back(0.02 * i);
    std::vector<finite_bound::FiniteBoundResult> a, b;
    const double ts = time_ms([&] { a = finite_bound::bound_curve_serial(awe, rl, grid); });
    const double tp = time_ms([&] { b = finite_bound::bound_curve(awe, rl, grid); });
    report("bound_curve n=600 24pts", ts, tp);
  }

  {
    const auto shape = spectral::random_linear_shape(rl);
    std::vector<double> grid;
    for (int i = 1; i <= 24; ++i) grid.push_back(0.02 * i);
    exponent::GridOptions opt;
    opt.outer_points = 1024;
    exponent::ExponentCurve a, b;
    const double ts = time_ms([&] { a = exponent::exponent_curve_serial(shape, grid, opt); });
    const double tp = time_ms([&] { b = exponent::exponent_curve(shape, grid, opt); });
    report("exponent_curve 24pts", ts, tp);
    double worst = 0;
    for (std::size_t i = 0; i < a.points.size(); ++i)
      worst = std::max(worst, std::abs(a.points[i].value - b.points[i].value));
    if (worst > 1e-9) std::printf("  serial/parallel divergence: %.3g\n", worst);
  }

  return 0;
}

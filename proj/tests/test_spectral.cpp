#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "erexp/spectral.hpp"

using namespace erexp;
using namespace erexp::spectral;
using erexp::numerics::binary_entropy;

namespace {

DegreeDistribution gpp_omega() {
  return DegreeDistribution::from_pairs({{1, 0.0098},
                                         {2, 0.4590},
                                         {3, 0.2110},
                                         {4, 0.1134},
                                         {10, 0.1113},
                                         {11, 0.0799},
                                         {40, 0.0156}});
}

RaptorParams gpp_params() {
  RaptorParams p;
  p.inner_rate = 0.8;
  p.outer_rate = 0.99;
  p.omega = gpp_omega();
  return p;
}

RaptorParams degree_one(double ri, double ro) {
  RaptorParams p;
  p.inner_rate = ri;
  p.outer_rate = ro;
  p.omega = DegreeDistribution::from_pairs({{1, 1.0}});
  return p;
}

}  // namespace

TEST_CASE("degree distribution validation") {
  CHECK_THROWS_AS(DegreeDistribution::from_pairs({{1, 0.5}, {2, 0.4}}),
                  std::invalid_argument);  // sums to 0.9
  CHECK_THROWS_AS(DegreeDistribution::from_pairs({{2, 0.5}, {1, 0.5}}),
                  std::invalid_argument);  // not increasing
  CHECK_THROWS_AS(DegreeDistribution::from_pairs({{1, 1.5}, {2, -0.5}}),
                  std::invalid_argument);  // negative coefficient
  const auto d = gpp_omega();
  CHECK(d.max_degree() == 40);
  CHECK(d.mean_degree() == doctest::Approx(4.6303).epsilon(1e-12));
  CHECK(d.has_even_degree());
  const auto odd = DegreeDistribution::from_pairs({{1, 0.3}, {3, 0.7}});
  CHECK_FALSE(odd.has_even_degree());
  // structural zero on an even degree does not open the domain at 0
  const auto zeroed = DegreeDistribution::from_pairs({{1, 0.3}, {2, 0.0}, {3, 0.7}});
  CHECK_FALSE(zeroed.has_even_degree());
}

TEST_CASE("rho basics") {
  const auto d = gpp_omega();
  CHECK(d.rho(0.5) == doctest::Approx(0.5).epsilon(1e-12));   // sum of coefficients is 1
  CHECK(d.rho(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // regression value by direct summation over the seven terms
  CHECK(d.rho(0.009951) == doctest::Approx(0.042066478782912656).epsilon(1e-12));
  CHECK(d.drho(0.0) == doctest::Approx(4.6303).epsilon(1e-12));

  const auto one = DegreeDistribution::from_pairs({{1, 1.0}});
  for (double l : {0.1, 0.37, 0.9}) CHECK(one.rho(l) == doctest::Approx(l).epsilon(1e-14));

  // rho maps into [0,1] and increases on [0, 1/2]
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double l = 0.5 * i / 100;
    const double r = d.rho(l);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    CHECK(r >= prev - 1e-12);
    if (l < 0.5) CHECK(d.drho(l) > 0.0);
    prev = r;
  }
}

TEST_CASE("random linear shape closed forms") {
  const auto s = random_linear_shape({0.5, 2});
  CHECK(s.gamma == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s.G(0.25) == doctest::Approx(binary_entropy(0.25) - 0.5).epsilon(1e-15));
  // near the smallest positive root of G for q=2, r=1/2
  CHECK(s.G(0.11) == doctest::Approx(-8.404183547200406e-05).epsilon(1e-10));
  CHECK(s.G(0.5) == doctest::Approx(0.5).epsilon(1e-15));  // G(1/2) = r

  const auto s4 = random_linear_shape({0.5, 4});
  CHECK(s4.G(0.5) == doctest::Approx(0.5 * std::log2(3.0)).epsilon(1e-12));
  CHECK(s4.gamma == doctest::Approx(-1.0).epsilon(1e-15));

  // derivative against central differences
  for (double w : {0.1, 0.3, 0.45}) {
    const double fd = (s4.G(w + 1e-6) - s4.G(w - 1e-6)) / 2e-6;
    CHECK(s4.dG(w) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("random linear G has a single sign change on (0, 1/2]") {
  const auto s = random_linear_shape({0.5, 2});
  int flips = 0;
  double prev = s.G(1e-4);
  CHECK(prev < 0.0);
  for (int i = 1; i <= 5000; ++i) {
    const double w = 0.5 * i / 5000;
    const double g = s.G(w);
    if ((g > 0) != (prev > 0)) ++flips;
    prev = g;
  }
  CHECK(flips == 1);
}

TEST_CASE("nu values") {
  // with a rate-1 inner code nu(0.5-mix) vanishes at lambda = 1/2
  auto p1 = degree_one(1.0, 1.0);
  p1.outer_rate = 0.9;  // keep overall rate in (0,1) for validation
  for (double w : {0.1, 0.5, 0.9})
    CHECK(nu(p1, w, 0.5) == doctest::Approx(0.0).epsilon(1e-12));

  // general inner rate shifts the entropy term only
  const auto g = gpp_params();
  CHECK(nu(g, 0.3, 0.5) ==
        doctest::Approx(g.inner_rate * 1.0 - 1.0).epsilon(1e-12));

  // degree-1 distribution: rho = lambda, closed form in lambda
  const auto d1 = degree_one(0.7, 0.9);
  const double w = 0.23, l = 0.4;
  CHECK(nu(d1, w, l) ==
        doctest::Approx(0.7 * binary_entropy(l) + w * std::log2(l) +
                        (1 - w) * std::log2(1 - l))
            .epsilon(1e-12));

  // diverging mixtures produce -inf, not exceptions
  CHECK(nu(d1, 0.5, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("lambda0 stationarity and symmetry") {
  // symmetric case: degree-1, r_i = 1 makes nu symmetric under
  // lambda <-> 1-lambda at omega = 1/2
  auto p1 = degree_one(1.0, 0.9);
  const auto sym = lambda0(p1, 0.5);
  CHECK(sym.lambda == doctest::Approx(0.5).epsilon(1e-8));

  const auto g = gpp_params();
  for (double w : {0.004, 0.05, 0.2}) {
    const auto l0 = lambda0(g, w);
    CHECK_FALSE(l0.clamped);
    CHECK(std::abs(dnu(g, w, l0.lambda)) < 1e-6);
    // maximizer beats a dense grid scan
    double best = -1e300;
    for (int i = 1; i < 4000; ++i) best = std::max(best, nu(g, w, i / 4000.0));
    CHECK(l0.nu_value >= best - 1e-9);
  }
}

TEST_CASE("lambda0 matches the known threshold pair") {
  // at omega = delta* rho(lambda*), the inner maximizer returns lambda*
  const auto g = gpp_params();
  const double lambda_star = 0.009951;
  const double omega_hat = 0.090771 * g.omega.rho(lambda_star);
  const auto l0 = lambda0(g, omega_hat);
  CHECK(l0.lambda == doctest::Approx(lambda_star).epsilon(2e-4));
}

TEST_CASE("raptor shape: gamma, membership, usefulness") {
  const auto g = gpp_params();
  CHECK(membership_in_P(g));
  const auto shape = raptor_shape(g);
  CHECK(shape.gamma < 0.0);
  CHECK(shape.gamma == doctest::Approx(-0.003827509889771829).epsilon(1e-9));
  CHECK(shape.params.rate == doctest::Approx(0.792).epsilon(1e-12));

  // no precoder redundancy: gamma >= 0, bound not useful
  auto useless = gpp_params();
  useless.outer_rate = 1.0;
  useless.inner_rate = 0.8;
  CHECK_FALSE(membership_in_P(useless));
  const auto ushape = raptor_shape(useless);
  CHECK(ushape.gamma >= 0.0);
  CHECK_FALSE(ushape.useful());

  // membership iff gamma < 0 on a few parameter points
  for (double ro : {0.9, 0.99, 1.0}) {
    auto p = gpp_params();
    p.outer_rate = ro;
    CHECK(membership_in_P(p) == (raptor_shape(p).gamma < 0.0));
  }

  // regression: degree-1 distribution at r_i = r_o = 1/2 stays in the region
  const auto d1 = degree_one(0.5, 0.5);
  CHECK(membership_in_P(d1));
  CHECK(limit_inner_max(d1) == doctest::Approx(0.08251122943614095).epsilon(1e-9));
  CHECK(raptor_shape(d1).gamma == doctest::Approx(-0.16748877056385905).epsilon(1e-9));
}

TEST_CASE("raptor shape: G consistency between table-seeded and full scans") {
  const auto g = gpp_params();
  const auto shape = raptor_shape(g);
  for (int i = 1; i <= 200; ++i) {
    const double w = static_cast<double>(i) / 201.0;
    const auto full = lambda0(g, w);
    const double g_full = binary_entropy(w) - g.inner_rate * (1 - g.outer_rate) + full.nu_value;
    CHECK(shape.G(w) == doctest::Approx(g_full).epsilon(1e-8));
  }
}

TEST_CASE("raptor shape: derivative matches finite differences") {
  const auto shape = raptor_shape(gpp_params());
  for (int i = 0; i <= 24; ++i) {
    const double w = 0.01 + (0.49 - 0.01) * i / 24;
    const double fd = (shape.G(w + 5e-6) - shape.G(w - 5e-6)) / 1e-5;
    CHECK(shape.dG(w) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("raptor shape: derivative blows up toward omega -> 0+") {
  const auto shape = raptor_shape(gpp_params());
  const double d3 = shape.dG(1e-3);
  const double d2 = shape.dG(1e-2);
  CHECK(d3 > d2);
  CHECK(d2 > 0.0);
}

TEST_CASE("shape from samples") {
  // samples of the random-linear shape should reproduce it approximately
  const auto rl = random_linear_shape({0.5, 2});
  std::vector<std::pair<double, double>> samples;
  for (int i = 1; i <= 400; ++i) {
    const double w = static_cast<double>(i) / 401.0;
    samples.emplace_back(w, rl.G(w));
  }
  const auto s = shape_from_samples(samples, -0.5, {0.5, 2});
  CHECK(s.gamma == -0.5);
  for (double w : {0.1, 0.25, 0.4})
    CHECK(s.G(w) == doctest::Approx(rl.G(w)).epsilon(1e-4));

  // discontinuous samples violate the continuity modulus
  std::vector<std::pair<double, double>> bad = {{0.1, 0.0}, {0.1002, 2.0}, {0.3, 2.0}};
  CHECK_THROWS_AS(shape_from_samples(bad, {}, {0.5, 2}), std::invalid_argument);

  // non-increasing omega rejected
  std::vector<std::pair<double, double>> dup = {{0.1, 0.0}, {0.1, 0.1}};
  CHECK_THROWS_AS(shape_from_samples(dup, {}, {0.5, 2}), std::invalid_argument);
}

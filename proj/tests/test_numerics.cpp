#include <doctest.h>

#include <cmath>
#include <random>

#include "chi0emos/distributions.hpp"
#include "chi0emos/numerics.hpp"

using namespace chi0emos;

TEST_CASE("integrate: elementary integrals") {
  QuadratureSpec spec;

  auto linear = integrate([](double x) { return x; }, 0.0, 1.0, spec);
  CHECK(linear.converged);
  CHECK(linear.value == doctest::Approx(0.5).epsilon(1e-12));

  auto expDecay = integrate([](double x) { return std::exp(-x); }, 0.0,
                            std::numeric_limits<double>::infinity(), spec);
  CHECK(expDecay.converged);
  CHECK(std::abs(expDecay.value - 1.0) < 1e-10);
}

TEST_CASE("integrate: survival-squared integral matches the chi0 mean identity") {
  // int_0^inf (1-F)^2 dx = E|X - 0| - 0.5 E|X - X'| = CRPS at y = 0; checked
  // here against a 10^6-draw Monte-Carlo evaluation of that identity
  const Chi0Params params(2.0, 1.0);
  const PredictiveDistribution dist{params};
  auto f = [&params](double x) {
    const double s = 1.0 - chi0Cdf(x, params);
    return s * s;
  };
  auto result = integrate(f, 0.0, 60.0, QuadratureSpec{});
  REQUIRE(result.converged);

  Rng rng(321);
  double sum = 0.0;
  const long n = 1000000;
  const Eigen::ArrayXd x1 = dist.sample(rng, n);
  const Eigen::ArrayXd x2 = dist.sample(rng, n);
  for (long i = 0; i < n; ++i) sum += std::abs(x1[i]) - 0.5 * std::abs(x1[i] - x2[i]);
  CHECK(result.value == doctest::Approx(sum / n).epsilon(1e-3));
}

TEST_CASE("integrate: linearity over random polynomials") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  QuadratureSpec spec;
  for (int rep = 0; rep < 25; ++rep) {
    double cf[6], cg[6];
    for (double& c : cf) c = coeff(rng);
    for (double& c : cg) c = coeff(rng);
    auto poly = [](const double* c, double x) {
      double v = 0.0;
      for (int k = 5; k >= 0; --k) v = v * x + c[k];
      return v;
    };
    const double a = coeff(rng), b = coeff(rng);
    auto fa = integrate([&](double x) { return poly(cf, x); }, 0.0, 2.0, spec);
    auto fb = integrate([&](double x) { return poly(cg, x); }, 0.0, 2.0, spec);
    auto combined =
        integrate([&](double x) { return a * poly(cf, x) + b * poly(cg, x); }, 0.0, 2.0, spec);
    REQUIRE(fa.converged);
    REQUIRE(fb.converged);
    REQUIRE(combined.converged);
    CHECK(std::abs(combined.value - (a * fa.value + b * fb.value)) <
          1e-10 * (1.0 + std::abs(combined.value)));
  }
}

TEST_CASE("integrate: error estimates are honest on analytic integrals") {
  struct Case {
    std::function<double(double)> f;
    double lo, hi, exact;
  };
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<Case> cases = {
      {[](double x) { return x * x; }, 0, 1, 1.0 / 3.0},
      {[](double x) { return x * x * x * x * x; }, 0, 2, 64.0 / 6.0},
      {[](double x) { return std::exp(-x); }, 0, 5, 1.0 - std::exp(-5.0)},
      {[](double x) { return std::sin(x); }, 0, M_PI, 2.0},
      {[](double x) { return 1.0 / (1.0 + x * x); }, 0, 1, M_PI / 4.0},
      {[](double x) { return std::sqrt(x); }, 0, 1, 2.0 / 3.0},
      {[](double x) { return 1.0 / std::sqrt(x); }, 0, 1, 2.0},
      {[](double x) { return std::log(x); }, 0, 1, -1.0},
      {[](double x) { return std::exp(-x * x); }, 0, 2, 0.5 * std::sqrt(M_PI) * std::erf(2.0)},
      {[](double x) { return std::cos(10.0 * x); }, 0, 1, std::sin(10.0) / 10.0},
      {[](double x) { return std::exp(-100.0 * (x - 0.5) * (x - 0.5)); }, 0, 1,
       std::sqrt(M_PI) / 10.0 * std::erf(5.0)},
      {[](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1, 1, 2.0 * std::atan(5.0) / 5.0},
      {[](double x) { return x * std::exp(-x); }, 0, inf, 1.0},
      {[](double x) { return x * x * std::exp(-x); }, 0, inf, 2.0},
      {[](double x) { return std::exp(-0.5 * x * x); }, 0, inf, std::sqrt(0.5 * M_PI)},
      {[](double x) { return 1.0 / ((1.0 + x) * (1.0 + x)); }, 0, inf, 1.0},
      {[](double x) { return std::sin(3.0 * x) * std::exp(-x); }, 0, 10,
       0.3 - std::exp(-10.0) * (std::sin(30.0) + 3.0 * std::cos(30.0)) / 10.0},
      {[](double x) { return std::cosh(x) - 1.0; }, -1, 1, 2.0 * std::sinh(1.0) - 2.0},
      {[](double x) { return std::abs(x - 0.3); }, 0, 1, 0.5 * (0.09 + 0.49)},
      {[](double x) { return std::pow(x, 1.5); }, 0, 4, 2.0 / 5.0 * 32.0},
  };
  REQUIRE(cases.size() == 20);
  for (size_t i = 0; i < cases.size(); ++i) {
    CAPTURE(i);
    auto r = integrate(cases[i].f, cases[i].lo, cases[i].hi, QuadratureSpec{});
    REQUIRE(r.converged);
    const double trueError = std::abs(r.value - cases[i].exact);
    CHECK(trueError <= 10.0 * r.errorEstimate);
  }
}

TEST_CASE("integrate: non-convergence carries the best estimate") {
  QuadratureSpec strict;
  strict.absTol = 1e-15;
  strict.relTol = 1e-15;
  strict.maxSubdivisions = 3;
  auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, strict);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
  CHECK(r.errorEstimate > 0.0);
}

TEST_CASE("integrate: argument validation") {
  CHECK_THROWS_AS(integrate([](double) { return 0.0; }, 1.0, 0.0, QuadratureSpec{}),
                  std::invalid_argument);
  QuadratureSpec bad;
  bad.absTol = -1.0;
  CHECK_THROWS_AS(integrate([](double) { return 0.0; }, 0.0, 1.0, bad),
                  std::invalid_argument);
}

TEST_CASE("findRoot: elementary brackets") {
  CHECK(findRoot([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-10) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(findRoot([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-10) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("findRoot: agrees with chi0Quantile on a CDF inversion") {
  const Chi0Params params(4.0, 2.0);
  const double viaRoot = findRoot(
      [&params](double x) { return chi0Cdf(x, params) - 0.9; }, 0.0, 100.0, 1e-10);
  CHECK(viaRoot == doctest::Approx(chi0Quantile(0.9, params)).epsilon(1e-8));
}

TEST_CASE("findRoot: error paths") {
  CHECK_THROWS_AS(findRoot([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-8),
                  std::invalid_argument);
  CHECK_THROWS_AS(findRoot([](double x) { return x; }, 1.0, 0.5, 1e-8),
                  std::invalid_argument);
}

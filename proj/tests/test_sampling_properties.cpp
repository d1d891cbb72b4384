#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "chi0emos/emos.hpp"
#include "chi0emos/scoring.hpp"
#include "chi0emos/synth.hpp"
#include "chi0emos/verification.hpp"
#include "oracles.hpp"

using namespace chi0emos;

TEST_CASE("chi0Sample: mean and variance match the closed form within MC error") {
  const Chi0Params params(3.0, 2.0);  // mean 6, variance 48
  Rng rng(1001);
  const long n = 1000000;
  const Eigen::ArrayXd x = chi0Sample(params, rng, n);

  const double mean = x.mean();
  const double sd = std::sqrt((x - mean).square().sum() / static_cast<double>(n - 1));
  const double seMean = sd / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 6.0) < 4.0 * seMean);

  const double var = sd * sd;
  const double m4 = (x - mean).pow(4).mean();
  const double seVar = std::sqrt((m4 - var * var) / static_cast<double>(n));
  CHECK(std::abs(var - 48.0) < 4.0 * seVar);
}

TEST_CASE("chi0Sample: fraction of exact zeros is the atom mass") {
  const Chi0Params params(2.0, 1.0);
  Rng rng(1002);
  const long n = 1000000;
  const Eigen::ArrayXd x = chi0Sample(params, rng, n);
  const double frac = static_cast<double>((x == 0.0).count()) / static_cast<double>(n);
  const double p = std::exp(-1.0);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  CHECK(std::abs(frac - p) < 3.0 * se);
}

TEST_CASE("chi0Cdf: matches the compound-Poisson sampling oracle") {
  const Chi0Params params(2.0, 1.5);
  const PredictiveDistribution dist{params};
  Rng rng(1003);
  const long n = 10000000;
  const double x = 3.0;
  const double p = chi0Cdf(x, params);
  const double phat = oracles::mcCdf(dist, x, n, rng);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  CHECK(std::abs(phat - p) < 3.0 * se);
}

TEST_CASE("chi0Sample: KS distance of the positive part against the conditional CDF") {
  const Chi0Params params(2.5, 1.3);
  Rng rng(1004);
  const double atom = chi0Cdf(0.0, params);

  std::vector<double> positives;
  const long target = 100000;
  while (positives.size() < static_cast<size_t>(target)) {
    const Eigen::ArrayXd draws = chi0Sample(params, rng, 200000);
    for (long i = 0; i < draws.size() && positives.size() < static_cast<size_t>(target); ++i)
      if (draws[i] > 0.0) positives.push_back(draws[i]);
  }
  std::sort(positives.begin(), positives.end());

  double ks = 0.0;
  const double n = static_cast<double>(positives.size());
  for (size_t i = 0; i < positives.size(); ++i) {
    const double g = (chi0Cdf(positives[i], params) - atom) / (1.0 - atom);
    ks = std::max(ks, std::abs(g - (i + 1) / n));
    ks = std::max(ks, std::abs(g - i / n));
  }
  CHECK(ks < 2.0 * oracles::kKsCrit1pcFactor / std::sqrt(n));
}

TEST_CASE("csg0Cdf: matches the shift-and-clamp sampling oracle") {
  const Csg0Params params(1.8, 2.1, 0.9);
  const PredictiveDistribution dist{params};
  Rng rng(1005);
  const long n = 2000000;
  for (double x : {0.0, 0.7, 2.5, 8.0}) {
    const double p = csg0Cdf(x, params);
    const double phat = oracles::mcCdf(dist, x, n, rng);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CAPTURE(x);
    CHECK(std::abs(phat - p) < 3.5 * se);
  }
}

TEST_CASE("crpsDistribution: quadrature equals the sampling identity per family") {
  Rng rng(1006);
  const long nPairs = 1000000;
  const std::vector<std::pair<PredictiveDistribution, double>> cases = {
      {PredictiveDistribution{Chi0Params(2.0, 1.0)}, 1.5},
      {PredictiveDistribution{Chi0Params(5.0, 0.6)}, 0.0},
      {PredictiveDistribution{Csg0Params(2.2, 1.4, 0.7)}, 2.0},
      {PredictiveDistribution{Csg0Params(0.8, 2.0, 0.0)}, 0.3},
      {PredictiveDistribution{Gev0Params(1.0, 0.8, 0.15)}, 1.2},
      {PredictiveDistribution{Gev0Params(-0.5, 1.5, 0.0)}, 4.0},
  };
  for (const auto& [dist, y] : cases) {
    const double quad = crpsDistribution(dist, y);
    const auto mc = oracles::mcCrpsIdentity(dist, y, nPairs, rng);
    CAPTURE(y);
    CHECK(std::abs(quad - mc.value) < 3.0 * mc.se);
  }
}

TEST_CASE("moments: benchmark survival-quadrature moments match sampling") {
  Rng rng(1007);
  const long n = 1000000;
  const std::vector<PredictiveDistribution> dists = {
      PredictiveDistribution{Csg0Params(2.5, 1.2, 0.5)},
      PredictiveDistribution{Gev0Params(0.8, 1.1, 0.2)},
  };
  for (const auto& dist : dists) {
    const Moments m = dist.moments();
    const Eigen::ArrayXd x = dist.sample(rng, n);
    const double mean = x.mean();
    const double var = (x - mean).square().sum() / static_cast<double>(n - 1);
    const double seMean = std::sqrt(var / static_cast<double>(n));
    const double m4 = (x - mean).pow(4).mean();
    const double seVar = std::sqrt(std::max(m4 - var * var, 0.0) / static_cast<double>(n));
    CHECK(std::abs(m.mean - mean) < 4.0 * seMean);
    CHECK(std::abs(m.variance - var) < 4.0 * seVar);
  }
}

TEST_CASE("crps propriety at desk scale: the generating law wins on average") {
  Rng rng(1008);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int wins = 0;
  for (int rep = 0; rep < 10; ++rep) {
    const Chi0Params truthParams(0.5 + 5.0 * unit(rng), 0.4 + 1.6 * unit(rng));
    const Chi0Params otherParams(0.5 + 5.0 * unit(rng), 0.4 + 1.6 * unit(rng));
    const PredictiveDistribution truth{truthParams};
    const PredictiveDistribution other{otherParams};

    const long n = 10000;
    const Eigen::ArrayXd y = truth.sample(rng, n);
    double truthScore = 0.0, otherScore = 0.0;
    for (long i = 0; i < n; ++i) {
      truthScore += crpsDistribution(truth, y[i]);
      otherScore += crpsDistribution(other, y[i]);
    }
    if (truthScore <= otherScore) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("pit: model-consistent data gives uniform PIT values") {
  Rng rng(1009);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int cases = 10000;
  std::vector<double> pits;
  pits.reserve(cases);
  for (int i = 0; i < cases; ++i) {
    const Chi0Params params(0.3 + 5.7 * unit(rng), 0.5 + 1.5 * unit(rng));
    const PredictiveDistribution dist{params};
    const double y = dist.sample(rng, 1)[0];
    pits.push_back(pit(dist, y, rng).value);
  }
  const Eigen::ArrayXi counts = histogram(pits, 20);
  const double stat = oracles::chiSquareStatistic(counts, cases / 20.0);
  CHECK(stat < oracles::kChi2Crit1pc19df);
}

TEST_CASE("verificationRank: exchangeable members and observation give flat ranks") {
  Rng rng(1010);
  std::gamma_distribution<double> law(2.0, 1.5);
  const int m = 20;
  const int cases = 5000;
  std::vector<int> ranks;
  ranks.reserve(cases);
  for (int i = 0; i < cases; ++i) {
    Eigen::ArrayXd members(m);
    for (int k = 0; k < m; ++k) members[k] = law(rng);
    const double y = law(rng);
    ranks.push_back(verificationRank(members, y, rng));
  }
  const RankHistogram h = rankHistogram(ranks, m);
  const double stat =
      oracles::chiSquareStatistic(h.counts, static_cast<double>(cases) / (m + 1));
  CHECK(stat < oracles::kChi2Crit1pc20df);
}

TEST_CASE("rollingForecast: overlapping windows give smooth coefficient paths") {
  SynthSpec spec;
  spec.days = 130;
  spec.seed = 2026;
  const ForecastDataset data = synthesizeDataset(spec);

  RollingOptions options;
  options.train.simplex.maxEvals = 300;
  const std::vector<RollingRecord> records =
      rollingForecast(data.stations[0], Family::chi0, options);
  REQUIRE(records.size() == 100);

  Eigen::ArrayXd aSq(100);
  for (int i = 0; i < 100; ++i)
    aSq[i] = records[i].coefficients.a * records[i].coefficients.a;
  const Eigen::ArrayXd x = aSq.head(99);
  const Eigen::ArrayXd y = aSq.tail(99);
  const double mx = x.mean(), my = y.mean();
  const double cov = ((x - mx) * (y - my)).mean();
  const double corr =
      cov / std::sqrt((x - mx).square().mean() * (y - my).square().mean());
  CHECK(corr > 0.5);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chi0emos/scoring.hpp"
#include "oracles.hpp"

using namespace chi0emos;

namespace {

Eigen::ArrayXd arr(std::initializer_list<double> v) {
  Eigen::ArrayXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("crpsDistribution: point-mass limits reduce to absolute error") {
  const PredictiveDistribution atom{Chi0Params(0.0, 1.0)};
  CHECK(crpsDistribution(atom, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(crpsDistribution(atom, 2.0) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(crpsDistribution(atom, -1.0), std::domain_error);
}

TEST_CASE("crpsDistribution: nonnegative on random cases") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const PredictiveDistribution dist{
        Chi0Params(6.0 * unit(rng), 0.3 + 2.0 * unit(rng))};
    const double y = 8.0 * unit(rng);
    CHECK(crpsDistribution(dist, y) >= 0.0);
  }
}

TEST_CASE("crpsEnsemble: hand values and edge cases") {
  CHECK(crpsEnsemble(arr({3.0}), 1.0) == 2.0);          // single member: |f - y|
  CHECK(crpsEnsemble(arr({0.0, 2.0}), 1.0) == 0.5);     // hand-evaluated double sum
  CHECK(crpsEnsemble(arr({4.0, 4.0, 4.0}), 4.0) == 0.0);
  CHECK_THROWS_AS(crpsEnsemble(Eigen::ArrayXd(), 1.0), std::invalid_argument);
}

TEST_CASE("crpsEnsemble: sorted identity equals the brute-force double sum") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> sizeDist(1, 50);
  std::uniform_real_distribution<double> value(0.0, 20.0);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = sizeDist(rng);
    Eigen::ArrayXd members(m);
    for (int i = 0; i < m; ++i) members[i] = value(rng);
    const double y = value(rng);
    CHECK(crpsEnsemble(members, y) ==
          doctest::Approx(oracles::bruteForceCrpsEnsemble(members, y)).epsilon(1e-12));

    // invariance under member permutation
    Eigen::ArrayXd shuffled = members;
    std::shuffle(shuffled.data(), shuffled.data() + m, rng);
    CHECK(crpsEnsemble(shuffled, y) == doctest::Approx(crpsEnsemble(members, y)).epsilon(1e-13));
  }
}

TEST_CASE("brierScore: hand values and validation") {
  CHECK(brierScore(arr({1.0}), arr({1.0})) == 0.0);
  CHECK(brierScore(arr({0.5, 0.5, 0.5}), arr({1.0, 0.0, 1.0})) == 0.25);
  CHECK(brierScore(arr({0.2, 0.8}), arr({0.0, 1.0})) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK_THROWS_AS(brierScore(arr({0.5}), arr({1.0, 0.0})), std::invalid_argument);
  CHECK_THROWS_AS(brierScore(Eigen::ArrayXd(), Eigen::ArrayXd()), std::invalid_argument);
  CHECK_THROWS_AS(brierScore(arr({1.2}), arr({1.0})), std::domain_error);
  CHECK_THROWS_AS(brierScore(arr({0.5}), arr({0.7})), std::domain_error);
}

TEST_CASE("eventProbability: complements the CDF") {
  const PredictiveDistribution degenerate{Chi0Params(0.0, 1.0)};
  CHECK(eventProbability(degenerate, 0.0) == 0.0);

  const Chi0Params params(4.0, 1.0);
  const PredictiveDistribution dist{params};
  CHECK(eventProbability(dist, 5.0) == doctest::Approx(1.0 - chi0Cdf(5.0, params)));
  CHECK(eventProbability(dist, 0.0) ==
        doctest::Approx(1.0 - dist.pointMassAtZero()).epsilon(1e-14));
  CHECK_THROWS_AS(eventProbability(dist, -1.0), std::domain_error);
}

TEST_CASE("ensembleEventFrequency: strict exceedance") {
  CHECK(ensembleEventFrequency(arr({0.0, 0.0, 0.0}), 0.0) == 0.0);
  CHECK(ensembleEventFrequency(arr({1.0, 2.0, 3.0, 4.0}), 2.0) == 0.5);
  CHECK_THROWS_AS(ensembleEventFrequency(arr({1.0}), -1.0), std::domain_error);
  CHECK_THROWS_AS(ensembleEventFrequency(Eigen::ArrayXd(), 1.0), std::invalid_argument);
}

TEST_CASE("pavIsotonic: small cases") {
  // already isotone
  const IsotonicFit keep = pavIsotonic(arr({0.1, 0.2, 0.6, 0.9}), arr({0.0, 0.0, 1.0, 1.0}));
  CHECK(keep.fitted[0] == 0.0);
  CHECK(keep.fitted[3] == 1.0);
  CHECK(keep.segments.size() == 2);

  // one violation pooled
  const IsotonicFit pooled = pavIsotonic(arr({0.3, 0.7}), arr({1.0, 0.0}));
  CHECK(pooled.fitted[0] == 0.5);
  CHECK(pooled.fitted[1] == 0.5);
  CHECK(pooled.segments.size() == 1);
  CHECK(pooled.segments[0].count == 2);

  // single pair
  const IsotonicFit single = pavIsotonic(arr({0.4}), arr({1.0}));
  CHECK(single.fitted[0] == 1.0);

  CHECK_THROWS_AS(pavIsotonic(Eigen::ArrayXd(), Eigen::ArrayXd()), std::invalid_argument);
}

TEST_CASE("pavIsotonic: ties in the forecast pool before fitting") {
  const IsotonicFit fit = pavIsotonic(arr({0.5, 0.5, 0.2}), arr({1.0, 0.0, 0.0}));
  // block at 0.5 averages its outcomes; fit stays a function of the forecast
  CHECK(fit.fitted[0] == fit.fitted[1]);
  CHECK(fit.fitted[0] == 0.5);
  CHECK(fit.fitted[2] == 0.0);
}

TEST_CASE("pavIsotonic: nondecreasing, mean-preserving, matches brute force") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(unit(rng) * 7.99);
    Eigen::ArrayXd probs(n), outcomes(n);
    for (int i = 0; i < n; ++i) {
      probs[i] = (i + unit(rng)) / n;  // distinct by construction
      outcomes[i] = coin(rng) ? 1.0 : 0.0;
    }
    std::shuffle(probs.data(), probs.data() + n, rng);

    const IsotonicFit fit = pavIsotonic(probs, outcomes);
    CHECK(fit.fitted.sum() == doctest::Approx(outcomes.sum()).epsilon(1e-12));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&probs](int a, int b) { return probs[a] < probs[b]; });
    for (int i = 1; i < n; ++i)
      CHECK(fit.fitted[order[i]] >= fit.fitted[order[i - 1]] - 1e-14);

    const Eigen::ArrayXd brute = oracles::bruteForcePavFit(probs, outcomes);
    for (int i = 0; i < n; ++i) CHECK(std::abs(fit.fitted[i] - brute[i]) < 1e-12);
  }
}

TEST_CASE("brierDecomposition: identities and sign guarantees") {
  SUBCASE("calibrated two-level forecast has zero miscalibration") {
    const Eigen::ArrayXd p = arr({0.0, 0.0, 1.0, 1.0});
    const Eigen::ArrayXd y = arr({0.0, 0.0, 1.0, 1.0});
    const BrierDecomposition d = brierDecomposition(p, y);
    CHECK(d.mcb == 0.0);
    CHECK(d.meanBrier == 0.0);
  }
  SUBCASE("climatological constant forecast") {
    const Eigen::ArrayXd y = arr({1.0, 0.0, 0.0, 1.0});
    const Eigen::ArrayXd p = arr({0.5, 0.5, 0.5, 0.5});
    const BrierDecomposition d = brierDecomposition(p, y);
    CHECK(d.dsc == 0.0);
    CHECK(d.mcb == 0.0);
    CHECK(d.meanBrier == doctest::Approx(d.unc).epsilon(1e-15));
  }
  SUBCASE("four-point case against exhaustive pooling") {
    const Eigen::ArrayXd p = arr({0.2, 0.8, 0.8, 0.2});
    const Eigen::ArrayXd y = arr({0.0, 1.0, 0.0, 1.0});
    const BrierDecomposition d = brierDecomposition(p, y);
    // PAV pools each tied forecast level; fits are the level means (0.5, 0.5)
    CHECK(d.meanBrier == doctest::Approx(0.5 * (0.04 + 0.64)).epsilon(1e-14));
    CHECK(d.mcb == doctest::Approx(d.meanBrier - 0.25).epsilon(1e-12));
    CHECK(d.dsc == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.unc == 0.25);
  }
  SUBCASE("random inputs satisfy the exact identity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.4);
    for (int rep = 0; rep < 300; ++rep) {
      const int n = 2 + static_cast<int>(unit(rng) * 40);
      Eigen::ArrayXd p(n), y(n);
      for (int i = 0; i < n; ++i) {
        p[i] = unit(rng);
        y[i] = coin(rng) ? 1.0 : 0.0;
      }
      const BrierDecomposition d = brierDecomposition(p, y);
      CHECK(std::abs(d.meanBrier - (d.mcb - d.dsc + d.unc)) < 1e-12);
      CHECK(d.mcb >= 0.0);
      CHECK(d.dsc >= 0.0);
      CHECK(d.unc >= 0.0);
      CHECK(d.unc <= 0.25);
    }
  }
}

TEST_CASE("makeScoreReport: aggregates") {
  const ScoreReport report = makeScoreReport({{"a", 1.0}, {"b", 3.0}, {"c", 2.0}});
  CHECK(report.mean == 2.0);
  CHECK(report.max == 3.0);
  CHECK(report.count == 3);
  CHECK_THROWS_AS(makeScoreReport({}), std::invalid_argument);
}

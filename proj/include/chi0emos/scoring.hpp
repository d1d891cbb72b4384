#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "chi0emos/distributions.hpp"
#include "chi0emos/numerics.hpp"

namespace chi0emos {

/// Per-case scores with their aggregates, one table row per forecast case.
struct ScoreReport {
  struct Case {
    std::string id;
    double score;
  };
  std::vector<Case> perCase;
  double mean = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

ScoreReport makeScoreReport(std::vector<ScoreReport::Case> cases);

/// CRPS(F, y) = int_0^y F^2 + int_y^inf (1-F)^2 for y >= 0 (F vanishes
/// below 0).  The upper integral is truncated at the (1 - tailCutoff)
/// quantile; the remaining tail is folded into the error estimate, which
/// must come out <= 1e-6 or the call throws QuadratureFailure.
double crpsDistribution(const PredictiveDistribution& dist, double y,
                        const QuadratureSpec& spec = {});

/// Closed-form ensemble CRPS: (1/m) sum|f_i - y| - 1/(2 m^2) sum sum|f_i - f_j|,
/// evaluated through the sorted-member identity.
double crpsEnsemble(const Eigen::ArrayXd& members, double y);

/// Mean of (p_i - y_i)^2 over forecast-probability/outcome pairs.
double brierScore(const Eigen::ArrayXd& probs, const Eigen::ArrayXd& outcomes);

/// P(X > threshold) = 1 - CDF(threshold), threshold >= 0.
double eventProbability(const PredictiveDistribution& dist, double threshold);

/// Fraction of members strictly above the threshold.
double ensembleEventFrequency(const Eigen::ArrayXd& members, double threshold);

/// Isotonic least-squares fit of binary outcomes on forecast-probability
/// order (pool adjacent violators; tied forecast values pooled first).
struct IsotonicFit {
  /// Fitted conditional event probability per input pair, original order.
  Eigen::ArrayXd fitted;
  /// Maximal constant pieces of the fit in forecast order.
  struct Segment {
    double probLo;
    double probHi;
    double cep;
    Eigen::Index count;
  };
  std::vector<Segment> segments;
};

IsotonicFit pavIsotonic(const Eigen::ArrayXd& probs, const Eigen::ArrayXd& outcomes);

/// Mean Brier score split as meanBrier = mcb - dsc + unc via isotonic
/// recalibration: mcb = BS(p) - BS(pav), dsc = BS(base rate) - BS(pav),
/// unc = base rate * (1 - base rate).
struct BrierDecomposition {
  double meanBrier;
  double mcb;
  double dsc;
  double unc;
};

BrierDecomposition brierDecomposition(const Eigen::ArrayXd& probs,
                                      const Eigen::ArrayXd& outcomes);

}  // namespace chi0emos

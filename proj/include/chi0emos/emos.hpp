#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "chi0emos/dataset.hpp"
#include "chi0emos/distributions.hpp"
#include "chi0emos/numerics.hpp"
#include "chi0emos/optimizer.hpp"

namespace chi0emos {

/// One forecast case: the raw member values plus the derived statistics
/// the links consume (mean, sd with divisor m-1, all-zero flag).
class EnsembleForecast {
 public:
  explicit EnsembleForecast(Eigen::ArrayXd members);

  const Eigen::ArrayXd& members() const { return members_; }
  double mean() const { return mean_; }
  double sd() const { return sd_; }
  bool allZero() const { return allZero_; }

 private:
  Eigen::ArrayXd members_;
  double mean_;
  double sd_;
  bool allZero_;
};

/// Trainable link coefficients.  a,b,c,d enter the links squared, so any
/// sign is accepted; `extra` is the per-family constant that is re-fitted
/// alongside them (GEV0 shape xi in [0, 0.5), CSG0 shift delta >= 0;
/// unused for Chi0).
struct EmosCoefficients {
  Family family = Family::chi0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double extra = 0.0;

  /// The starting point the training protocol uses: a=0.5, b=c=d=1,
  /// plus xi=0.1 / delta=0.1 for the benchmark families.
  static EmosCoefficients startingValues(Family family);

  void validate() const;

  /// Optimizer layout: [a,b,c,d](,extra); constantLink drops b and d.
  Eigen::VectorXd toVector(bool constantLink = false) const;
  static EmosCoefficients fromVector(Family family, const Eigen::VectorXd& v,
                                     bool constantLink = false);
};

struct TrainingWindow {
  std::vector<std::pair<EnsembleForecast, double>> cases;  // (forecast, observation)

  void validate() const;
};

/// lambda = a^2 + b^2 fbar, sigma = c^2 + d^2 s_f (floored at 1e-8).
/// All-zero ensembles reduce to (a^2, c^2) with no special casing.
Chi0Params linkChi0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast);

/// Benchmark links: target mean a^2 + b^2 fbar and sd c^2 + d^2 s_f are
/// moment-matched into the family's parameters (CSG0: k = mean^2/sd^2,
/// theta = sd^2/mean; GEV0: location/scale solved given xi, Gumbel
/// formulas at xi = 0).
Csg0Params linkCsg0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast);
Gev0Params linkGev0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast);

/// Family dispatch over the three links.
PredictiveDistribution linkDistribution(const EmosCoefficients& coeffs,
                                        const EnsembleForecast& forecast);

/// Mean CRPS of the linked distribution over the window.  Infeasible
/// coefficient proposals and quadrature failures yield +infinity (the
/// optimizer's rejection-penalty convention); failures are counted into
/// *quadratureFailures when given.
double meanCrpsObjective(const Eigen::VectorXd& coeffVector, const TrainingWindow& window,
                         Family family, const QuadratureSpec& spec = {},
                         bool constantLink = false, int* quadratureFailures = nullptr);

struct TrainOptions {
  SimplexConfig simplex;
  QuadratureSpec quadrature;
  /// Force b = d = 0 (climatological link that ignores the ensemble).
  bool constantLink = false;

  TrainOptions() {
    simplex.maxEvals = 500;
    simplex.fTol = 1e-7;
    simplex.xTol = 1e-5;
    quadrature.absTol = 1e-8;
    quadrature.relTol = 1e-7;
  }
};

struct TrainDiagnostics {
  bool converged = false;
  int evals = 0;
  double startObjective = 0.0;
  double finalObjective = 0.0;
  int quadratureFailures = 0;
};

struct TrainResult {
  EmosCoefficients coefficients;
  TrainDiagnostics diagnostics;
};

/// Nelder-Mead CRPS-minimum fit over one window from the given start
/// (non-convergence is reported, not thrown).
TrainResult trainWindow(const TrainingWindow& window, Family family,
                        const EmosCoefficients& start, const TrainOptions& options = {});

struct RollingOptions {
  int windowSize = 30;
  /// Start each window from the previous window's optimum instead of the
  /// fixed starting values.
  bool warmStart = false;
  TrainOptions train;
};

struct RollingRecord {
  std::int64_t day;
  double observation;
  EnsembleForecast forecast;
  PredictiveDistribution dist;
  EmosCoefficients coefficients;
  TrainDiagnostics diagnostics;
};

/// Indices of the predictable days of a series under the rolling-window
/// bookkeeping: day t is predictable when the windowSize preceding rows
/// exist and the run of calendar days through t is gap-free.
std::vector<std::size_t> verificationIndices(const StationSeries& series, int windowSize);

/// Rolling train-then-predict over one station: for every predictable day,
/// fit on the preceding window and apply the link to that day's ensemble.
std::vector<RollingRecord> rollingForecast(const StationSeries& series, Family family,
                                           const RollingOptions& options = {});

/// Same, addressing the station by name within a dataset.
std::vector<RollingRecord> rollingForecast(const ForecastDataset& dataset,
                                           const std::string& station, Family family,
                                           const RollingOptions& options = {});

}  // namespace chi0emos

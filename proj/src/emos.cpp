#include "chi0emos/emos.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "chi0emos/scoring.hpp"

namespace chi0emos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSigmaFloor = 1e-8;
constexpr double kMeanFloor = 1e-8;

// Euler-Mascheroni constant (Gumbel mean offset).
constexpr double kEulerGamma = 0.5772156649015329;
// sqrt(6)/pi (Gumbel sd-to-scale factor).
constexpr double kGumbelScaleFactor = 0.7796968012336293;

bool feasibleExtra(Family family, double extra) {
  switch (family) {
    case Family::chi0: return true;
    case Family::csg0: return std::isfinite(extra) && extra >= 0.0;
    case Family::gev0: return std::isfinite(extra) && extra >= 0.0 && extra < 0.5;
  }
  return false;
}

std::pair<double, double> linkedMeanSd(const EmosCoefficients& coeffs,
                                       const EnsembleForecast& forecast) {
  const double mean = coeffs.a * coeffs.a + coeffs.b * coeffs.b * forecast.mean();
  const double sd = coeffs.c * coeffs.c + coeffs.d * coeffs.d * forecast.sd();
  return {mean, sd};
}

}  // namespace

EnsembleForecast::EnsembleForecast(Eigen::ArrayXd members) : members_(std::move(members)) {
  const Eigen::Index m = members_.size();
  if (m < 1) throw std::invalid_argument("EnsembleForecast: needs at least one member");
  for (Eigen::Index i = 0; i < m; ++i)
    if (!std::isfinite(members_[i]) || members_[i] < 0.0)
      throw std::invalid_argument("EnsembleForecast: members must be finite and >= 0");
  mean_ = members_.mean();
  sd_ = m > 1 ? std::sqrt((members_ - mean_).square().sum() / static_cast<double>(m - 1))
              : 0.0;
  allZero_ = (members_ == 0.0).all();
  if (allZero_) {
    mean_ = 0.0;
    sd_ = 0.0;
  }
}

EmosCoefficients EmosCoefficients::startingValues(Family family) {
  EmosCoefficients s;
  s.family = family;
  s.a = 0.5;
  s.b = s.c = s.d = 1.0;
  s.extra = family == Family::chi0 ? 0.0 : 0.1;
  return s;
}

void EmosCoefficients::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d))
    throw std::invalid_argument("EmosCoefficients: a,b,c,d must be finite");
  if (!feasibleExtra(family, extra))
    throw std::invalid_argument("EmosCoefficients: extra parameter outside the family range");
}

Eigen::VectorXd EmosCoefficients::toVector(bool constantLink) const {
  const bool hasExtra = family != Family::chi0;
  Eigen::VectorXd v((constantLink ? 2 : 4) + (hasExtra ? 1 : 0));
  if (constantLink) {
    v[0] = a;
    v[1] = c;
  } else {
    v[0] = a;
    v[1] = b;
    v[2] = c;
    v[3] = d;
  }
  if (hasExtra) v[v.size() - 1] = extra;
  return v;
}

EmosCoefficients EmosCoefficients::fromVector(Family family, const Eigen::VectorXd& v,
                                              bool constantLink) {
  const bool hasExtra = family != Family::chi0;
  const Eigen::Index expected = (constantLink ? 2 : 4) + (hasExtra ? 1 : 0);
  if (v.size() != expected)
    throw std::invalid_argument("EmosCoefficients::fromVector: wrong vector length");
  EmosCoefficients out;
  out.family = family;
  if (constantLink) {
    out.a = v[0];
    out.b = 0.0;
    out.c = v[1];
    out.d = 0.0;
  } else {
    out.a = v[0];
    out.b = v[1];
    out.c = v[2];
    out.d = v[3];
  }
  out.extra = hasExtra ? v[v.size() - 1] : 0.0;
  return out;
}

void TrainingWindow::validate() const {
  if (cases.empty()) throw std::invalid_argument("TrainingWindow: empty window");
  for (const auto& [forecast, obs] : cases)
    if (!std::isfinite(obs) || obs < 0.0)
      throw std::invalid_argument("TrainingWindow: observations must be finite and >= 0");
}

Chi0Params linkChi0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast) {
  if (coeffs.family != Family::chi0)
    throw std::invalid_argument("linkChi0: coefficients are not Chi0-family");
  const auto [lambda, sigma] = linkedMeanSd(coeffs, forecast);
  return {lambda, std::max(sigma, kSigmaFloor)};
}

Csg0Params linkCsg0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast) {
  if (coeffs.family != Family::csg0)
    throw std::invalid_argument("linkCsg0: coefficients are not Csg0-family");
  auto [mean, sd] = linkedMeanSd(coeffs, forecast);
  sd = std::max(sd, kSigmaFloor);
  if (!(mean > 0.0)) throw std::domain_error("linkCsg0: nonpositive target mean");
  mean = std::max(mean, kMeanFloor);
  return {mean * mean / (sd * sd), sd * sd / mean, coeffs.extra};
}

Gev0Params linkGev0(const EmosCoefficients& coeffs, const EnsembleForecast& forecast) {
  if (coeffs.family != Family::gev0)
    throw std::invalid_argument("linkGev0: coefficients are not Gev0-family");
  auto [mean, sd] = linkedMeanSd(coeffs, forecast);
  sd = std::max(sd, kSigmaFloor);
  if (!(mean > 0.0)) throw std::domain_error("linkGev0: nonpositive target mean");
  mean = std::max(mean, kMeanFloor);
  const double xi = coeffs.extra;
  if (xi < 1e-6) {
    const double scale = sd * kGumbelScaleFactor;
    return {mean - kEulerGamma * scale, scale, xi};
  }
  const double g1 = std::tgamma(1.0 - xi);
  const double g2 = std::tgamma(1.0 - 2.0 * xi);
  const double scale = sd * xi / std::sqrt(g2 - g1 * g1);
  return {mean - scale * (g1 - 1.0) / xi, scale, xi};
}

PredictiveDistribution linkDistribution(const EmosCoefficients& coeffs,
                                        const EnsembleForecast& forecast) {
  switch (coeffs.family) {
    case Family::chi0: return PredictiveDistribution(linkChi0(coeffs, forecast));
    case Family::csg0: return PredictiveDistribution(linkCsg0(coeffs, forecast));
    case Family::gev0: return PredictiveDistribution(linkGev0(coeffs, forecast));
  }
  throw std::logic_error("linkDistribution: unknown family");
}

double meanCrpsObjective(const Eigen::VectorXd& coeffVector, const TrainingWindow& window,
                         Family family, const QuadratureSpec& spec, bool constantLink,
                         int* quadratureFailures) {
  window.validate();
  for (Eigen::Index i = 0; i < coeffVector.size(); ++i)
    if (!std::isfinite(coeffVector[i])) return kInf;

  const EmosCoefficients coeffs =
      EmosCoefficients::fromVector(family, coeffVector, constantLink);
  if (!feasibleExtra(family, coeffs.extra)) return kInf;

  double sum = 0.0;
  for (const auto& [forecast, obs] : window.cases) {
    try {
      sum += crpsDistribution(linkDistribution(coeffs, forecast), obs, spec);
    } catch (const QuadratureFailure&) {
      if (quadratureFailures) ++*quadratureFailures;
      return kInf;
    } catch (const std::domain_error&) {
      return kInf;  // infeasible link (e.g. zero target mean)
    } catch (const std::invalid_argument&) {
      return kInf;  // parameters outside the family domain
    }
  }
  return sum / static_cast<double>(window.cases.size());
}

TrainResult trainWindow(const TrainingWindow& window, Family family,
                        const EmosCoefficients& start, const TrainOptions& options) {
  window.validate();
  start.validate();
  if (start.family != family)
    throw std::invalid_argument("trainWindow: start coefficients for a different family");

  TrainResult result;
  int quadratureFailures = 0;
  auto objective = [&](const Eigen::VectorXd& v) {
    return meanCrpsObjective(v, window, family, options.quadrature, options.constantLink,
                             &quadratureFailures);
  };

  const Eigen::VectorXd startVec = start.toVector(options.constantLink);
  result.diagnostics.startObjective = objective(startVec);

  const MinimizeResult fit = minimize(objective, startVec, options.simplex);
  result.coefficients = EmosCoefficients::fromVector(family, fit.argmin, options.constantLink);
  result.diagnostics.converged = fit.converged;
  result.diagnostics.evals = fit.evals;
  result.diagnostics.finalObjective = fit.value;
  result.diagnostics.quadratureFailures = quadratureFailures;
  return result;
}

std::vector<std::size_t> verificationIndices(const StationSeries& series, int windowSize) {
  if (windowSize < 1) throw std::invalid_argument("verificationIndices: windowSize must be >= 1");
  std::vector<std::size_t> out;
  // length of the gap-free run of consecutive calendar days ending at t
  std::size_t runLength = 0;
  for (std::size_t t = 0; t < series.rows.size(); ++t) {
    if (t == 0 || series.rows[t].day - series.rows[t - 1].day != 1)
      runLength = 1;
    else
      ++runLength;
    if (runLength >= static_cast<std::size_t>(windowSize) + 1) out.push_back(t);
  }
  return out;
}

std::vector<RollingRecord> rollingForecast(const StationSeries& series, Family family,
                                           const RollingOptions& options) {
  if (series.rows.size() < static_cast<std::size_t>(options.windowSize) + 1)
    throw std::invalid_argument("rollingForecast: series shorter than windowSize + 1");

  const std::vector<std::size_t> targets = verificationIndices(series, options.windowSize);

  std::vector<RollingRecord> records;
  records.reserve(targets.size());
  EmosCoefficients start = EmosCoefficients::startingValues(family);

  for (std::size_t t : targets) {
    TrainingWindow window;
    window.cases.reserve(static_cast<std::size_t>(options.windowSize));
    for (std::size_t i = t - static_cast<std::size_t>(options.windowSize); i < t; ++i)
      window.cases.emplace_back(EnsembleForecast(series.rows[i].members),
                                series.rows[i].observation);

    const TrainResult fit = trainWindow(window, family, start, options.train);
    if (options.warmStart) start = fit.coefficients;

    EnsembleForecast forecast(series.rows[t].members);
    records.push_back({series.rows[t].day, series.rows[t].observation, forecast,
                       linkDistribution(fit.coefficients, forecast), fit.coefficients,
                       fit.diagnostics});
  }
  return records;
}

std::vector<RollingRecord> rollingForecast(const ForecastDataset& dataset,
                                           const std::string& station, Family family,
                                           const RollingOptions& options) {
  const StationSeries* series = dataset.find(station);
  if (!series)
    throw std::invalid_argument("rollingForecast: no station named '" + station + "'");
  return rollingForecast(*series, family, options);
}

}  // namespace chi0emos

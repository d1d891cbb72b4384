#include "chi0emos/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chi0emos/numerics.hpp"
#include "chi0emos/special_functions.hpp"

namespace chi0emos {

namespace {

void requireNonNegative(double x, const char* where) {
  if (!(x >= 0.0)) throw std::domain_error(std::string(where) + ": requires x >= 0");
}

// Terms kept in the Poisson mixture: mean + 40 sd of Poisson(lambda/2)
// plus slack; the Poisson tail beyond this is far below 1e-14.
int chi0SeriesCap(double halfLambda) {
  return static_cast<int>(halfLambda + 40.0 * std::sqrt(halfLambda + 1.0) + 100.0);
}

// exp() underflows past ~745; switch the series to per-term log weights there.
constexpr double kLogSpaceThreshold = 700.0;

double gumbelCdf(double x, double location, double scale) {
  return std::exp(-std::exp(-(x - location) / scale));
}

// Uncensored GEV CDF over the whole real line.
double gevCdfUncensored(double x, const Gev0Params& p) {
  if (p.shape < 1e-12) return gumbelCdf(x, p.location, p.scale);
  const double t = 1.0 + p.shape * (x - p.location) / p.scale;
  if (t <= 0.0) return 0.0;  // below the lower endpoint (shape > 0)
  return std::exp(-std::exp(-std::log1p(p.shape * (x - p.location) / p.scale) / p.shape));
}

double gevQuantileUncensored(double p, const Gev0Params& params) {
  if (params.shape < 1e-12)
    return params.location - params.scale * std::log(-std::log(p));
  return params.location +
         params.scale * std::expm1(-params.shape * std::log(-std::log(p))) / params.shape;
}

// Shared bracket-and-bisect quantile for CDFs with an atom at zero.
double quantileAboveAtom(double p, double atom, double scaleGuess,
                         const std::function<double(double)>& cdf, const char* where) {
  if (!(p >= 0.0) || !(p < 1.0))
    throw std::domain_error(std::string(where) + ": requires p in [0, 1)");
  if (p <= atom) return 0.0;

  double hi = std::max(scaleGuess, 1e-12);
  int doublings = 0;
  while (cdf(hi) < p) {
    hi *= 2.0;
    if (++doublings > 400)
      throw std::runtime_error(std::string(where) + ": failed to bracket the quantile");
  }
  return findRoot([&cdf, p](double x) { return cdf(x) - p; }, 0.0, hi, 1e-10);
}

Moments momentsBySurvivalQuadrature(const PredictiveDistribution& dist) {
  // mean = int_0^inf (1-F), E[X^2] = 2 int_0^inf x (1-F), truncated where the
  // survival function falls below 1e-12.  The discarded tail scales like
  // eps^(1-2 xi) for a GEV tail index xi, so variance accuracy degrades as
  // xi approaches 0.5; fine over the fitted range (links keep xi below 0.5).
  QuadratureSpec spec;
  spec.absTol = 1e-10;
  spec.relTol = 1e-9;
  const double upper = std::max(dist.quantile(1.0 - 1e-12), 1e-12);
  auto survival = [&dist](double x) { return 1.0 - dist.cdf(x); };
  const QuadratureResult m1 = integrate(survival, 0.0, upper, spec);
  const QuadratureResult m2 =
      integrate([&survival](double x) { return 2.0 * x * survival(x); }, 0.0, upper, spec);
  if (!m1.converged || !m2.converged)
    throw QuadratureFailure("moments: survival-function quadrature did not converge",
                            m1.converged ? m2 : m1);
  const double mean = m1.value;
  return {mean, std::max(0.0, m2.value - mean * mean)};
}

}  // namespace

Chi0Params::Chi0Params(double lambda_, double sigma_) : lambda(lambda_), sigma(sigma_) {
  if (!std::isfinite(lambda) || !(lambda >= 0.0))
    throw std::invalid_argument("Chi0Params: lambda must be finite and >= 0");
  if (!std::isfinite(sigma) || !(sigma > 0.0))
    throw std::invalid_argument("Chi0Params: sigma must be finite and > 0");
}

Csg0Params::Csg0Params(double shape_, double scale_, double shift_)
    : shape(shape_), scale(scale_), shift(shift_) {
  if (!std::isfinite(shape) || !(shape > 0.0))
    throw std::invalid_argument("Csg0Params: shape must be finite and > 0");
  if (!std::isfinite(scale) || !(scale > 0.0))
    throw std::invalid_argument("Csg0Params: scale must be finite and > 0");
  if (!std::isfinite(shift) || !(shift >= 0.0))
    throw std::invalid_argument("Csg0Params: shift must be finite and >= 0");
}

Gev0Params::Gev0Params(double location_, double scale_, double shape_)
    : location(location_), scale(scale_), shape(shape_) {
  if (!std::isfinite(location))
    throw std::invalid_argument("Gev0Params: location must be finite");
  if (!std::isfinite(scale) || !(scale > 0.0))
    throw std::invalid_argument("Gev0Params: scale must be finite and > 0");
  if (!std::isfinite(shape) || !(shape >= 0.0) || !(shape < 0.5))
    throw std::invalid_argument("Gev0Params: shape must lie in [0, 0.5)");
}

double chi0Cdf(double x, const Chi0Params& params) {
  requireNonNegative(x, "chi0Cdf");
  const double halfLambda = 0.5 * params.lambda;
  const double zHalf = 0.5 * x / params.sigma;

  if (halfLambda == 0.0) return 1.0;

  const int cap = chi0SeriesCap(halfLambda);
  const bool logSpace = halfLambda > kLogSpaceThreshold || zHalf > kLogSpaceThreshold;
  const double logHalfLambda = logSpace ? std::log(halfLambda) : 0.0;
  const double logZHalf = (logSpace && zHalf > 0.0) ? std::log(zHalf) : 0.0;

  // j = 0: Poisson weight times F(.; 0) == 1 — the point mass term.
  double poissonWeight = std::exp(-halfLambda);
  double logPoissonWeight = -halfLambda;
  double cumulativeWeight = poissonWeight;
  double sum = poissonWeight;

  // Erlang complement of the central chi^2(2j) CDF at z = x/sigma:
  // F(z; 2j) = 1 - sum_{i<j} t_i with t_i = e^{-z/2} (z/2)^i / i!.
  double erlangTerm = std::exp(-zHalf);   // t_0
  double logErlangTerm = -zHalf;
  double erlangComplement = 0.0;          // sum_{i<j} t_i

  for (int j = 1; j <= cap; ++j) {
    erlangComplement += erlangTerm;
    if (logSpace) {
      logErlangTerm += (zHalf > 0.0 ? logZHalf : -std::numeric_limits<double>::infinity()) -
                       std::log(static_cast<double>(j));
      erlangTerm = std::exp(logErlangTerm);
      logPoissonWeight += logHalfLambda - std::log(static_cast<double>(j));
      poissonWeight = std::exp(logPoissonWeight);
    } else {
      erlangTerm *= zHalf / j;
      poissonWeight *= halfLambda / j;
    }
    cumulativeWeight += poissonWeight;
    const double centralCdf = 1.0 - erlangComplement;
    if (centralCdf > 0.0) sum += poissonWeight * centralCdf;
    if (cumulativeWeight > 1.0 - 1e-14) break;
  }
  return std::min(sum, 1.0);
}

double chi0Density(double x, const Chi0Params& params) {
  requireNonNegative(x, "chi0Density");
  if (x == 0.0)
    throw std::domain_error("chi0Density: x = 0 carries the atom, not a density");
  const double halfLambda = 0.5 * params.lambda;
  if (halfLambda == 0.0) return 0.0;
  const double zHalf = 0.5 * x / params.sigma;

  // f0(z) = (1/2) e^{-z/2} sum_{j>=1} p(j) (z/2)^{j-1} / (j-1)!, scaled by 1/sigma.
  const int cap = chi0SeriesCap(halfLambda);
  if (halfLambda > kLogSpaceThreshold || zHalf > kLogSpaceThreshold) {
    const double logZHalf = std::log(zHalf);
    const double logHalfLambda = std::log(halfLambda);
    double sum = 0.0;
    for (int j = 1; j <= cap; ++j) {
      const double logTerm = -halfLambda + j * logHalfLambda - std::lgamma(j + 1.0) - zHalf +
                             (j - 1.0) * logZHalf - std::lgamma(static_cast<double>(j));
      sum += std::exp(logTerm);
    }
    return 0.5 * sum / params.sigma;
  }
  double poissonWeight = std::exp(-halfLambda);
  double cumulativeWeight = poissonWeight;
  double erlangFactor = 1.0;  // (z/2)^{j-1} / (j-1)! at j = 1
  double sum = 0.0;
  for (int j = 1; j <= cap; ++j) {
    poissonWeight *= halfLambda / j;
    cumulativeWeight += poissonWeight;
    sum += poissonWeight * erlangFactor;
    erlangFactor *= zHalf / j;
    if (cumulativeWeight > 1.0 - 1e-14) break;
  }
  return 0.5 * std::exp(-zHalf) * sum / params.sigma;
}

double chi0Quantile(double p, const Chi0Params& params) {
  const double atom = std::exp(-0.5 * params.lambda);
  const double spread = params.sigma * (params.lambda + 10.0 * std::sqrt(params.lambda) + 10.0);
  return quantileAboveAtom(
      p, atom, spread, [&params](double x) { return chi0Cdf(x, params); }, "chi0Quantile");
}

Eigen::ArrayXd chi0Sample(const Chi0Params& params, Rng& rng, Eigen::Index n) {
  if (n < 0) throw std::invalid_argument("chi0Sample: n must be >= 0");
  Eigen::ArrayXd out(n);
  if (params.lambda == 0.0) {
    out.setZero();
    return out;
  }
  std::poisson_distribution<long> poisson(0.5 * params.lambda);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long j = poisson(rng);
    if (j == 0) {
      out[i] = 0.0;
    } else {
      std::gamma_distribution<double> chi2(static_cast<double>(j), 2.0);  // chi^2 with 2j df
      out[i] = params.sigma * chi2(rng);
    }
  }
  return out;
}

Moments chi0Moments(const Chi0Params& params) {
  return {params.sigma * params.lambda, 4.0 * params.sigma * params.sigma * params.lambda};
}

double csg0Cdf(double x, const Csg0Params& params) {
  requireNonNegative(x, "csg0Cdf");
  return regularizedGammaP(params.shape, (x + params.shift) / params.scale);
}

double csg0Density(double x, const Csg0Params& params) {
  requireNonNegative(x, "csg0Density");
  if (x == 0.0)
    throw std::domain_error("csg0Density: x = 0 carries the atom, not a density");
  return gammaDensity(x + params.shift, params.shape, params.scale);
}

double csg0Quantile(double p, const Csg0Params& params) {
  const double atom = csg0Cdf(0.0, params);
  const double spread =
      params.scale * (params.shape + 10.0 * std::sqrt(params.shape) + 10.0);
  return quantileAboveAtom(
      p, atom, spread, [&params](double x) { return csg0Cdf(x, params); }, "csg0Quantile");
}

Eigen::ArrayXd csg0Sample(const Csg0Params& params, Rng& rng, Eigen::Index n) {
  if (n < 0) throw std::invalid_argument("csg0Sample: n must be >= 0");
  std::gamma_distribution<double> gamma(params.shape, params.scale);
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(0.0, gamma(rng) - params.shift);
  return out;
}

double gev0Cdf(double x, const Gev0Params& params) {
  requireNonNegative(x, "gev0Cdf");
  return gevCdfUncensored(x, params);
}

double gev0Density(double x, const Gev0Params& params) {
  requireNonNegative(x, "gev0Density");
  if (x == 0.0)
    throw std::domain_error("gev0Density: x = 0 carries the atom, not a density");
  const double z = (x - params.location) / params.scale;
  if (params.shape < 1e-12) {
    return std::exp(-z - std::exp(-z)) / params.scale;
  }
  const double t = 1.0 + params.shape * z;
  if (t <= 0.0) return 0.0;
  const double logT = std::log1p(params.shape * z);
  const double w = std::exp(-logT / params.shape);  // (1 + xi z)^{-1/xi}
  return w * std::exp(-w) / (params.scale * t);
}

double gev0Quantile(double p, const Gev0Params& params) {
  if (!(p >= 0.0) || !(p < 1.0))
    throw std::domain_error("gev0Quantile: requires p in [0, 1)");
  const double atom = gev0Cdf(0.0, params);
  if (p <= atom) return 0.0;
  return gevQuantileUncensored(p, params);
}

Eigen::ArrayXd gev0Sample(const Gev0Params& params, Rng& rng, Eigen::Index n) {
  if (n < 0) throw std::invalid_argument("gev0Sample: n must be >= 0");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = unif(rng);
    if (u <= 0.0) {
      // lower endpoint: mu - s/xi for xi > 0, -inf for the Gumbel case
      out[i] = params.shape > 0.0
                   ? std::max(0.0, params.location - params.scale / params.shape)
                   : 0.0;
    } else {
      out[i] = std::max(0.0, gevQuantileUncensored(u, params));
    }
  }
  return out;
}

std::string_view familyName(Family family) {
  switch (family) {
    case Family::chi0: return "chi0";
    case Family::csg0: return "csg0";
    case Family::gev0: return "gev0";
  }
  throw std::logic_error("familyName: unknown family");
}

Family familyFromName(std::string_view name) {
  if (name == "chi0") return Family::chi0;
  if (name == "csg0") return Family::csg0;
  if (name == "gev0") return Family::gev0;
  throw std::invalid_argument("unknown family name: " + std::string(name));
}

Family PredictiveDistribution::family() const {
  if (chi0()) return Family::chi0;
  if (csg0()) return Family::csg0;
  return Family::gev0;
}

double PredictiveDistribution::cdf(double x) const {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Chi0Params>) return chi0Cdf(x, p);
        else if constexpr (std::is_same_v<T, Csg0Params>) return csg0Cdf(x, p);
        else return gev0Cdf(x, p);
      },
      params_);
}

double PredictiveDistribution::density(double x) const {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Chi0Params>) return chi0Density(x, p);
        else if constexpr (std::is_same_v<T, Csg0Params>) return csg0Density(x, p);
        else return gev0Density(x, p);
      },
      params_);
}

double PredictiveDistribution::quantile(double p) const {
  return std::visit(
      [p](const auto& par) -> double {
        using T = std::decay_t<decltype(par)>;
        if constexpr (std::is_same_v<T, Chi0Params>) return chi0Quantile(p, par);
        else if constexpr (std::is_same_v<T, Csg0Params>) return csg0Quantile(p, par);
        else return gev0Quantile(p, par);
      },
      params_);
}

Eigen::ArrayXd PredictiveDistribution::sample(Rng& rng, Eigen::Index n) const {
  return std::visit(
      [&rng, n](const auto& p) -> Eigen::ArrayXd {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Chi0Params>) return chi0Sample(p, rng, n);
        else if constexpr (std::is_same_v<T, Csg0Params>) return csg0Sample(p, rng, n);
        else return gev0Sample(p, rng, n);
      },
      params_);
}

Moments PredictiveDistribution::moments() const {
  if (const Chi0Params* p = chi0()) return chi0Moments(*p);
  return momentsBySurvivalQuadrature(*this);
}

}  // namespace chi0emos

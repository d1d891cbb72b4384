#pragma once

#include <Eigen/Core>

#include <random>
#include <string_view>
#include <variant>

namespace chi0emos {

using Rng = std::mt19937_64;

/// Scaled zero-degree-of-freedom non-central chi-squared distribution:
/// a Poisson(lambda/2) mixture of a point mass at 0 and central
/// chi-squared laws with 2, 4, ... degrees of freedom, stretched by the
/// scale sigma.  The mass at exactly 0 is exp(-lambda/2); no censoring
/// is involved.  lambda = 0 degenerates to a point mass at 0.
struct Chi0Params {
  double lambda;  // non-centrality, >= 0
  double sigma;   // scale in forecast units (mm), > 0

  Chi0Params(double lambda, double sigma);
};

/// Censored shifted gamma: G - shift with G ~ Gamma(shape, scale),
/// all mass below 0 collapsed onto an atom at 0.
struct Csg0Params {
  double shape;  // gamma shape k > 0
  double scale;  // gamma scale theta > 0 (mm)
  double shift;  // left shift delta >= 0 (mm) applied before censoring

  Csg0Params(double shape, double scale, double shift);
};

/// Generalized extreme value distribution left-censored at 0.  The shape
/// is restricted to [0, 0.5) so mean and CRPS stay finite.
struct Gev0Params {
  double location;  // mu (mm)
  double scale;     // > 0 (mm)
  double shape;     // xi in [0, 0.5)

  Gev0Params(double location, double scale, double shape);
};

struct Moments {
  double mean;
  double variance;
};

// --- scaled chi^2_0 --------------------------------------------------------

/// CDF at x >= 0, evaluated as the Poisson-weighted series of central
/// chi-squared CDFs with even df (closed-form Erlang terms), truncated
/// once the cumulative Poisson weight exceeds 1 - 1e-14.
double chi0Cdf(double x, const Chi0Params& params);

/// Density of the continuous part at x > 0 (the atom at 0 is excluded).
double chi0Density(double x, const Chi0Params& params);

/// Quantile for p in [0, 1): 0 for p <= exp(-lambda/2), otherwise the
/// unique positive root of the CDF, bracketed and bisected.  p = 1 is
/// rejected (unbounded support).
double chi0Quantile(double p, const Chi0Params& params);

/// Compound-Poisson draws: J ~ Poisson(lambda/2), 0 when J = 0, else
/// sigma times a central chi-squared variate with 2J df.
Eigen::ArrayXd chi0Sample(const Chi0Params& params, Rng& rng, Eigen::Index n);

/// Exact (sigma*lambda, 4*sigma^2*lambda).
Moments chi0Moments(const Chi0Params& params);

// --- censored benchmarks ---------------------------------------------------

double csg0Cdf(double x, const Csg0Params& params);
double csg0Density(double x, const Csg0Params& params);
double csg0Quantile(double p, const Csg0Params& params);
Eigen::ArrayXd csg0Sample(const Csg0Params& params, Rng& rng, Eigen::Index n);

double gev0Cdf(double x, const Gev0Params& params);
double gev0Density(double x, const Gev0Params& params);
double gev0Quantile(double p, const Gev0Params& params);
Eigen::ArrayXd gev0Sample(const Gev0Params& params, Rng& rng, Eigen::Index n);

// --- unified predictive distribution ---------------------------------------

enum class Family { chi0, csg0, gev0 };

std::string_view familyName(Family family);
Family familyFromName(std::string_view name);

/// Immutable value type over the three parameter records; the object the
/// scoring and verification layers consume.
class PredictiveDistribution {
 public:
  explicit PredictiveDistribution(const Chi0Params& p) : params_(p) {}
  explicit PredictiveDistribution(const Csg0Params& p) : params_(p) {}
  explicit PredictiveDistribution(const Gev0Params& p) : params_(p) {}

  Family family() const;

  double cdf(double x) const;
  double density(double x) const;
  double quantile(double p) const;
  double pointMassAtZero() const { return cdf(0.0); }
  Eigen::ArrayXd sample(Rng& rng, Eigen::Index n) const;

  /// Chi0: exact per the scaled-moment identities; benchmarks: quadrature
  /// of the survival function.
  Moments moments() const;

  const Chi0Params* chi0() const { return std::get_if<Chi0Params>(&params_); }
  const Csg0Params* csg0() const { return std::get_if<Csg0Params>(&params_); }
  const Gev0Params* gev0() const { return std::get_if<Gev0Params>(&params_); }

 private:
  std::variant<Chi0Params, Csg0Params, Gev0Params> params_;
};

inline double pointMassAtZero(const PredictiveDistribution& dist) {
  return dist.pointMassAtZero();
}

}  // namespace chi0emos

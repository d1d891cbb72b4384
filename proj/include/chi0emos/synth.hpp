#pragma once

#include <cstdint>
#include <string>

#include "chi0emos/dataset.hpp"
#include "chi0emos/distributions.hpp"
#include "chi0emos/emos.hpp"

namespace chi0emos {

/// Synthetic precipitation-like dataset: a gamma daily signal drives a
/// tight (deliberately underdispersed) 50-member ensemble, a fraction of
/// days is exactly all-zero, and observations are drawn from the scaled
/// chi^2_0 law lambda = lambdaIntercept + lambdaSlope*fbar, sigma =
/// sigmaIntercept + sigmaSlope*s_f, so the generating model is known.
struct SynthSpec {
  int days = 200;
  int stations = 1;
  int members = 50;
  std::uint64_t seed = 1;
  std::string startDate = "2010-01-01";

  double zeroDayProb = 0.15;      // fraction of all-zero ensemble days
  double signalMean = 3.0;        // mm, mean of the daily gamma signal
  double signalShape = 6.0;       // gamma shape of the daily signal
  double memberNoiseShape = 30.0; // gamma shape of multiplicative member noise

  double lambdaIntercept = 0.25;  // a^2
  double lambdaSlope = 1.0;       // b^2
  double sigmaIntercept = 1.0;    // c^2
  double sigmaSlope = 0.5;        // d^2
};

ForecastDataset synthesizeDataset(const SynthSpec& spec);

/// The distribution the generator actually drew the observation from.
Chi0Params synthTruth(const SynthSpec& spec, const EnsembleForecast& forecast);

/// The generating coefficients as an EmosCoefficients record (Chi0).
EmosCoefficients synthTrueCoefficients(const SynthSpec& spec);

}  // namespace chi0emos

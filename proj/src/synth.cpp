#include "chi0emos/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace chi0emos {

ForecastDataset synthesizeDataset(const SynthSpec& spec) {
  if (spec.days < 1 || spec.stations < 1 || spec.members < 1)
    throw std::invalid_argument("synthesizeDataset: days, stations, members must be >= 1");
  if (!(spec.zeroDayProb >= 0.0) || !(spec.zeroDayProb < 1.0))
    throw std::invalid_argument("synthesizeDataset: zeroDayProb must lie in [0, 1)");

  const std::int64_t day0 = parseIsoDate(spec.startDate);

  ForecastDataset dataset;
  dataset.memberCount = spec.members;
  dataset.stations.reserve(static_cast<size_t>(spec.stations));

  for (int s = 0; s < spec.stations; ++s) {
    std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(s) + 1};
    Rng rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::gamma_distribution<double> signal(spec.signalShape, spec.signalMean / spec.signalShape);
    std::gamma_distribution<double> noise(spec.memberNoiseShape, 1.0 / spec.memberNoiseShape);

    StationSeries series;
    series.station = spec.stations == 1 ? "synthetic" : "synthetic" + std::to_string(s + 1);
    series.rows.reserve(static_cast<size_t>(spec.days));

    for (int t = 0; t < spec.days; ++t) {
      StationSeries::Row row;
      row.day = day0 + t;
      row.members.resize(spec.members);
      if (unif(rng) < spec.zeroDayProb) {
        row.members.setZero();
      } else {
        const double level = signal(rng);
        for (int k = 0; k < spec.members; ++k) row.members[k] = level * noise(rng);
      }
      const Chi0Params truth = synthTruth(spec, EnsembleForecast(row.members));
      row.observation = chi0Sample(truth, rng, 1)[0];
      series.rows.push_back(std::move(row));
    }
    dataset.stations.push_back(std::move(series));
  }
  return dataset;
}

Chi0Params synthTruth(const SynthSpec& spec, const EnsembleForecast& forecast) {
  return {spec.lambdaIntercept + spec.lambdaSlope * forecast.mean(),
          spec.sigmaIntercept + spec.sigmaSlope * forecast.sd()};
}

EmosCoefficients synthTrueCoefficients(const SynthSpec& spec) {
  EmosCoefficients truth;
  truth.family = Family::chi0;
  truth.a = std::sqrt(spec.lambdaIntercept);
  truth.b = std::sqrt(spec.lambdaSlope);
  truth.c = std::sqrt(spec.sigmaIntercept);
  truth.d = std::sqrt(spec.sigmaSlope);
  return truth;
}

}  // namespace chi0emos

#include "chi0emos/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chi0emos {

ScoreReport makeScoreReport(std::vector<ScoreReport::Case> cases) {
  if (cases.empty()) throw std::invalid_argument("makeScoreReport: empty case list");
  ScoreReport report;
  report.perCase = std::move(cases);
  report.count = report.perCase.size();
  double sum = 0.0;
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& c : report.perCase) {
    sum += c.score;
    mx = std::max(mx, c.score);
  }
  report.mean = sum / static_cast<double>(report.count);
  report.max = mx;
  return report;
}

double crpsDistribution(const PredictiveDistribution& dist, double y,
                        const QuadratureSpec& spec) {
  if (!(y >= 0.0)) throw std::domain_error("crpsDistribution: requires y >= 0");
  spec.validate();

  auto cdf = [&dist](double x) { return dist.cdf(x); };

  double value = 0.0;
  double errorEstimate = 0.0;

  if (y > 0.0) {
    const QuadratureResult below = integrate(
        [&cdf](double x) {
          const double F = cdf(x);
          return F * F;
        },
        0.0, y, spec);
    if (!below.converged)
      throw QuadratureFailure("crpsDistribution: lower integral did not converge", below);
    value += below.value;
    errorEstimate += below.errorEstimate;
  }

  const double tailCut = spec.tailCutoffProbability;
  const double upper = dist.quantile(1.0 - tailCut);
  if (upper > y) {
    const QuadratureResult above = integrate(
        [&cdf](double x) {
          const double s = 1.0 - cdf(x);
          return s * s;
        },
        y, upper, spec);
    if (!above.converged)
      throw QuadratureFailure("crpsDistribution: upper integral did not converge", above);
    value += above.value;
    errorEstimate += above.errorEstimate;
  }
  // truncated tail: bounded by tailCut^2 * max(upper, 1) for every family in
  // scope; charged to the error estimate, not the value
  errorEstimate += tailCut * tailCut * std::max(upper, 1.0);

  if (errorEstimate > 1e-6) {
    QuadratureResult best;
    best.value = value;
    best.errorEstimate = errorEstimate;
    throw QuadratureFailure("crpsDistribution: error estimate above 1e-6", best);
  }
  return value;
}

double crpsEnsemble(const Eigen::ArrayXd& members, double y) {
  const Eigen::Index m = members.size();
  if (m < 1) throw std::invalid_argument("crpsEnsemble: empty member list");

  const double meanAbsError = (members - y).abs().mean();

  // sum_{i,j} |f_i - f_j| = 2 sum_k f_(k) (2k - m + 1) over sorted members
  std::vector<double> sorted(members.data(), members.data() + m);
  std::sort(sorted.begin(), sorted.end());
  double pairSum = 0.0;
  for (Eigen::Index k = 0; k < m; ++k)
    pairSum += sorted[static_cast<size_t>(k)] * static_cast<double>(2 * k - m + 1);
  pairSum *= 2.0;

  return meanAbsError - pairSum / (2.0 * static_cast<double>(m) * static_cast<double>(m));
}

double brierScore(const Eigen::ArrayXd& probs, const Eigen::ArrayXd& outcomes) {
  if (probs.size() == 0) throw std::invalid_argument("brierScore: empty input");
  if (probs.size() != outcomes.size())
    throw std::invalid_argument("brierScore: probs/outcomes length mismatch");
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0) || !(probs[i] <= 1.0))
      throw std::domain_error("brierScore: probability outside [0,1]");
    if (outcomes[i] != 0.0 && outcomes[i] != 1.0)
      throw std::domain_error("brierScore: outcomes must be 0 or 1");
  }
  return (probs - outcomes).square().mean();
}

double eventProbability(const PredictiveDistribution& dist, double threshold) {
  if (!(threshold >= 0.0))
    throw std::domain_error("eventProbability: requires threshold >= 0");
  return 1.0 - dist.cdf(threshold);
}

double ensembleEventFrequency(const Eigen::ArrayXd& members, double threshold) {
  if (members.size() == 0)
    throw std::invalid_argument("ensembleEventFrequency: empty member list");
  if (!(threshold >= 0.0))
    throw std::domain_error("ensembleEventFrequency: requires threshold >= 0");
  return static_cast<double>((members > threshold).count()) /
         static_cast<double>(members.size());
}

IsotonicFit pavIsotonic(const Eigen::ArrayXd& probs, const Eigen::ArrayXd& outcomes) {
  const Eigen::Index n = probs.size();
  if (n == 0) throw std::invalid_argument("pavIsotonic: empty input");
  if (outcomes.size() != n)
    throw std::invalid_argument("pavIsotonic: probs/outcomes length mismatch");

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&probs](Eigen::Index a, Eigen::Index b) { return probs[a] < probs[b]; });

  // blocks over x-sorted input; tied forecast values pooled up front so the
  // fit is a function of the forecast probability
  struct Block {
    double probLo, probHi, sum;
    Eigen::Index count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<size_t>(n));
  for (size_t r = 0; r < order.size();) {
    size_t s = r;
    double sum = 0.0;
    while (s < order.size() && probs[order[s]] == probs[order[r]]) {
      sum += outcomes[order[s]];
      ++s;
    }
    blocks.push_back({probs[order[r]], probs[order[r]], sum,
                      static_cast<Eigen::Index>(s - r)});
    r = s;
  }

  // pool adjacent violators
  std::vector<Block> stack;
  stack.reserve(blocks.size());
  for (const Block& b : blocks) {
    stack.push_back(b);
    while (stack.size() >= 2 && stack[stack.size() - 1].mean() < stack[stack.size() - 2].mean()) {
      Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      prev.probHi = top.probHi;
      prev.sum += top.sum;
      prev.count += top.count;
    }
  }

  IsotonicFit fit;
  fit.fitted.resize(n);
  size_t rank = 0;
  for (const Block& b : stack) {
    for (Eigen::Index k = 0; k < b.count; ++k, ++rank) fit.fitted[order[rank]] = b.mean();
  }

  // merge equal-valued neighbours into maximal constant segments
  for (const Block& b : stack) {
    if (!fit.segments.empty() && fit.segments.back().cep == b.mean()) {
      fit.segments.back().probHi = b.probHi;
      fit.segments.back().count += b.count;
    } else {
      fit.segments.push_back({b.probLo, b.probHi, b.mean(), b.count});
    }
  }
  return fit;
}

BrierDecomposition brierDecomposition(const Eigen::ArrayXd& probs,
                                      const Eigen::ArrayXd& outcomes) {
  const double meanBrier = brierScore(probs, outcomes);
  const IsotonicFit fit = pavIsotonic(probs, outcomes);
  const double recalibrated = (fit.fitted - outcomes).square().mean();
  const double baseRate = outcomes.mean();
  const double baseScore = (outcomes - baseRate).square().mean();

  BrierDecomposition d;
  d.meanBrier = meanBrier;
  d.mcb = meanBrier - recalibrated;
  d.dsc = baseScore - recalibrated;  // constant base rate is itself isotonic, so dsc >= 0
  d.unc = baseRate * (1.0 - baseRate);
  return d;
}

}  // namespace chi0emos

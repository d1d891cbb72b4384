#include "chi0emos/verification.hpp"

#include <cmath>
#include <stdexcept>

namespace chi0emos {

PitValue pit(const PredictiveDistribution& dist, double y, Rng& rng) {
  if (!(y >= 0.0)) throw std::domain_error("pit: requires y >= 0");
  if (y > 0.0) return {dist.cdf(y), false};
  // draw from (0, CDF(0)]: u ~ U[0,1) mapped to cdf0*(1-u), so 0 is excluded
  const double cdf0 = dist.cdf(0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return {cdf0 * (1.0 - unif(rng)), true};
}

int verificationRank(const Eigen::ArrayXd& members, double y, Rng& rng, RankTieMode tieMode) {
  const Eigen::Index m = members.size();
  if (m < 1) throw std::invalid_argument("verificationRank: empty member list");
  const int below = static_cast<int>((members < y).count());
  const int ties = static_cast<int>((members == y).count());
  if (ties == 0) return 1 + below;
  if (tieMode == RankTieMode::midRank) return 1 + below + ties / 2;
  std::uniform_int_distribution<int> offset(0, ties);
  return 1 + below + offset(rng);
}

Eigen::ArrayXi histogram(const std::vector<double>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
  Eigen::ArrayXi counts = Eigen::ArrayXi::Zero(bins);
  for (double v : values) {
    if (!(v >= 0.0) || !(v <= 1.0))
      throw std::domain_error("histogram: value outside [0,1]");
    // right-closed bins (i/bins, (i+1)/bins]; first bin also contains 0
    int idx = v == 0.0 ? 0 : static_cast<int>(std::ceil(v * bins)) - 1;
    idx = std::min(std::max(idx, 0), bins - 1);
    ++counts[idx];
  }
  return counts;
}

RankHistogram rankHistogram(const std::vector<int>& ranks, int memberCount) {
  if (memberCount < 1) throw std::invalid_argument("rankHistogram: memberCount must be >= 1");
  RankHistogram h;
  h.counts = Eigen::ArrayXi::Zero(memberCount + 1);
  for (int r : ranks) {
    if (r < 1 || r > memberCount + 1)
      throw std::domain_error("rankHistogram: rank outside {1..m+1}");
    ++h.counts[r - 1];
    ++h.total;
  }
  return h;
}

ReliabilityDiagramData reliabilityDiagram(const Eigen::ArrayXd& probs,
                                          const Eigen::ArrayXd& outcomes) {
  const IsotonicFit fit = pavIsotonic(probs, outcomes);
  ReliabilityDiagramData data;
  data.bins = fit.segments;
  data.pairs.reserve(static_cast<size_t>(probs.size()));
  for (Eigen::Index i = 0; i < probs.size(); ++i)
    data.pairs.emplace_back(probs[i], outcomes[i]);
  return data;
}

}  // namespace chi0emos

#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "chi0emos/distributions.hpp"
#include "chi0emos/scoring.hpp"

namespace chi0emos {

/// Probability integral transform value; randomized over (0, CDF(0)]
/// when the observation sits on the atom at zero.
struct PitValue {
  double value;
  bool randomized;
};

PitValue pit(const PredictiveDistribution& dist, double y, Rng& rng);

enum class RankTieMode {
  randomUniform,  // ties broken uniformly at random
  midRank,        // deterministic middle rank for reproducible tables
};

/// Rank of the observation within the ordered ensemble, in {1..m+1}.
int verificationRank(const Eigen::ArrayXd& members, double y, Rng& rng,
                     RankTieMode tieMode = RankTieMode::randomUniform);

/// Equal-width bin counts over [0,1]; bins are right-closed, the first
/// bin additionally closed at 0.  Values outside [0,1] are an error.
Eigen::ArrayXi histogram(const std::vector<double>& values, int bins);

struct RankHistogram {
  Eigen::ArrayXi counts;  // length m+1
  long total = 0;
};

RankHistogram rankHistogram(const std::vector<int>& ranks, int memberCount);

/// CORP reliability-diagram data: the isotonic (PAV) segments plus the
/// raw forecast/outcome pairs for plotting.
struct ReliabilityDiagramData {
  std::vector<IsotonicFit::Segment> bins;
  std::vector<std::pair<double, double>> pairs;  // (forecast prob, binary outcome)
};

ReliabilityDiagramData reliabilityDiagram(const Eigen::ArrayXd& probs,
                                          const Eigen::ArrayXd& outcomes);

}  // namespace chi0emos

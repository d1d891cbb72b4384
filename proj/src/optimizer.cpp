#include "chi0emos/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace chi0emos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isnan(v) ? kInf : v; }

}  // namespace

void SimplexConfig::validate(Eigen::Index dim) const {
  if (!(contraction > 0.0 && contraction < 1.0) || !(expansion > 1.0) || !(reflection > 0.0) ||
      !(shrink > 0.0 && shrink < 1.0))
    throw std::invalid_argument("SimplexConfig: requires 0 < contraction < 1 < expansion, "
                                "reflection > 0, 0 < shrink < 1");
  if (maxEvals < dim + 1)
    throw std::invalid_argument("SimplexConfig: maxEvals must be >= dim + 1");
  if (!(xTol > 0.0) || !(fTol > 0.0))
    throw std::invalid_argument("SimplexConfig: tolerances must be positive");
  if (initialStepFractions.size() != 0 && initialStepFractions.size() != dim)
    throw std::invalid_argument("SimplexConfig: initialStepFractions size mismatch");
}

MinimizeResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                        const SimplexConfig& config) {
  const Eigen::Index dim = start.size();
  if (dim < 1) throw std::invalid_argument("minimize: dimension must be >= 1");
  config.validate(dim);

  MinimizeResult result;
  auto evaluate = [&](const Eigen::VectorXd& x) {
    ++result.evals;
    return sanitize(objective(x));
  };

  const double fStart = objective(start);
  ++result.evals;
  if (std::isnan(fStart))
    throw std::invalid_argument("minimize: objective is NaN at the start point");

  // start vertex plus one offset vertex per coordinate
  std::vector<Eigen::VectorXd> vertex(dim + 1, start);
  std::vector<double> value(dim + 1);
  value[0] = fStart;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double step = config.initialStepFractions.size() != 0
                            ? config.initialStepFractions[i]
                            : std::max(0.25 * std::abs(start[i]), 0.1);
    vertex[i + 1][i] += step;
    value[i + 1] = evaluate(vertex[i + 1]);
  }

  std::vector<Eigen::Index> order(dim + 1);
  std::iota(order.begin(), order.end(), 0);
  auto sortVertices = [&]() {
    std::stable_sort(order.begin(), order.end(),
                     [&value](Eigen::Index a, Eigen::Index b) { return value[a] < value[b]; });
  };

  for (;;) {
    sortVertices();
    const Eigen::Index best = order[0];
    const Eigen::Index worst = order[dim];
    const Eigen::Index secondWorst = order[dim - 1];

    if (config.recordTrace) result.bestTrace.push_back(value[best]);

    double diameter = 0.0;
    for (Eigen::Index i = 1; i <= dim; ++i)
      diameter = std::max(diameter, (vertex[order[i]] - vertex[best]).cwiseAbs().maxCoeff());
    const double spread = value[worst] - value[best];

    if (diameter < config.xTol || spread < config.fTol) {
      result.argmin = vertex[best];
      result.value = value[best];
      result.converged = true;
      return result;
    }
    if (result.evals >= config.maxEvals) {
      result.argmin = vertex[best];
      result.value = value[best];
      result.converged = false;
      return result;
    }

    // centroid of all vertices but the worst
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) centroid += vertex[order[i]];
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected =
        centroid + config.reflection * (centroid - vertex[worst]);
    const double fReflected = evaluate(reflected);

    if (fReflected < value[best]) {
      // expansion is only attempted toward a strictly improving point
      const Eigen::VectorXd expanded =
          centroid + config.expansion * (reflected - centroid);
      const double fExpanded = evaluate(expanded);
      if (fExpanded < fReflected) {
        vertex[worst] = expanded;
        value[worst] = fExpanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = fReflected;
      }
      continue;
    }
    if (fReflected < value[secondWorst]) {
      vertex[worst] = reflected;
      value[worst] = fReflected;
      continue;
    }

    if (fReflected < value[worst]) {
      const Eigen::VectorXd contracted =
          centroid + config.contraction * (reflected - centroid);
      const double fContracted = evaluate(contracted);
      if (fContracted <= fReflected) {
        vertex[worst] = contracted;
        value[worst] = fContracted;
        continue;
      }
    } else {
      const Eigen::VectorXd contracted =
          centroid - config.contraction * (centroid - vertex[worst]);
      const double fContracted = evaluate(contracted);
      if (fContracted < value[worst]) {
        vertex[worst] = contracted;
        value[worst] = fContracted;
        continue;
      }
    }

    // shrink toward the best vertex
    for (Eigen::Index i = 1; i <= dim; ++i) {
      const Eigen::Index v = order[i];
      vertex[v] = vertex[best] + config.shrink * (vertex[v] - vertex[best]);
      value[v] = evaluate(vertex[v]);
    }
  }
}

}  // namespace chi0emos

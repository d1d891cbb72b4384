#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace chi0emos {

/// Nelder-Mead coefficients and stopping rules.  Objectives may return
/// +infinity as a rejection penalty; such vertices are ranked worst and
/// the simplex never expands toward them.
struct SimplexConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  int maxEvals = 5000;
  double xTol = 1e-6;
  double fTol = 1e-8;
  /// Per-coordinate edge lengths of the initial simplex; empty means
  /// 0.25*|x_i| with a floor of 0.1.
  Eigen::ArrayXd initialStepFractions;
  bool recordTrace = false;

  void validate(Eigen::Index dim) const;
};

struct MinimizeResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  int evals = 0;
  bool converged = false;
  /// Best vertex value at the start of every iteration (recordTrace only).
  std::vector<double> bestTrace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Downhill simplex minimization from `start`.  Stops when the simplex
/// diameter falls below xTol, the vertex value spread below fTol, or
/// maxEvals is exhausted (converged = false in that case).  The returned
/// value never exceeds objective(start).  NaN at the start is an error;
/// NaN later is treated as +infinity.
MinimizeResult minimize(const Objective& objective, const Eigen::VectorXd& start,
                        const SimplexConfig& config = {});

}  // namespace chi0emos

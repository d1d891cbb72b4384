#pragma once

#include <functional>
#include <limits>
#include <stdexcept>

namespace chi0emos {

/// Tolerances and limits for the adaptive quadrature engine.
struct QuadratureSpec {
  double absTol = 1e-9;
  double relTol = 1e-8;
  int maxSubdivisions = 200;
  /// Upper-tail probability left outside a truncated semi-infinite integral;
  /// callers integrating (1-F)^2 cut the domain where 1-F falls below this.
  double tailCutoffProbability = 1e-9;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double errorEstimate = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

/// Thrown by callers that cannot proceed on a non-converged quadrature.
struct QuadratureFailure : std::runtime_error {
  QuadratureResult best;
  QuadratureFailure(const std::string& what, const QuadratureResult& r)
      : std::runtime_error(what), best(r) {}
};

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [lo, hi].
/// hi may be +infinity, handled by the substitution x = lo + t/(1-t);
/// endpoints are never evaluated.  Subdivides the interval with the
/// largest error estimate until the total estimate drops below
/// max(absTol, relTol*|value|).  On non-convergence the result carries
/// the best estimate with converged == false.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureSpec& spec = {});

/// Root of g on the bracket [lo, hi] (requires g(lo)*g(hi) <= 0):
/// bisection with secant acceleration, bracket narrowed to width <= tol.
/// Throws std::invalid_argument on a bad bracket and std::runtime_error
/// if 200 iterations do not suffice.
double findRoot(const std::function<double(double)>& g, double lo, double hi, double tol);

}  // namespace chi0emos

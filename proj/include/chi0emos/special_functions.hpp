#pragma once

namespace chi0emos {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
/// a > 0, x >= 0.  Series expansion for x < a + 1, Lentz continued
/// fraction for the complement otherwise.
double regularizedGammaP(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularizedGammaQ(double a, double x);

/// Gamma density with shape/scale parameterization.
double gammaDensity(double x, double shape, double scale);

}  // namespace chi0emos

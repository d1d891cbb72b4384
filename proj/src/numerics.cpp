#include "chi0emos/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace chi0emos {

namespace {

// QUADPACK dqk15 abscissae/weights on [-1, 1].  Even entries of xgk are the
// embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct PanelEstimate {
  double value;
  double error;
};

// One G7/K15 panel on [lo, hi] with the QUADPACK error heuristic.
PanelEstimate kronrodPanel(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double halfLength = 0.5 * (hi - lo);

  double fv[15];
  const double fc = f(center);
  fv[14] = fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = halfLength * kXgk[i];
    fv[2 * i] = f(center - dx);
    fv[2 * i + 1] = f(center + dx);
  }

  double resg = kWg[3] * fc;
  double resk = kWgk[7] * fc;
  double resabs = std::abs(resk);
  for (int i = 0; i < 7; ++i) {
    const double fsum = fv[2 * i] + fv[2 * i + 1];
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    resabs += kWgk[i] * (std::abs(fv[2 * i]) + std::abs(fv[2 * i + 1]));
  }

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int i = 0; i < 7; ++i) {
    resasc += kWgk[i] * (std::abs(fv[2 * i] - reskh) + std::abs(fv[2 * i + 1] - reskh));
  }

  resg *= halfLength;
  resk *= halfLength;
  resabs *= std::abs(halfLength);
  resasc *= std::abs(halfLength);

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {resk, err};
}

struct Interval {
  double lo, hi, value, error;
};

QuadratureResult adaptiveFinite(const std::function<double(double)>& f, double lo, double hi,
                                const QuadratureSpec& spec) {
  QuadratureResult result;
  if (lo == hi) {
    result.value = 0.0;
    result.errorEstimate = 0.0;
    result.converged = true;
    return result;
  }

  std::vector<Interval> intervals;
  intervals.reserve(static_cast<size_t>(spec.maxSubdivisions) + 1);
  PanelEstimate first = kronrodPanel(f, lo, hi);
  intervals.push_back({lo, hi, first.value, first.error});
  result.evaluations = 15;

  auto totals = [&intervals]() {
    double v = 0.0, e = 0.0;
    for (const Interval& iv : intervals) {
      v += iv.value;
      e += iv.error;
    }
    return std::pair<double, double>(v, e);
  };

  for (;;) {
    auto [value, error] = totals();
    if (error <= std::max(spec.absTol, spec.relTol * std::abs(value))) {
      result.value = value;
      result.errorEstimate = error;
      result.converged = true;
      return result;
    }
    if (result.subdivisions >= spec.maxSubdivisions) {
      result.value = value;
      result.errorEstimate = error;
      result.converged = false;
      return result;
    }

    auto worst = std::max_element(
        intervals.begin(), intervals.end(),
        [](const Interval& a, const Interval& b) { return a.error < b.error; });
    const double mid = 0.5 * (worst->lo + worst->hi);
    if (mid <= worst->lo || mid >= worst->hi) {
      // interval at floating-point resolution; no further refinement possible
      result.value = value;
      result.errorEstimate = error;
      result.converged = false;
      return result;
    }
    PanelEstimate left = kronrodPanel(f, worst->lo, mid);
    PanelEstimate right = kronrodPanel(f, mid, worst->hi);
    result.evaluations += 30;
    ++result.subdivisions;
    const double hiOld = worst->hi;
    worst->hi = mid;
    worst->value = left.value;
    worst->error = left.error;
    intervals.push_back({mid, hiOld, right.value, right.error});
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(absTol > 0.0) || !std::isfinite(absTol) || !(relTol > 0.0) || !std::isfinite(relTol))
    throw std::invalid_argument("QuadratureSpec: tolerances must be finite and positive");
  if (maxSubdivisions < 1)
    throw std::invalid_argument("QuadratureSpec: maxSubdivisions must be >= 1");
  if (!(tailCutoffProbability > 0.0) || !(tailCutoffProbability < 1.0))
    throw std::invalid_argument("QuadratureSpec: tailCutoffProbability must lie in (0,1)");
}

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(lo) || std::isnan(hi) || std::isinf(lo))
    throw std::invalid_argument("integrate: lower limit must be finite, limits non-NaN");
  if (!(lo < hi)) throw std::invalid_argument("integrate: requires lo < hi");

  if (std::isinf(hi)) {
    // x = lo + t/(1-t) maps [0,1) onto [lo, inf); nodes stay interior.
    auto g = [&f, lo](double t) {
      const double u = 1.0 - t;
      const double x = lo + t / u;
      return f(x) / (u * u);
    };
    return adaptiveFinite(g, 0.0, 1.0, spec);
  }
  return adaptiveFinite(f, lo, hi, spec);
}

double findRoot(const std::function<double(double)>& g, double lo, double hi, double tol) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("findRoot: requires finite lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("findRoot: tol must be positive");

  double a = lo, b = hi;
  double fa = g(a), fb = g(b);
  if (std::isnan(fa) || std::isnan(fb))
    throw std::invalid_argument("findRoot: g is NaN at a bracket endpoint");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("findRoot: endpoints do not bracket a root");

  for (int iter = 0; iter < 200; ++iter) {
    if (b - a <= tol) return 0.5 * (a + b);

    // secant candidate on even iterations, plain bisection on odd ones so the
    // bracket is guaranteed to halve every two steps
    double x = 0.5 * (a + b);
    if (iter % 2 == 0) {
      const double xs = b - fb * (b - a) / (fb - fa);
      const double margin = 0.01 * (b - a);
      if (xs > a + margin && xs < b - margin) x = xs;
    }

    const double fx = g(x);
    if (fx == 0.0) return x;
    if (std::isnan(fx)) throw std::runtime_error("findRoot: g evaluated to NaN inside bracket");
    if (fa * fx < 0.0) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  throw std::runtime_error("findRoot: no convergence within 200 iterations");
}

}  // namespace chi0emos

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "pairsim/errors.hpp"

namespace pairsim::roots {

struct BrentOptions {
  double x_tolerance = 1e-12;
  int max_iterations = 200;
};

struct BrentResult {
  double x;
  double fx;
  int iterations;
  bool converged;
};

/// Brent's method (inverse quadratic interpolation / secant / bisection) on a
/// sign-changing bracket. Throws NoSolutionError when f(lo) and f(hi) share a
/// nonzero sign. An exact zero at an endpoint is returned immediately, the
/// lower endpoint first.
template <class F>
BrentResult brent(F&& f, double lo, double hi, BrentOptions opts = {}) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return {a, fa, 0, true};
  if (fb == 0.0) return {b, fb, 0, true};
  if (!(std::isfinite(fa) && std::isfinite(fb)) || (fa > 0.0) == (fb > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "root not bracketed on [%.9g, %.9g]: f = (%.6g, %.6g)", lo,
                  hi, fa, fb);
    throw NoSolutionError(buf, fa, fb);
  }

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol =
        2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * opts.x_tolerance;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return {b, fb, iter, true};

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return {b, fb, opts.max_iterations, false};
}

}  // namespace pairsim::roots

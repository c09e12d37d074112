#pragma once

#include <cmath>
#include <utility>

#include "bgt/errors.hpp"

namespace bgt::roots {

struct RootResult {
  double x;
  double fx;
  int iterations;
};

/// Bisection on [lo, hi]. f(lo) and f(hi) must have opposite signs (or one be
/// zero). Stops when the bracket is narrower than tol or cannot shrink.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, flo, 0};
  if (fhi == 0.0) return {hi, fhi, 0};
  if ((flo < 0) == (fhi < 0)) throw NumericalFailure("bisect: no sign change on bracket");
  int it = 0;
  while (it < max_iter && hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    ++it;
    if (fm == 0.0) return {mid, fm, it};
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? RootResult{lo, flo, it} : RootResult{hi, fhi, it};
}

/// Brent's method (inverse quadratic interpolation + secant + bisection).
template <class F>
RootResult brent(F&& f, double a, double b, double tol, int max_iter = 200) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa < 0) == (fb < 0)) throw NumericalFailure("brent: no sign change on bracket");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
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
    const double tol1 = 2.0 * 2.2e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return {b, fb, it};
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < (min1 < min2 ? min1 : min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericalFailure("brent: iteration limit reached");
}

}  // namespace bgt::roots

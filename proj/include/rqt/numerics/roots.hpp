#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "rqt/errors.hpp"

namespace rqt::numerics {

/// Zero of f in [lo, hi] given f(lo) and f(hi) of opposite sign.
///
/// Bisects until the bracket is narrower than `secant_width`, then finishes
/// with bracketed secant steps (Illinois weighting, so a stale endpoint cannot
/// stall convergence). Stops at an exact zero or once the bracket is a few ulps.
template <class F>
double bisect_then_secant(F&& f, double lo, double hi, double f_lo, double f_hi, double secant_width) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw PreconditionError("root bracket has no sign change");

  for (int it = 0; it < 200 && hi - lo > secant_width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
  }

  int side = 0;
  for (int it = 0; it < 200; ++it) {
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
    if (hi - lo <= floor) break;
    double x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == +1) f_lo *= 0.5;
      side = +1;
    }
  }
  // f_lo/f_hi may carry Illinois weights; re-evaluate to pick the better end.
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace rqt::numerics

#pragma once

// Reduced action S0 = hbar arctan(a phi1/phi2 + b), its x-derivative and the
// residual of the relativistic quantum stationary Hamilton-Jacobi equation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>

#include "rqt/errors.hpp"
#include "rqt/kg.hpp"
#include "rqt/numerics/stencils.hpp"

namespace rqt {

/// Integration constants (a, b) of the trajectory family plus the position
/// constant x0. Stored with a > 0; negative inputs are mapped to (-a, -b) and
/// remembered as a direction flip.
struct MobiusParams {
  double a = 1.0;
  double b = 0.0;
  double x0 = 0.0;
  bool flipped = false;

  static MobiusParams make(double a, double b, double x0 = 0.0) {
    if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) throw PreconditionError("Mobius parameter a must be a finite nonzero number");
    if (a < 0.0) return MobiusParams{-a, -b, x0, true};
    return MobiusParams{a, b, x0, false};
  }

  int direction() const { return flipped ? -1 : +1; }
  /// The pair as the caller supplied it.
  double signed_a() const { return flipped ? -a : a; }
  double signed_b() const { return flipped ? -b : b; }
};

/// Closed-form trajectories satisfy tan(kx) = a tan(wt) + b, while integrating
/// the velocity field with reduced-action constants (a', b') gives
/// a' tan(kx) + b' = tan(wt). This returns (a', b') = (1/a, -b/a).
inline MobiusParams action_params_from_trajectory(const MobiusParams& p) {
  return MobiusParams::make(1.0 / p.signed_a(), -p.signed_b() / p.signed_a(), p.x0);
}

struct ActionSample {
  double x = 0.0;       // fm
  double s0 = 0.0;      // MeV s, unwrapped
  double ds0_dx = 0.0;  // MeV s / fm
  long branch = 0;
};

namespace detail {

/// Number of branches of arctan crossed between x0 and x: +1 per phi2 zero in
/// (x0, x) when x > x0, -1 per zero in (x, x0] when x < x0.
inline long branch_index(const std::vector<double>& zeros, double x0, double x) {
  if (x >= x0) {
    const auto lo = std::upper_bound(zeros.begin(), zeros.end(), x0);
    const auto hi = std::lower_bound(zeros.begin(), zeros.end(), x);
    return hi > lo ? static_cast<long>(hi - lo) : 0;
  }
  const auto lo = std::upper_bound(zeros.begin(), zeros.end(), x);
  const auto hi = std::upper_bound(zeros.begin(), zeros.end(), x0);
  return -(hi > lo ? static_cast<long>(hi - lo) : 0);
}

inline double momentum_from(const BasisPoint& p, const MobiusParams& m, double hbar) {
  const double num = m.a * p.phi1 + m.b * p.phi2;
  return hbar * m.a * p.wronskian() / (p.phi2 * p.phi2 + num * num);
}

}  // namespace detail

/// Unwrapped reduced action at x, anchored so that the branch at p.x0 is 0.
/// At a zero of phi2 the one-sided limit (n + 1/2) pi hbar is returned.
inline ActionSample reduced_action(const KgBasis& basis, const MobiusParams& p, double x) {
  const BasisPoint v = basis.evaluate(x);
  const double hbar = basis.scenario().hbar();
  const auto& zeros = basis.phi2_zeros();
  const double sign = p.flipped ? -1.0 : 1.0;

  ActionSample out;
  out.x = x;
  out.ds0_dx = sign * detail::momentum_from(v, p, hbar);

  // Snap to the limit at a refined zero; the cached zeros are ulp-accurate.
  const auto near = std::lower_bound(zeros.begin(), zeros.end(), x);
  for (auto it : {near, near == zeros.begin() ? near : near - 1}) {
    if (it == zeros.end()) continue;
    const double z = *it;
    if (std::abs(x - z) <= 1e-12 * std::max(1.0, std::abs(z))) {
      // The arctan increases through each zero: +pi/2 on the branch to its left,
      // -pi/2 on the branch to its right. branch_index counts the left branch
      // for zeros at or right of x0 and the right branch otherwise.
      const long n = detail::branch_index(zeros, p.x0, z);
      const double half = z >= p.x0 ? 0.5 : -0.5;
      out.branch = n;
      out.s0 = sign * hbar * std::numbers::pi * (half + static_cast<double>(n));
      return out;
    }
  }

  const long n = detail::branch_index(zeros, p.x0, x);
  const double w = std::atan((p.a * v.phi1 + p.b * v.phi2) / v.phi2);
  out.branch = n;
  out.s0 = sign * hbar * (w + static_cast<double>(n) * std::numbers::pi);
  return out;
}

/// sign * hbar a W / (phi2^2 + (a phi1 + b phi2)^2), with a taken as stored (> 0).
inline double conjugate_momentum(const KgBasis& basis, const MobiusParams& p, double x, int sign = +1) {
  return static_cast<double>(sign) * detail::momentum_from(basis.evaluate(x), p, basis.scenario().hbar());
}

struct RqshjeTerms {
  double momentum_sq = 0.0;  // (S0')^2
  double quantum = 0.0;      // (hbar^2/2) [3/2 (S0''/S0')^2 - S0'''/S0']
  double classical = 0.0;    // [(E-V)^2 - m0^2c^4] / c^2
  double residual() const { return momentum_sq - quantum - classical; }
  double scale() const { return std::max({std::abs(momentum_sq), std::abs(quantum), std::abs(classical)}); }
};

/// Default finite-difference step: 1e-3 of the local 1/k, kept in [1e-3, 0.1] fm.
/// Much smaller steps let roundoff in S0''' dominate (about 5e-6 at 1e-3 fm on
/// a free 2 MeV electron); larger ones let truncation in.
inline double rqshje_default_step(const Scenario& s, double x) {
  const double k = std::sqrt(std::abs(kg_coefficient(s, x)));
  if (k == 0.0) return 0.1;
  return std::clamp(1e-3 / k, 1e-3, 0.1);
}

/// Terms of the RQSHJE (multiplied through by 2 m0) at x. S0' is analytic;
/// S0'' and S0''' come from 5-point central differences of S0' with step h.
inline RqshjeTerms rqshje_terms(const KgBasis& basis, const MobiusParams& p, double x,
                                std::optional<double> step = std::nullopt) {
  const double h = step.value_or(rqshje_default_step(basis.scenario(), x));
  if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
  const Domain& d = basis.domain();
  if (x - 2 * h < d.lo || x + 2 * h > d.hi)
    throw DomainError("finite-difference stencil around x = " + std::to_string(x) + " fm leaves the basis domain");
  const Scenario& s = basis.scenario();
  const double hbar = s.hbar();
  auto momentum = [&](double xx) { return detail::momentum_from(basis.evaluate(xx), p, hbar); };
  const double s1 = momentum(x);
  const auto [s2, s3] = numerics::central_derivatives(momentum, x, h);
  const double q = s.available(x);
  const double c = s.c();
  RqshjeTerms t;
  t.momentum_sq = s1 * s1;
  t.quantum = 0.5 * hbar * hbar * (1.5 * (s2 / s1) * (s2 / s1) - s3 / s1);
  t.classical = (q * q - s.mass_sq()) / (c * c);
  return t;
}

/// |RQSHJE residual| normalized by the largest of its three terms.
inline double rqshje_residual(const KgBasis& basis, const MobiusParams& p, double x,
                              std::optional<double> h = std::nullopt) {
  const RqshjeTerms t = rqshje_terms(basis, p, x, h);
  return std::abs(t.residual()) / t.scale();
}

}  // namespace rqt

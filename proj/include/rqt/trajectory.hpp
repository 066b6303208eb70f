#pragma once

// (t, x) trajectories: closed forms for constant potentials (massive allowed,
// massive forbidden, photon) and quadrature of 1/xdot for a general basis,
// plus the residual checks of the trajectory-level equations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rqt/action.hpp"
#include "rqt/errors.hpp"
#include "rqt/kg.hpp"
#include "rqt/numerics/stencils.hpp"
#include "rqt/scenario.hpp"

namespace rqt {

enum class TrajectoryKind { ClosedFormAllowed, ClosedFormForbidden, ClosedFormPhoton, OdeGeneral };

inline std::string to_string(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::ClosedFormAllowed: return "closed-form-allowed";
    case TrajectoryKind::ClosedFormForbidden: return "closed-form-forbidden";
    case TrajectoryKind::ClosedFormPhoton: return "closed-form-photon";
    case TrajectoryKind::OdeGeneral: return "ode-general";
  }
  return "?";
}

struct TimeSample {
  double t = 0.0;  // s
  double x = 0.0;  // fm
};

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  double dt = 0.0;
};

struct Trajectory {
  Scenario scenario;
  MobiusParams params;
  TrajectoryKind kind = TrajectoryKind::ClosedFormAllowed;
  std::vector<TimeSample> samples;
  /// Reduced-action constants whose velocity field generates this path, when defined.
  std::optional<MobiusParams> action;
  /// Node times that were inserted as samples.
  std::vector<double> node_times;
  /// Set when an ODE trajectory stopped short of a turning point (or E = V) in its range.
  std::optional<double> turning_point;

  int direction() const { return params.direction(); }
  bool is_closed_form() const { return kind != TrajectoryKind::OdeGeneral; }
  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(samples.size());
    for (const auto& s : samples) t.push_back(s.t);
    return t;
  }
  std::vector<double> positions() const {
    std::vector<double> x;
    x.reserve(samples.size());
    for (const auto& s : samples) x.push_back(s.x);
    return x;
  }
};

struct DivergenceEvent {
  double t_star = 0.0;
  int direction = +1;  // +1: x -> +inf, -1: x -> -inf
};

struct ForbiddenTrajectory {
  Trajectory trajectory;
  std::vector<DivergenceEvent> divergences;
};

/// Parameters of the oscillatory closed form x = (1/k) arctan[a tan(omega t) + b] + n pi/k + x0.
struct OscillatoryMotion {
  double k = 0.0;          // fm^-1
  double omega = 0.0;      // s^-1
  double node_dt = 0.0;    // pi / omega
  double node_dx = 0.0;    // pi / k
  double velocity = 0.0;   // straight-line (a, b) = (1, 0) speed, fm/s
};

/// k = sqrt((E-U0)^2 - m0^2c^4)/(hbar c), omega = ((E-U0)^2 - m0^2c^4)/(hbar |E-U0|).
/// For photons this is k = |E-U0|/(hbar c), omega = |E-U0|/hbar.
inline OscillatoryMotion oscillatory_motion(const Scenario& s) {
  if (!s.potential.is_constant()) throw PreconditionError("closed-form motion requires a constant potential");
  const double q = s.available(0.0);
  if (q == 0.0) throw SingularEnergyError("E = U0: closed-form trajectory is singular");
  const double gap = q * q - s.mass_sq();
  if (std::abs(gap) <= turning_tolerance(s)) throw DegenerateBasisError("turning energy: (E-U0)^2 = m0^2c^4");
  if (gap < 0.0) throw PreconditionError("oscillatory closed form requires a classically allowed region");
  OscillatoryMotion m;
  m.k = std::sqrt(gap) / s.hbar_c();
  m.omega = gap / (s.hbar() * std::abs(q));
  m.node_dt = std::numbers::pi / m.omega;
  m.node_dx = std::numbers::pi / m.k;
  m.velocity = m.omega / m.k;
  return m;
}

/// Position on the oscillatory closed form. The branch integer n is chosen per
/// time interval [(n - 1/2) pi/omega, (n + 1/2) pi/omega] so x is continuous.
/// A flipped parameter set gives the mirror image about x0.
inline double oscillatory_position(const OscillatoryMotion& m, const MobiusParams& p, double t) {
  const double theta = m.omega * t;
  double n = std::round(theta / std::numbers::pi);
  double phase = theta - n * std::numbers::pi;
  // Rounding can leave the phase just outside [-pi/2, pi/2] at a node, where tan flips sign.
  if (phase > std::numbers::pi / 2) {
    phase -= std::numbers::pi;
    n += 1.0;
  } else if (phase < -std::numbers::pi / 2) {
    phase += std::numbers::pi;
    n -= 1.0;
  }
  const double rel = (std::atan(p.a * std::tan(phase) + p.b) + n * std::numbers::pi) / m.k;
  return p.x0 + static_cast<double>(p.direction()) * rel;
}

struct ForbiddenMotion {
  double kappa = 0.0;  // fm^-1
  double rate = 0.0;   // (m0^2c^4 - (E-U0)^2) / (hbar (E-U0)), s^-1, signed
};

inline ForbiddenMotion forbidden_motion(const Scenario& s) {
  if (!s.potential.is_constant()) throw PreconditionError("closed-form motion requires a constant potential");
  if (s.species.is_photon()) throw PreconditionError("photons have no forbidden-region closed form");
  const double q = s.available(0.0);
  if (q == 0.0) throw SingularEnergyError("E = U0: forbidden-region trajectory is singular");
  const double gap = s.mass_sq() - q * q;
  if (std::abs(gap) <= turning_tolerance(s)) throw DegenerateBasisError("turning energy: (E-U0)^2 = m0^2c^4");
  if (gap < 0.0) throw PreconditionError("forbidden closed form requires (E-U0)^2 < m0^2c^4");
  return ForbiddenMotion{std::sqrt(gap) / s.hbar_c(), gap / (s.hbar() * q)};
}

/// x = ln|a tan(rate t) + b| / (2 kappa) + x0. Invariant under (a, b) -> (-a, -b).
inline double forbidden_position(const ForbiddenMotion& m, const MobiusParams& p, double t) {
  const double arg = p.a * std::tan(m.rate * t) + p.b;
  return std::log(std::abs(arg)) / (2.0 * m.kappa) + p.x0;
}

/// Analytic divergence times inside [t_min, t_max]: poles of tan (x -> +inf)
/// and zeros of the log argument at tan = -b/a (x -> -inf).
inline std::vector<DivergenceEvent> forbidden_divergences(const ForbiddenMotion& m, const MobiusParams& p,
                                                          double t_min, double t_max) {
  std::vector<DivergenceEvent> out;
  const double th_lo = std::min(m.rate * t_min, m.rate * t_max);
  const double th_hi = std::max(m.rate * t_min, m.rate * t_max);
  auto collect = [&](double base, int dir) {
    const double n_lo = std::ceil((th_lo - base) / std::numbers::pi);
    const double n_hi = std::floor((th_hi - base) / std::numbers::pi);
    for (double n = n_lo; n <= n_hi; n += 1.0) out.push_back({(base + n * std::numbers::pi) / m.rate, dir});
  };
  collect(std::numbers::pi / 2.0, +1);
  collect(std::atan(-p.b / p.a), -1);
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return l.t_star < r.t_star; });
  return out;
}

namespace detail {

inline std::vector<double> grid_times(const TimeGrid& g, const std::vector<double>& inserted) {
  if (!(g.dt > 0.0) || !(g.t_max > g.t_min)) throw PreconditionError("time grid needs dt > 0 and t_max > t_min");
  const double span = (g.t_max - g.t_min) / g.dt;
  if (span > 5e7) throw PreconditionError("time grid too fine (more than 5e7 samples)");
  const auto n = static_cast<std::size_t>(std::floor(span * (1.0 + 1e-12)));
  std::vector<double> t;
  t.reserve(n + 1 + inserted.size());
  for (std::size_t i = 0; i <= n; ++i) {
    const double ti = g.t_min + static_cast<double>(i) * g.dt;
    const bool crowded = std::any_of(inserted.begin(), inserted.end(),
                                     [&](double tn) { return std::abs(tn - ti) < 0.25 * g.dt; });
    if (!crowded) t.push_back(ti);
  }
  t.insert(t.end(), inserted.begin(), inserted.end());
  std::sort(t.begin(), t.end());
  return t;
}

inline std::vector<double> oscillatory_node_times(const OscillatoryMotion& m, double t_min, double t_max) {
  std::vector<double> out;
  const double n_lo = std::ceil(t_min / m.node_dt - 0.5);
  const double n_hi = std::floor(t_max / m.node_dt - 0.5);
  for (double n = n_lo; n <= n_hi; n += 1.0) out.push_back((n + 0.5) * m.node_dt);
  return out;
}

inline Trajectory oscillatory_trajectory(const Scenario& s, const MobiusParams& p, const TimeGrid& grid,
                                         TrajectoryKind kind) {
  const OscillatoryMotion m = oscillatory_motion(s);
  Trajectory tr;
  tr.scenario = s;
  tr.params = p;
  tr.kind = kind;
  tr.action = action_params_from_trajectory(p);
  tr.node_times = oscillatory_node_times(m, grid.t_min, grid.t_max);
  for (double t : grid_times(grid, tr.node_times)) tr.samples.push_back({t, oscillatory_position(m, p, t)});
  return tr;
}

}  // namespace detail

/// Massive particle, constant potential, (E-U0)^2 > m0^2c^4. Node times are always samples.
inline Trajectory trajectory_constant_allowed(const Scenario& s, const MobiusParams& p, const TimeGrid& grid) {
  s.validate();
  if (s.species.is_photon()) throw PreconditionError("trajectory_constant_allowed is for massive species");
  return detail::oscillatory_trajectory(s, p, grid, TrajectoryKind::ClosedFormAllowed);
}

/// Photon, constant potential, E != U0. Both signs of E - U0 give the same family.
inline Trajectory trajectory_photon(const Scenario& s, const MobiusParams& p, const TimeGrid& grid) {
  s.validate();
  if (!s.species.is_photon()) throw PreconditionError("trajectory_photon requires a massless species");
  return detail::oscillatory_trajectory(s, p, grid, TrajectoryKind::ClosedFormPhoton);
}

/// Massive particle in a classically forbidden constant potential. Samples are
/// clipped to |x - x0| <= ceiling; divergence times are reported analytically.
inline ForbiddenTrajectory trajectory_constant_forbidden(const Scenario& s, const MobiusParams& p,
                                                         const TimeGrid& grid, double ceiling = 1e6) {
  s.validate();
  const ForbiddenMotion m = forbidden_motion(s);
  ForbiddenTrajectory out;
  Trajectory& tr = out.trajectory;
  tr.scenario = s;
  tr.params = p;
  tr.kind = TrajectoryKind::ClosedFormForbidden;
  for (double t : detail::grid_times(grid, {})) {
    const double x = forbidden_position(m, p, t);
    tr.samples.push_back({t, std::clamp(x, p.x0 - ceiling, p.x0 + ceiling)});
  }
  out.divergences = forbidden_divergences(m, p, grid.t_min, grid.t_max);
  return out;
}

/// Brackets [t_{i-1}, t_{i+1}] around every interior local extremum of the
/// sampled x(t). Between singularities the forbidden-region path is monotone,
/// so these are exactly the sampled blow-ups.
inline std::vector<std::pair<double, double>> sampled_divergence_brackets(const Trajectory& tr) {
  std::vector<std::pair<double, double>> out;
  const auto& s = tr.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double l = s[i].x - s[i - 1].x, r = s[i + 1].x - s[i].x;
    if ((l > 0.0 && r < 0.0) || (l < 0.0 && r > 0.0)) out.emplace_back(s[i - 1].t, s[i + 1].t);
  }
  return out;
}

/// Closed-form position of a closed-form trajectory at an arbitrary time.
inline double closed_form_position(const Trajectory& tr, double t) {
  switch (tr.kind) {
    case TrajectoryKind::ClosedFormAllowed:
    case TrajectoryKind::ClosedFormPhoton: return oscillatory_position(oscillatory_motion(tr.scenario), tr.params, t);
    case TrajectoryKind::ClosedFormForbidden: return forbidden_position(forbidden_motion(tr.scenario), tr.params, t);
    case TrajectoryKind::OdeGeneral: break;
  }
  throw PreconditionError("closed_form_position called on an ODE trajectory");
}

/// max/min of phi2^2 + (a phi1 + b phi2)^2 over a period of a sin/cos basis:
/// the eigenvalue ratio of [[1 + b^2, a b], [a b, a^2]]. The speed along an ODE
/// trajectory swings by this factor within every node interval.
inline double speed_swing(const MobiusParams& p) {
  const double tr = 1.0 + p.a * p.a + p.b * p.b;
  const double det = p.a * p.a;
  const double root = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  return (tr + root) / (tr - root);
}

/// Samples per node interval that keep 5/7-point stencils on an ODE
/// trajectory near the 1e-6 level: `base` times the speed swing, and never
/// fewer than `floor`. The floor covers the last interval before a turning
/// point, where the wavelength stretches even for a swing of 1.
inline std::size_t resolved_per_interval(const MobiusParams& p, double base = 32.0, double floor = 128.0) {
  return static_cast<std::size_t>(std::ceil(std::max(floor, base * speed_swing(p))));
}

struct XRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// t(x) = integral of 1/xdot with xdot from the velocity field
///   xdot = [(E-V) - m0^2c^4/(E-V)] [phi2^2 + (a phi1 + b phi2)^2] / (hbar a W),
/// taken with the positive sign (canonical direction), by adaptive Gauss-Kronrod
/// quadrature between consecutive sample positions. Zeros of phi2 are always
/// samples; there are at least per_interval samples per node interval and
/// n_samples overall. Time zero sits at p.x0. A turning point (or E = V) inside the range
/// truncates it just short of that point and is recorded.
inline Trajectory trajectory_ode(const Scenario& s, const KgBasis& basis, const MobiusParams& p, XRange range,
                                 std::size_t n_samples, std::size_t per_interval = 16) {
  s.validate();
  if (n_samples < 16) throw PreconditionError("trajectory_ode needs at least 16 samples");
  if (!(range.hi > range.lo)) throw PreconditionError("x range must have hi > lo");
  if (!basis.domain().contains(range.lo) || !basis.domain().contains(range.hi))
    throw PreconditionError("basis does not cover the requested x range");

  Trajectory tr;
  tr.scenario = s;
  tr.params = p;
  tr.kind = TrajectoryKind::OdeGeneral;
  tr.action = p;

  const auto singular = singular_points(s, range.lo, range.hi);
  if (!singular.empty()) {
    tr.turning_point = singular.front();
    range.hi = singular.front() - 1e-6 * (range.hi - range.lo);
  }
  if (kinetic_factor(s, range.lo) == 0.0) throw PreconditionError("trajectory_ode range starts at a turning point");
  if (p.x0 < range.lo || p.x0 > range.hi) throw PreconditionError("x0 must lie inside the x range");

  // Samples sit at equal steps of the unwrapped phase theta = S0/hbar, aligned
  // so every zero of phi2 (theta = pi/2 + n pi) is one of them. On a constant
  // potential theta = omega t, so the grid is uniform in time whatever (a, b);
  // an x-uniform grid would not be, since xdot varies by a factor ~ (a + 1/a)^2
  // inside a node interval.
  MobiusParams pc = p;
  pc.flipped = false;
  const double hbar = s.hbar();
  std::vector<double> breaks{range.lo};
  for (double z : basis.phi2_zeros())
    if (z > range.lo && z < range.hi) breaks.push_back(z);
  breaks.push_back(range.hi);
  std::vector<double> theta_at;
  for (double x : breaks) theta_at.push_back(reduced_action(basis, pc, x).s0 / hbar);
  const double span = theta_at.back() - theta_at.front();
  const double wanted = std::min(std::numbers::pi / static_cast<double>(std::max<std::size_t>(per_interval, 1)),
                                 span / static_cast<double>(n_samples - 1));
  const double per = std::ceil(std::numbers::pi / wanted);
  const double delta = std::numbers::pi / per;
  const double theta_x0 = reduced_action(basis, pc, p.x0).s0 / hbar;

  std::vector<double> xs(breaks.begin(), breaks.end());
  xs.push_back(p.x0);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double xl = breaks[i], xr = breaks[i + 1];
    const long branch = reduced_action(basis, pc, 0.5 * (xl + xr)).branch;
    auto phase = [&](double x, double& slope) {
      const BasisPoint v = basis.evaluate(x);
      slope = detail::momentum_from(v, pc, hbar) / hbar;
      return std::atan((pc.a * v.phi1 + pc.b * v.phi2) / v.phi2) + static_cast<double>(branch) * std::numbers::pi;
    };
    const double m_lo = std::floor((theta_at[i] - std::numbers::pi / 2) / delta) + 1.0;
    for (double m = m_lo;; m += 1.0) {
      const double target = std::numbers::pi / 2 + m * delta;
      if (target >= theta_at[i + 1] - 0.25 * delta) break;
      if (target <= theta_at[i] + 0.25 * delta || std::abs(target - theta_x0) < 0.25 * delta) continue;
      // Safeguarded Newton on theta(x) = target inside [xl, xr].
      double x = xl, slope = 0.0;
      double f = phase(x, slope) - target;
      for (int it = 0; it < 100; ++it) {
        double next = x - f / slope;
        if (!(next > xl && next < xr)) next = 0.5 * (xl + xr);
        const double fn = phase(next, slope) - target;
        if (fn < 0.0) xl = next;
        else xr = next;
        // Far from x0 the unwrapped phase is large and its last few ulps are noise.
        const bool done = std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) ||
                          std::abs(fn) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(target);
        x = next;
        f = fn;
        if (done) break;
      }
      xs.push_back(x);
      xl = x;
      xr = breaks[i + 1];
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto inverse_speed = [&](double x) {
    const BasisPoint v = basis.evaluate(x);
    const double num = p.a * v.phi1 + p.b * v.phi2;
    const double d = v.phi2 * v.phi2 + num * num;
    return std::abs(hbar * p.a * v.wronskian() / (kinetic_factor(s, x) * d));
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::vector<double> tau(xs.size(), 0.0);
  for (std::size_t i = 1; i < xs.size(); ++i) tau[i] = tau[i - 1] + Quad::integrate(inverse_speed, xs[i - 1], xs[i], 8, 1e-9);
  const auto anchor = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), p.x0) - xs.begin());
  const double tau0 = tau[anchor];
  const double dir = static_cast<double>(p.direction());
  for (std::size_t i = 0; i < xs.size(); ++i) tr.samples.push_back({dir * (tau[i] - tau0), xs[i]});
  std::sort(tr.samples.begin(), tr.samples.end(), [](const auto& l, const auto& r) { return l.t < r.t; });
  for (const auto& smp : tr.samples)
    if (std::binary_search(basis.phi2_zeros().begin(), basis.phi2_zeros().end(), smp.x)) tr.node_times.push_back(smp.t);
  return tr;
}

/// Trajectory-level equation terms at one point. Massive: the six terms of the
/// first integral, which reduces to
///   R^2 - (xdot^2/c^2) Q^2 R + (hbar^2/2) sigma Q^2 = 0,  R = Q^2 - m0^2c^4, Q = E - V,
/// for constant V. The V' and V'' terms use the exact reduction of the
/// Hamilton-Jacobi equation (first power of Q on the xddot V' term).
/// Photon: Q^2 - xdot^2 Q^2/c^2 + (hbar^2/2) sigma = 0.
inline std::array<double, 6> firqnl_terms(const Scenario& s, double x, double xd, double xdd, double xddd) {
  const double q = s.available(x);
  const double m = s.mass_sq();
  const double r = q * q - m;
  const double hbar = s.hbar();
  const double c = s.c();
  const double v1 = s.potential.slope(x);
  const double v2 = s.potential.curvature(x);
  const double sigma = 1.5 * (xdd / xd) * (xdd / xd) - xddd / xd;
  std::array<double, 6> t{};
  if (s.species.is_photon() && v1 == 0.0 && v2 == 0.0) {
    t[0] = q * q;
    t[1] = -xd * xd * q * q / (c * c);
    t[2] = 0.5 * hbar * hbar * sigma;
    return t;
  }
  const double ratio = (q * q + m) / r;
  t[0] = r * r;
  t[1] = -xd * xd / (c * c) * q * q * r;
  t[2] = 0.5 * hbar * hbar * sigma * q * q;
  t[3] = -0.5 * hbar * hbar * (xdd * v1 + xd * xd * v2) * ratio * q;
  t[4] = -0.75 * hbar * hbar * (xd * v1) * (xd * v1) * ratio * ratio;
  t[5] = -hbar * hbar * (xd * v1) * (xd * v1) * m / r;
  return t;
}

struct ResidualPoint {
  double t = 0.0;
  double x = 0.0;
  double residual = 0.0;
};

/// Normalized trajectory-equation residual at every interior sample. xdot and
/// xddot use 5-point stencils, xdddot a 7-point stencil, with Fornberg weights
/// on the actual sample times so inserted node samples need no resampling.
inline std::vector<ResidualPoint> firqnl_profile(const Trajectory& tr) {
  if (tr.samples.size() < 7) throw PreconditionError("firqnl_residual needs at least 7 samples");
  const auto t = tr.times();
  const auto x = tr.positions();
  std::vector<ResidualPoint> out;
  for (std::size_t i = 3; i + 3 < t.size(); ++i) {
    const double xd = numerics::stencil_derivative(t, x, i, 5, 1);
    const double xdd = numerics::stencil_derivative(t, x, i, 5, 2);
    const double xddd = numerics::stencil_derivative(t, x, i, 7, 3);
    const auto terms = firqnl_terms(tr.scenario, x[i], xd, xdd, xddd);
    double sum = 0.0, scale = 0.0;
    for (double v : terms) {
      sum += v;
      scale = std::max(scale, std::abs(v));
    }
    out.push_back({t[i], x[i], std::abs(sum) / scale});
  }
  return out;
}

inline double firqnl_residual(const Trajectory& tr) {
  double worst = 0.0;
  for (const auto& r : firqnl_profile(tr)) worst = std::max(worst, r.residual);
  return worst;
}

/// Basis coordinate of a trajectory position: closed forms are written relative to x0.
inline double basis_coordinate(const Trajectory& tr, double x) { return tr.is_closed_form() ? x - tr.params.x0 : x; }

/// max_i |xdot * dS0/dx - [(E-V) - m0^2c^4/(E-V)]| / |kinetic factor| over
/// interior samples, with xdot from 5-point stencils on the samples and dS0/dx
/// from the reduced action with constants p. The momentum sign follows the
/// kinetic-factor rule: same sign as xdot where the factor is positive,
/// opposite where negative.
inline double velocity_momentum_check(const Trajectory& tr, const KgBasis& basis, const MobiusParams& p) {
  const auto t = tr.times();
  const auto x = tr.positions();
  if (t.size() < 5) throw PreconditionError("velocity_momentum_check needs at least 5 samples");
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < t.size(); ++i) {
    const double k = kinetic_factor(tr.scenario, x[i]);
    if (k == 0.0) continue;
    const double xd = numerics::stencil_derivative(t, x, i, 5, 1);
    const int sign = ((k > 0.0) == (xd > 0.0)) ? +1 : -1;
    const double mom = conjugate_momentum(basis, p, basis_coordinate(tr, x[i]), sign);
    worst = std::max(worst, std::abs(xd * mom - k) / std::abs(k));
  }
  return worst;
}

}  // namespace rqt

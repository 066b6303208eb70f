#pragma once

// Node locations (analytic and as zeros of phi2), node spacings against the
// de Broglie wavelength, mean momentum between nodes, common crossings of a
// trajectory family and the hbar -> 0 scan.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rqt/action.hpp"
#include "rqt/errors.hpp"
#include "rqt/kg.hpp"
#include "rqt/numerics/roots.hpp"
#include "rqt/scenario.hpp"
#include "rqt/trajectory.hpp"

namespace rqt {

struct NodeReport {
  std::vector<double> node_times;      // s, empty when not meaningful
  std::vector<double> node_positions;  // fm
  double dt_spacing = std::numeric_limits<double>::quiet_NaN();  // s
  std::vector<double> dx_spacings;     // fm, one per interval
  double lambda = std::numeric_limits<double>::quiet_NaN();      // fm
  double mean_momentum = std::numeric_limits<double>::quiet_NaN();       // MeV s / fm
  double classical_momentum = std::numeric_limits<double>::quiet_NaN();  // MeV s / fm
  double ratio = std::numeric_limits<double>::quiet_NaN();       // dx / (lambda / 2)

  double dx() const { return dx_spacings.empty() ? std::numeric_limits<double>::quiet_NaN() : dx_spacings.front(); }
};

/// sqrt((E-U0)^2 - m0^2c^4) / c.
inline double classical_momentum(const Scenario& s, double x = 0.0) {
  const double q = s.available(x);
  return std::sqrt(std::max(q * q - s.mass_sq(), 0.0)) / s.c();
}

/// lambda = 2 pi hbar c / sqrt((E-U0)^2 - m0^2c^4), in fm.
inline double de_broglie_wavelength(const Scenario& s) {
  const double q = s.available(0.0);
  return 2.0 * std::numbers::pi * s.hbar_c() / std::sqrt(q * q - s.mass_sq());
}

/// All zeros of phi2 in the basis domain (possibly none).
inline std::vector<double> nodes_numeric(const KgBasis& basis) { return basis.phi2_zeros(); }

/// (S0(x_b) - S0(x_a)) / (x_b - x_a) with the unwrapped action, for two
/// consecutive zeros of phi2.
inline double mean_momentum(const KgBasis& basis, const MobiusParams& p, double x_a, double x_b) {
  const auto& z = basis.phi2_zeros();
  auto index_of = [&](double x) -> std::optional<std::size_t> {
    const auto it = std::lower_bound(z.begin(), z.end(), x - 1e-12 * std::max(1.0, std::abs(x)));
    if (it != z.end() && std::abs(*it - x) <= 1e-12 * std::max(1.0, std::abs(x)))
      return static_cast<std::size_t>(it - z.begin());
    return std::nullopt;
  };
  const auto ia = index_of(x_a), ib = index_of(x_b);
  if (!ia || !ib) throw PreconditionError("mean_momentum needs zeros of phi2 as end points");
  if (*ib != *ia + 1) throw PreconditionError("mean_momentum needs adjacent nodes x_a < x_b");
  return (reduced_action(basis, p, x_b).s0 - reduced_action(basis, p, x_a).s0) / (x_b - x_a);
}

/// Integral of dS0/dx between two points by adaptive Gauss-Kronrod quadrature.
/// Independent of the branch bookkeeping in reduced_action.
inline double action_increment(const KgBasis& basis, const MobiusParams& p, double x_a, double x_b) {
  const double hbar = basis.scenario().hbar();
  auto f = [&](double x) { return detail::momentum_from(basis.evaluate(x), p, hbar); };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
  return static_cast<double>(p.direction()) * Quad::integrate(f, x_a, x_b, 6, 1e-10);
}

/// Analytic nodes of a constant potential (allowed region, massive or photon):
/// t_n = (n + 1/2) dt, x_n = (n + 1/2) dx + x0 for n in [n_first, n_first + count).
/// The mean momentum is measured on the closed-form basis between the first two
/// nodes with (a, b) = (1, 0).
inline NodeReport nodes_constant(const Scenario& s, long n_first = 0, std::size_t count = 8, double x0 = 0.0) {
  s.validate();
  if (count < 2) throw PreconditionError("nodes_constant needs at least two nodes");
  const OscillatoryMotion m = oscillatory_motion(s);
  NodeReport r;
  r.dt_spacing = m.node_dt;
  for (std::size_t i = 0; i < count; ++i) {
    const double n = static_cast<double>(n_first) + static_cast<double>(i) + 0.5;
    r.node_times.push_back(n * m.node_dt);
    r.node_positions.push_back(n * m.node_dx + x0);
  }
  for (std::size_t i = 0; i + 1 < count; ++i) r.dx_spacings.push_back(m.node_dx);
  r.lambda = de_broglie_wavelength(s);
  r.classical_momentum = classical_momentum(s);
  r.ratio = r.dx() / (0.5 * r.lambda);

  const KgBasis basis = kg_closed_constant(s);
  const auto& z = basis.phi2_zeros();
  const auto right = std::upper_bound(z.begin(), z.end(), 0.0);
  if (right == z.end() || right == z.begin()) throw PreconditionError("closed-form basis domain holds no node pair");
  r.mean_momentum = mean_momentum(basis, MobiusParams::make(1.0, 0.0), *(right - 1), *right);
  return r;
}

/// Node spacing over half the de Broglie wavelength, using the first spacing in the report.
inline double de_broglie_check(const Scenario& s, const NodeReport& report) {
  if (!s.potential.is_constant()) throw PreconditionError("de_broglie_check requires a constant potential");
  return report.dx() / (0.5 * de_broglie_wavelength(s));
}

struct LocalMomentumReport {
  std::vector<double> midpoints;       // fm
  std::vector<double> spacings;        // fm
  std::vector<double> node_momentum;   // pi hbar / dx, MeV s / fm
  std::vector<double> local_momentum;  // sqrt((E - V(mid))^2 - m0^2c^4) / c
  double max_relative_deviation = 0.0;
  bool spacing_increasing = true;      // toward the turning point
};

/// pi hbar / dx per node interval against the classical momentum at the
/// interval midpoint. Spacing monotonicity is judged in the direction in which
/// the kinetic energy decreases.
inline LocalMomentumReport local_momentum_check(const KgBasis& basis) {
  const auto& z = basis.phi2_zeros();
  if (z.size() < 3) throw PreconditionError("local_momentum_check needs at least three nodes");
  const Scenario& s = basis.scenario();
  LocalMomentumReport r;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double dx = z[i + 1] - z[i];
    const double mid = 0.5 * (z[i] + z[i + 1]);
    r.midpoints.push_back(mid);
    r.spacings.push_back(dx);
    r.node_momentum.push_back(std::numbers::pi * s.hbar() / dx);
    r.local_momentum.push_back(classical_momentum(s, mid));
    r.max_relative_deviation =
        std::max(r.max_relative_deviation, std::abs(r.node_momentum.back() / r.local_momentum.back() - 1.0));
  }
  const bool rising = classical_momentum(s, r.midpoints.back()) < classical_momentum(s, r.midpoints.front());
  for (std::size_t i = 1; i < r.spacings.size(); ++i) {
    const bool ok = rising ? r.spacings[i] > r.spacings[i - 1] : r.spacings[i] < r.spacings[i - 1];
    if (!ok) r.spacing_increasing = false;
  }
  return r;
}

struct CommonCrossingReport {
  std::vector<double> times;      // s
  std::vector<double> positions;  // fm, family mean at each crossing
  double max_time_spread = 0.0;      // over pairs, relative to the mean crossing spacing
  double max_position_spread = 0.0;  // over the family, relative to the mean crossing spacing
};

namespace detail {

inline std::vector<double> pair_crossings(const Trajectory& u, const Trajectory& v) {
  auto d = [&](double t) { return closed_form_position(u, t) - closed_form_position(v, t); };
  std::vector<double> roots;
  const auto& smp = u.samples;
  double t_prev = smp.front().t, d_prev = d(t_prev);
  if (d_prev == 0.0) roots.push_back(t_prev);
  for (std::size_t i = 1; i < smp.size(); ++i) {
    const double t = smp[i].t, f = d(t);
    if (f == 0.0) {
      roots.push_back(t);
    } else if (d_prev != 0.0 && (f > 0.0) != (d_prev > 0.0)) {
      roots.push_back(numerics::bisect_then_secant(d, t_prev, t, d_prev, f, 1e-3 * (t - t_prev)));
    }
    t_prev = t;
    d_prev = f;
  }
  return roots;
}

}  // namespace detail

/// Times at which every pair of family members with different a crosses.
/// Pairs sharing a only touch at nodes, so they are left to the final spread
/// check over the whole family. Closed-form trajectories on one grid only.
inline CommonCrossingReport common_crossings(const std::vector<Trajectory>& family) {
  if (family.size() < 2) throw PreconditionError("common_crossings needs at least two trajectories");
  for (const auto& tr : family)
    if (!tr.is_closed_form() || tr.samples.size() != family.front().samples.size())
      throw PreconditionError("common_crossings needs closed-form trajectories on a shared grid");

  std::vector<std::vector<double>> roots;
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (family[i].params.signed_a() != family[j].params.signed_a())
        roots.push_back(detail::pair_crossings(family[i], family[j]));
  if (roots.empty()) throw PreconditionError("common_crossings needs members with different a");

  const auto& smp = family.front().samples;
  const double span = smp.back().t - smp.front().t;
  CommonCrossingReport r;
  for (double t0 : roots.front()) {
    bool common = true;
    for (const auto& rs : roots) {
      const auto it = std::lower_bound(rs.begin(), rs.end(), t0);
      double best = std::numeric_limits<double>::infinity();
      if (it != rs.end()) best = std::min(best, std::abs(*it - t0));
      if (it != rs.begin()) best = std::min(best, std::abs(*(it - 1) - t0));
      if (best > 1e-6 * span) {
        common = false;
        break;
      }
    }
    if (common) r.times.push_back(t0);
  }
  if (r.times.size() >= 2) {
    const double dt = (r.times.back() - r.times.front()) / static_cast<double>(r.times.size() - 1);
    for (double& t : r.times) {
      // refine to the mean over pairs
      double sum = 0.0;
      for (const auto& rs : roots) {
        const auto it = std::lower_bound(rs.begin(), rs.end(), t);
        double c = it != rs.end() ? *it : rs.back();
        if (it != rs.begin() && std::abs(*(it - 1) - t) < std::abs(c - t)) c = *(it - 1);
        r.max_time_spread = std::max(r.max_time_spread, std::abs(c - t) / dt);
        sum += c;
      }
      t = sum / static_cast<double>(roots.size());
    }
    for (double t : r.times) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
      for (const auto& tr : family) {
        const double x = closed_form_position(tr, t);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
      }
      r.positions.push_back(sum / static_cast<double>(family.size()));
      r.max_position_spread = std::max(r.max_position_spread, hi - lo);
    }
    const double dx_scale = std::abs(r.positions.back() - r.positions.front()) / static_cast<double>(r.positions.size() - 1);
    r.max_position_spread /= dx_scale;
  }
  return r;
}

struct ClassicalLimitReport {
  std::vector<double> epsilons;
  std::vector<double> deviations;  // fm
  std::vector<double> bounds;      // fm
  double exponent = std::numeric_limits<double>::quiet_NaN();
};

/// Largest orthogonal distance, in the (ct, x) plane, from the (a, b)
/// trajectory to the straight line x = beta c t + x0 over a window of
/// `intervals` node intervals of the unscaled scenario, for each hbar scale.
/// The bound is c sqrt(2 - beta^2) dt_n(eps); the exponent is the least-squares
/// slope of log(deviation) against log(eps).
inline ClassicalLimitReport classical_limit_scan(const Scenario& s, const MobiusParams& p,
                                                 const std::vector<double>& epsilons, double intervals = 3.0,
                                                 double samples_per_interval = 2000.0) {
  s.validate();
  if (epsilons.empty()) throw PreconditionError("classical_limit_scan needs at least one epsilon");
  if (intervals < 3.0) throw PreconditionError("classical-limit window must cover at least three node intervals");
  const OscillatoryMotion base = oscillatory_motion(s);
  const double window = intervals * base.node_dt;
  const double c = s.c();
  const double beta = base.velocity / c;
  ClassicalLimitReport r;
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) throw PreconditionError("epsilon must lie in (0, 1]");
    Scenario se = s;
    se.hbar_scale = s.hbar_scale * eps;
    const OscillatoryMotion m = oscillatory_motion(se);
    const Trajectory tr = trajectory_constant_allowed(se, p, TimeGrid{0.0, window, m.node_dt / samples_per_interval});
    double worst = 0.0;
    for (const auto& smp : tr.samples)
      worst = std::max(worst, std::abs(smp.x - beta * c * smp.t - p.x0) / std::sqrt(1.0 + beta * beta));
    r.epsilons.push_back(eps);
    r.deviations.push_back(worst);
    r.bounds.push_back(c * std::sqrt(2.0 - beta * beta) * m.node_dt);
  }
  if (r.epsilons.size() >= 2) {
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(r.epsilons.size());
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
      mx += std::log(r.epsilons[i]) / n;
      my += std::log(r.deviations[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
      const double dx = std::log(r.epsilons[i]) - mx;
      sxy += dx * (std::log(r.deviations[i]) - my);
      sxx += dx * dx;
    }
    r.exponent = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace rqt

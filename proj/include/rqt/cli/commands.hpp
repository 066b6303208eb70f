#pragma once

// Subcommands of the rqt tool. Each writes CSV files into cfg.out, prints a
// plain-text summary and returns the process exit code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rqt/action.hpp"
#include "rqt/cli/config.hpp"
#include "rqt/errors.hpp"
#include "rqt/io/csv.hpp"
#include "rqt/kg.hpp"
#include "rqt/nodes.hpp"
#include "rqt/scenario.hpp"
#include "rqt/tolerances.hpp"
#include "rqt/trajectory.hpp"

namespace rqt::cli {

namespace detail {

using io::format_number;

inline Scenario scenario_or(const RunConfig& cfg, const Scenario& fallback) {
  Scenario s = cfg.scenario.value_or(fallback);
  if (cfg.hbar_scale) s.hbar_scale = *cfg.hbar_scale;
  s.validate();
  return s;
}

inline Scenario electron_at(double energy, Potential v = Potential::constant(0.0)) {
  return Scenario::make(Species::electron(), v, energy);
}

inline std::vector<MobiusParams> family_or(const RunConfig& cfg, const std::vector<AbPair>& fallback, double x0) {
  std::vector<MobiusParams> out;
  for (const auto& ab : cfg.ab_list.empty() ? fallback : cfg.ab_list) out.push_back(MobiusParams::make(ab.a, ab.b, x0));
  return out;
}

inline const std::vector<AbPair>& default_family() {
  static const std::vector<AbPair> f{{1.0, 0.0}, {4.0, 2.0}, {0.5, -1.0}};
  return f;
}

inline std::string species_name(const Scenario& s) {
  if (s.species.is_photon()) return "photon";
  if (s.species.rest_energy == Species::electron().rest_energy) return "electron";
  return "massive m0c2=" + format_number(s.species.rest_energy) + " MeV";
}

inline std::string potential_name(const Scenario& s) {
  if (s.potential.is_constant()) return "constant U0=" + format_number(s.potential.parameter()) + " MeV";
  return "linear g=" + format_number(s.potential.parameter()) + " MeV/fm";
}

inline io::HeaderLines scenario_header(const Scenario& s, const RunConfig& cfg) {
  io::HeaderLines h{{"species", species_name(s)},
                    {"energy_mev", format_number(s.energy)},
                    {"potential", potential_name(s)},
                    {"hbar_scale", format_number(s.hbar_scale)}};
  for (const auto& [k, v] : cfg.echo) h.emplace_back("config." + k, v);
  return h;
}

inline io::HeaderLines with_params(io::HeaderLines h, const MobiusParams& p) {
  h.emplace_back("a", format_number(p.signed_a()));
  h.emplace_back("b", format_number(p.signed_b()));
  h.emplace_back("x0_fm", format_number(p.x0));
  return h;
}

struct Out {
  const RunConfig& cfg;
  std::ostream& text;

  std::string path(const std::string& name) const {
    std::filesystem::create_directories(cfg.out);
    return (std::filesystem::path(cfg.out) / name).string();
  }
  double length(double fm) const { return cfg.si_output ? units::fm_to_m(fm) : fm; }
  std::string length_col(const std::string& stem) const { return stem + (cfg.si_output ? "_m" : "_fm"); }
};

inline void write_trajectory(const Out& o, const std::string& name, const Trajectory& tr, io::HeaderLines h) {
  h = with_params(std::move(h), tr.params);
  h.emplace_back("kind", to_string(tr.kind));
  if (tr.turning_point) h.emplace_back("truncated_at_fm", format_number(*tr.turning_point));
  auto f = io::open_output(o.path(name));
  io::CsvWriter w(f, h, {"t_s", o.length_col("x")});
  for (const auto& s : tr.samples) w.row({s.t, o.length(s.x)});
}

inline void write_node_rows(const Out& o, const std::string& name, io::HeaderLines h, const std::vector<double>& t,
                            const std::vector<double>& x, const std::vector<double>& dx,
                            const std::vector<double>& lambda_half) {
  auto f = io::open_output(o.path(name));
  io::CsvWriter w(f, h, {"n", "t_n_s", o.length_col("x_n"), o.length_col("dx"), o.length_col("lambda_half"), "ratio"});
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = i < dx.size() ? dx[i] : std::nan("");
    const double l = i < lambda_half.size() ? lambda_half[i] : std::nan("");
    w.row({static_cast<double>(i), i < t.size() ? t[i] : std::nan(""), o.length(x[i]), o.length(d), o.length(l), d / l});
  }
}

inline double turning_point_of(const Scenario& s) {
  if (s.potential.is_constant() || !(s.potential.parameter() > 0.0))
    throw ConfigError("a linear potential with g > 0 is required here");
  return (s.energy - s.species.rest_energy) / s.potential.parameter();
}

inline KgBasis linear_basis(const RunConfig& cfg, const Scenario& s, double x_min_default) {
  const double tp = turning_point_of(s);
  const double lo = cfg.x_min.value_or(x_min_default);
  const double hi = cfg.x_max.value_or(tp + 2.0);
  return kg_solve_numeric(s, lo, hi, KgSolveOptions{cfg.method, cfg.step, 1e-2});
}

/// Last zero of phi2 before the turning point: residual scans on the ODE path
/// stop there, since beyond it x(t) creeps toward the turning point over an
/// unbounded time.
inline double last_node_before(const KgBasis& b, double x) {
  const auto& z = b.phi2_zeros();
  const auto it = std::lower_bound(z.begin(), z.end(), x);
  if (it == z.begin()) throw PreconditionError("no node before the turning point");
  return *(it - 1);
}

struct Checks {
  std::ostream& text;
  bool ok = true;
  void operator()(const std::string& name, bool pass, double value, double bound) {
    text << "check " << name << ": " << (pass ? "PASS" : "FAIL") << " (value " << format_number(value) << ", bound "
         << format_number(bound) << ")\n";
    ok = ok && pass;
  }
  void le(const std::string& name, double value, double bound) { (*this)(name, value <= bound, value, bound); }
};

inline Trajectory constant_trajectory(const Scenario& s, const MobiusParams& p, const TimeGrid& g) {
  return s.species.is_photon() ? trajectory_photon(s, p, g) : trajectory_constant_allowed(s, p, g);
}

inline bool allowed_constant(const Scenario& s) {
  if (!s.potential.is_constant()) return false;
  const double q = s.available(0.0);
  return q * q - s.mass_sq() > turning_tolerance(s);
}

}  // namespace detail

/// Figure datasets. 1: electron family at E = 2 MeV; 2: forbidden-region
/// electron; 3: photon family at E = 1.2 MeV; 4: electron in a linear potential
/// starting at x = -5400 fm.
inline int cmd_figure(int id, const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const std::string tag = "fig" + std::to_string(id);
  if (id == 1 || id == 3) {
    const Scenario s =
        scenario_or(cfg, id == 1 ? electron_at(2.0) : Scenario::make(Species::photon(), Potential::constant(0.0), 1.2));
    if ((id == 3) != s.species.is_photon())
      throw ConfigError(id == 3 ? "figure 3 needs a massless species" : "figure 1 needs a massive species");
    if (!allowed_constant(s)) throw ConfigError(tag + " needs a constant potential in a classically allowed region");
    const OscillatoryMotion m = oscillatory_motion(s);
    const TimeGrid g{cfg.t_min.value_or(0.0), cfg.t_max.value_or(4.0 * m.node_dt), cfg.dt.value_or(m.node_dt / 400.0)};
    const double x0 = cfg.x0.value_or(0.0);
    const auto family = family_or(cfg, default_family(), x0);
    std::vector<Trajectory> trs;
    for (std::size_t i = 0; i < family.size(); ++i) {
      trs.push_back(constant_trajectory(s, family[i], g));
      write_trajectory(o, tag + "_traj_" + std::to_string(i) + ".csv", trs.back(), scenario_header(s, cfg));
    }
    const long n_first = static_cast<long>(std::ceil(g.t_min / m.node_dt - 0.5));
    const auto count = static_cast<std::size_t>(std::max(2.0, std::floor(g.t_max / m.node_dt - 0.5) - n_first + 1));
    const NodeReport nr = nodes_constant(s, n_first, count, x0);
    std::vector<double> lh(nr.node_positions.size(), 0.5 * nr.lambda);
    std::vector<double> dx(nr.node_positions.size(), nr.dx());
    write_node_rows(o, tag + "_nodes.csv", scenario_header(s, cfg), nr.node_times, nr.node_positions, dx, lh);
    text << tag << ": " << family.size() << " trajectories, " << trs.front().samples.size() << " samples each\n";
    text << "node dt_s " << format_number(nr.dt_spacing) << "\n";
    text << "node dx_m " << format_number(units::fm_to_m(nr.dx())) << "\n";
    const bool mixed = std::any_of(family.begin(), family.end(),
                                   [&](const auto& p) { return p.signed_a() != family.front().signed_a(); });
    if (mixed) {
      const CommonCrossingReport cc = common_crossings(trs);
      text << "common crossings: " << cc.times.size() << " (time spread " << format_number(cc.max_time_spread)
           << ", position spread " << format_number(cc.max_position_spread) << " node spacings)\n";
    }
    return 0;
  }
  if (id == 2) {
    const Scenario s = scenario_or(cfg, electron_at(2.0, Potential::constant(1.7)));
    const ForbiddenMotion m = forbidden_motion(s);
    const double period = std::numbers::pi / std::abs(m.rate);
    const TimeGrid g{cfg.t_min.value_or(0.0), cfg.t_max.value_or(2.0 * period), cfg.dt.value_or(period / 2000.0)};
    const auto family = family_or(cfg, {{4.0, 2.0}}, cfg.x0.value_or(0.0));
    text << "fig2: forbidden region, kappa_fm^-1 " << format_number(m.kappa) << "\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
      const ForbiddenTrajectory ft = trajectory_constant_forbidden(s, family[i], g, cfg.clip_ceiling);
      write_trajectory(o, tag + "_traj_" + std::to_string(i) + ".csv", ft.trajectory, scenario_header(s, cfg));
      const auto brackets = sampled_divergence_brackets(ft.trajectory);
      text << "trajectory " << i << " (a " << format_number(family[i].signed_a()) << ", b "
           << format_number(family[i].signed_b()) << "): " << brackets.size() << " sampled blow-ups\n";
      for (const auto& e : ft.divergences) {
        const bool seen = std::any_of(brackets.begin(), brackets.end(),
                                      [&](const auto& br) { return e.t_star >= br.first && e.t_star <= br.second; });
        text << "  t_star_s " << format_number(e.t_star) << " x -> " << (e.direction > 0 ? "+inf" : "-inf")
             << (seen ? " (bracketed)" : " (not bracketed)") << "\n";
      }
    }
    text << "nodes: none\n";
    return 0;
  }
  if (id == 4) {
    const Scenario s = scenario_or(cfg, electron_at(2.0, Potential::linear(0.25)));
    const double tp = turning_point_of(s);
    const double x0 = cfg.x0.value_or(-5400.0);
    const KgBasis basis = linear_basis(cfg, s, x0);
    const auto family = family_or(cfg, default_family(), x0);
    std::vector<double> node_t;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const Trajectory tr = trajectory_ode(s, basis, family[i], XRange{x0, tp + 1.0}, cfg.samples.value_or(4000));
      if (i == 0) node_t = tr.node_times;
      write_trajectory(o, tag + "_traj_" + std::to_string(i) + ".csv", tr, scenario_header(s, cfg));
    }
    const LocalMomentumReport lm = local_momentum_check(basis);
    const auto& z = basis.phi2_zeros();
    std::vector<double> lh;
    for (double p : lm.local_momentum) lh.push_back(std::numbers::pi * s.hbar() / p);
    write_node_rows(o, tag + "_nodes.csv", scenario_header(s, cfg), node_t, z, lm.spacings, lh);
    text << "fig4: linear potential, turning point x_m " << format_number(units::fm_to_m(tp)) << "\n";
    text << "basis: " << basis.description() << ", " << z.size() << " nodes\n";
    text << "node spacing increasing toward turning point: " << (lm.spacing_increasing ? "yes" : "no") << "\n";
    text << "max |pi hbar/dx / p(mid) - 1|: " << format_number(lm.max_relative_deviation) << "\n";
    return 0;
  }
  throw ConfigError("figure id must be 1, 2, 3 or 4");
}

/// Node, wavelength and momentum summary with pass/fail checks.
inline int cmd_report(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  Checks check{text};
  text << "scenario: " << species_name(s) << ", E " << format_number(s.energy) << " MeV, " << potential_name(s)
       << ", hbar_scale " << format_number(s.hbar_scale) << "\n";
  const std::vector<double> grid_a{0.5, 1.0, 4.0}, grid_b{-2.0, 0.0, 2.0};

  if (s.potential.is_constant() && !allowed_constant(s)) {
    const KgBasis b = kg_closed_constant(s);
    text << "region: forbidden\n";
    text << "nodes: none\n";
    check.le("no_nodes", static_cast<double>(nodes_numeric(b).size()), 0.0);
    check.le("wronskian_drift", wronskian_drift(b), tol::wronskian_closed);
    return check.ok ? 0 : 1;
  }

  if (s.potential.is_constant()) {
    const NodeReport nr = nodes_constant(s);
    const double hb = s.hbar();
    text << "dt_n_s " << format_number(nr.dt_spacing) << "\n";
    text << "dx_n_m " << format_number(units::fm_to_m(nr.dx())) << "\n";
    text << "lambda_m " << format_number(units::fm_to_m(nr.lambda)) << "\n";
    text << "lambda_half_m " << format_number(units::fm_to_m(0.5 * nr.lambda)) << "\n";
    text << "ratio " << format_number(nr.ratio) << "\n";
    text << "mean_momentum_mev_s_per_fm " << format_number(nr.mean_momentum) << "\n";
    text << "classical_momentum_mev_s_per_fm " << format_number(nr.classical_momentum) << "\n";
    std::vector<double> lh(nr.node_positions.size(), 0.5 * nr.lambda), dx(nr.node_positions.size(), nr.dx());
    write_node_rows(o, "report_nodes.csv", scenario_header(s, cfg), nr.node_times, nr.node_positions, dx, lh);

    check.le("de_broglie_ratio", std::abs(de_broglie_check(s, nr) - 1.0), tol::de_broglie);
    check.le("mean_momentum", std::abs(nr.mean_momentum / nr.classical_momentum - 1.0), tol::action_quantum);
    const KgBasis b = kg_closed_constant(s);
    check.le("wronskian_drift", wronskian_drift(b), tol::wronskian_closed);
    const auto& z = b.phi2_zeros();
    const auto mid = std::upper_bound(z.begin(), z.end(), 0.0);
    double quantum = 0.0;
    for (double a : grid_a)
      for (double bb : grid_b)
        quantum = std::max(quantum, std::abs(action_increment(b, MobiusParams::make(a, bb), *(mid - 1), *mid) /
                                                 (std::numbers::pi * hb) -
                                             1.0));
    check.le("action_quantum", quantum, tol::action_quantum);

    const OscillatoryMotion m = oscillatory_motion(s);
    std::vector<Trajectory> fam;
    for (double a : grid_a)
      for (double bb : grid_b)
        fam.push_back(constant_trajectory(s, MobiusParams::make(a, bb), TimeGrid{0.0, 4.0 * m.node_dt, m.node_dt / 400.0}));
    const CommonCrossingReport cc = common_crossings(fam);
    double law = cc.times.size() >= 2 ? 0.0 : 1.0;
    for (std::size_t i = 1; i < cc.times.size(); ++i) {
      law = std::max(law, std::abs((cc.times[i] - cc.times[i - 1]) / m.node_dt - 1.0));
      law = std::max(law, std::abs((cc.positions[i] - cc.positions[i - 1]) / m.node_dx - 1.0));
    }
    text << "common crossings: " << cc.times.size() << "\n";
    check.le("node_law", law, tol::node_law);
    return check.ok ? 0 : 1;
  }

  const double tp = turning_point_of(s);
  const KgBasis b = linear_basis(cfg, s, -5400.0);
  const LocalMomentumReport lm = local_momentum_check(b);
  const auto& z = b.phi2_zeros();
  text << "turning_point_m " << format_number(units::fm_to_m(tp)) << "\n";
  text << "basis: " << b.description() << ", domain_fm [" << format_number(b.domain().lo) << ", "
       << format_number(b.domain().hi) << "]\n";
  text << "nodes " << z.size() << "\n";
  text << "dx_first_m " << format_number(units::fm_to_m(lm.spacings.front())) << "\n";
  text << "dx_last_m " << format_number(units::fm_to_m(lm.spacings.back())) << "\n";
  std::vector<double> lh;
  for (double p : lm.local_momentum) lh.push_back(std::numbers::pi * s.hbar() / p);
  write_node_rows(o, "report_nodes.csv", scenario_header(s, cfg), {}, z, lm.spacings, lh);
  check.le("wronskian_drift", wronskian_drift(b), tol::wronskian_numeric);
  check.le("kg_residual", klein_gordon_residual(b), tol::kg_fd_residual);
  check("spacing_increasing", lm.spacing_increasing, lm.spacing_increasing ? 1.0 : 0.0, 1.0);
  check.le("local_momentum", lm.max_relative_deviation, tol::linear_local_momentum);
  double quantum = 0.0;
  const std::size_t stride = std::max<std::size_t>(1, z.size() / 16);
  for (std::size_t i = 0; i + 1 < z.size(); i += stride)
    for (double a : grid_a)
      for (double bb : grid_b)
        quantum = std::max(quantum, std::abs(action_increment(b, MobiusParams::make(a, bb, b.domain().lo), z[i], z[i + 1]) /
                                                 (std::numbers::pi * s.hbar()) -
                                             1.0));
  check.le("action_quantum", quantum, tol::action_quantum);
  return check.ok ? 0 : 1;
}

/// Residual scans: RQSHJE along x, the trajectory equation and the
/// velocity-momentum relation along (t, x). For constant potentials (a, b)
/// label the closed-form trajectory; the RQSHJE uses them as action constants.
inline int cmd_residuals(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  Checks check{text};
  const auto family = family_or(cfg, {{1.0, 0.0}, {4.0, 2.0}}, 0.0);
  const std::size_t n_x = cfg.samples.value_or(401);

  auto scan = [&](const KgBasis& b, const MobiusParams& p, double lo, double hi, const std::string& name) {
    auto f = io::open_output(o.path(name));
    io::CsvWriter w(f, with_params(scenario_header(s, cfg), p), {"x_fm", "s0_mev_s", "ds0dx", "residual"});
    double worst = 0.0;
    for (std::size_t i = 0; i < n_x; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_x - 1);
      const ActionSample a = reduced_action(b, p, x);
      const double r = rqshje_residual(b, p, x);
      worst = std::max(worst, r);
      w.row({x, a.s0, a.ds0_dx, r});
    }
    return worst;
  };
  auto trajectory_scan = [&](const Trajectory& tr, const std::string& name) {
    auto f = io::open_output(o.path(name));
    io::CsvWriter w(f, with_params(scenario_header(s, cfg), tr.params), {"t_s", o.length_col("x"), "residual"});
    double worst = 0.0;
    for (const auto& r : firqnl_profile(tr)) {
      worst = std::max(worst, r.residual);
      w.row({r.t, o.length(r.x), r.residual});
    }
    return worst;
  };

  for (std::size_t i = 0; i < family.size(); ++i) {
    const MobiusParams& p = family[i];
    const bool straight = p.a == 1.0 && p.b == 0.0;
    const std::string id = std::to_string(i);
    text << "(a, b) = (" << format_number(p.signed_a()) << ", " << format_number(p.signed_b()) << ")\n";
    if (s.potential.is_constant()) {
      const KgBasis b = kg_closed_constant(s);
      const double scale = b.closed_kind() == ClosedFormKind::Trigonometric ? std::numbers::pi / b.closed_wavenumber()
                                                                            : 1.0 / b.closed_wavenumber();
      const double rq = scan(b, p, -3.0 * scale, 3.0 * scale, "residuals_" + id + ".csv");
      check.le("rqshje_" + id, rq, straight ? tol::analytic_vanishing : tol::rqshje_general);
      if (!allowed_constant(s)) {
        text << "trajectory residuals skipped in the forbidden region\n";
        continue;
      }
      const OscillatoryMotion m = oscillatory_motion(s);
      const Trajectory tr =
          constant_trajectory(s, p, TimeGrid{0.0, 3.0 * m.node_dt, cfg.dt.value_or(m.node_dt / 1000.0)});
      const double fq = trajectory_scan(tr, "trajectory_residuals_" + id + ".csv");
      check.le("firqnl_" + id, fq, straight ? tol::analytic_vanishing : tol::firqnl_general);
      check.le("velocity_momentum_" + id, velocity_momentum_check(tr, b, *tr.action),
               straight ? tol::analytic_vanishing : tol::velocity_momentum);
    } else {
      const double tp = turning_point_of(s);
      const KgBasis b = linear_basis(cfg, s, -600.0);
      const double lo = b.domain().lo;
      const double rq = scan(b, p, lo + 1.0, tp - 0.5, "residuals_" + id + ".csv");
      check.le("rqshje_" + id, rq, tol::rqshje_linear);
      if (i == 0) check.le("kg_residual", klein_gordon_residual(b), tol::kg_fd_residual);
      MobiusParams q = p;
      q.x0 = lo;
      const Trajectory tr = trajectory_ode(s, b, q, XRange{lo, last_node_before(b, tp)}, 16, resolved_per_interval(q));
      const double fq = trajectory_scan(tr, "trajectory_residuals_" + id + ".csv");
      check.le("firqnl_" + id, fq, tol::firqnl_general);
      check.le("velocity_momentum_" + id, velocity_momentum_check(tr, b, q), tol::velocity_momentum);
    }
  }
  return check.ok ? 0 : 1;
}

/// One trajectory CSV per (a, b) for whatever scenario is configured.
inline int cmd_trajectory(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  const double x0 = cfg.x0.value_or(s.potential.is_constant() ? 0.0 : -5400.0);
  const auto family = family_or(cfg, default_family(), x0);
  if (!s.potential.is_constant()) {
    const double tp = turning_point_of(s);
    const KgBasis b = linear_basis(cfg, s, x0);
    for (std::size_t i = 0; i < family.size(); ++i) {
      const Trajectory tr = trajectory_ode(s, b, family[i], XRange{x0, tp + 1.0}, cfg.samples.value_or(4000));
      write_trajectory(o, "trajectory_" + std::to_string(i) + ".csv", tr, scenario_header(s, cfg));
      text << "trajectory " << i << ": " << tr.samples.size() << " samples, " << to_string(tr.kind) << "\n";
    }
    return 0;
  }
  if (allowed_constant(s)) {
    const OscillatoryMotion m = oscillatory_motion(s);
    const TimeGrid g{cfg.t_min.value_or(0.0), cfg.t_max.value_or(4.0 * m.node_dt), cfg.dt.value_or(m.node_dt / 400.0)};
    for (std::size_t i = 0; i < family.size(); ++i) {
      const Trajectory tr = constant_trajectory(s, family[i], g);
      write_trajectory(o, "trajectory_" + std::to_string(i) + ".csv", tr, scenario_header(s, cfg));
      text << "trajectory " << i << ": " << tr.samples.size() << " samples, " << to_string(tr.kind) << "\n";
    }
    return 0;
  }
  const ForbiddenMotion m = forbidden_motion(s);
  const double period = std::numbers::pi / std::abs(m.rate);
  const TimeGrid g{cfg.t_min.value_or(0.0), cfg.t_max.value_or(2.0 * period), cfg.dt.value_or(period / 2000.0)};
  for (std::size_t i = 0; i < family.size(); ++i) {
    const ForbiddenTrajectory ft = trajectory_constant_forbidden(s, family[i], g, cfg.clip_ceiling);
    write_trajectory(o, "trajectory_" + std::to_string(i) + ".csv", ft.trajectory, scenario_header(s, cfg));
    text << "trajectory " << i << ": " << ft.trajectory.samples.size() << " samples, " << ft.divergences.size()
         << " divergences\n";
  }
  return 0;
}

/// Node table: analytic for constant potentials, zeros of phi2 otherwise.
inline int cmd_nodes(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  if (s.potential.is_constant() && !allowed_constant(s)) {
    write_node_rows(o, "nodes.csv", scenario_header(s, cfg), {}, {}, {}, {});
    text << "nodes: none\n";
    return 0;
  }
  if (s.potential.is_constant()) {
    const NodeReport nr = nodes_constant(s, 0, cfg.samples.value_or(16), cfg.x0.value_or(0.0));
    std::vector<double> lh(nr.node_positions.size(), 0.5 * nr.lambda), dx(nr.node_positions.size(), nr.dx());
    write_node_rows(o, "nodes.csv", scenario_header(s, cfg), nr.node_times, nr.node_positions, dx, lh);
    text << "nodes " << nr.node_positions.size() << ", dx_m " << format_number(units::fm_to_m(nr.dx())) << ", ratio "
         << format_number(nr.ratio) << "\n";
    return 0;
  }
  const KgBasis b = linear_basis(cfg, s, -600.0);
  const LocalMomentumReport lm = local_momentum_check(b);
  std::vector<double> lh;
  for (double p : lm.local_momentum) lh.push_back(std::numbers::pi * s.hbar() / p);
  write_node_rows(o, "nodes.csv", scenario_header(s, cfg), {}, b.phi2_zeros(), lm.spacings, lh);
  text << "nodes " << b.phi2_zeros().size() << ", spacing increasing: " << (lm.spacing_increasing ? "yes" : "no")
       << ", max local momentum deviation " << format_number(lm.max_relative_deviation) << "\n";
  return 0;
}

/// Numeric Klein-Gordon basis dump with quality metrics.
inline int cmd_kg_solve(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  double lo = 0.0, hi = 0.0;
  if (s.potential.is_constant()) {
    const double q = s.available(0.0);
    const double scale = s.hbar_c() / std::sqrt(std::abs(q * q - s.mass_sq()));
    lo = cfg.x_min.value_or(0.0);
    hi = cfg.x_max.value_or(lo + 20.0 * std::numbers::pi * scale);
  } else {
    lo = cfg.x_min.value_or(-600.0);
    hi = cfg.x_max.value_or(turning_point_of(s) + 2.0);
  }
  const KgBasis b = kg_solve_numeric(s, lo, hi, KgSolveOptions{cfg.method, cfg.step, 1e-2});
  const std::size_t n = b.sample_count();
  const std::size_t stride = cfg.samples ? std::max<std::size_t>(1, n / *cfg.samples) : 1;
  auto f = io::open_output(o.path("kg_basis.csv"));
  auto h = scenario_header(s, cfg);
  h.emplace_back("source", b.description());
  io::CsvWriter w(f, h, {"x_fm", "phi1", "phi2", "dphi1", "dphi2"});
  for (std::size_t i = 0; i < n; i += stride) {
    const BasisPoint v = b.sample(i);
    w.row({b.sample_position(i), v.phi1, v.phi2, v.dphi1, v.dphi2});
  }
  text << "basis: " << b.description() << ", " << n << " stored samples, " << b.phi2_zeros().size() << " zeros\n";
  text << "wronskian_drift " << format_number(wronskian_drift(b)) << "\n";
  text << "kg_residual " << format_number(klein_gordon_residual(b)) << "\n";
  return 0;
}

/// Deviation from the straight line as hbar is scaled down.
inline int cmd_classical_limit(const RunConfig& cfg, std::ostream& text) {
  using namespace detail;
  const Out o{cfg, text};
  const Scenario s = scenario_or(cfg, electron_at(2.0));
  const auto family = family_or(cfg, {{4.0, 2.0}}, cfg.x0.value_or(0.0));
  const ClassicalLimitReport r = classical_limit_scan(s, family.front(), cfg.epsilons);
  auto f = io::open_output(o.path("classical_limit.csv"));
  io::CsvWriter w(f, with_params(scenario_header(s, cfg), family.front()), {"epsilon", "deviation_m", "bound_m"});
  Checks check{text};
  bool monotone = true, bounded = true;
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
    w.row({r.epsilons[i], units::fm_to_m(r.deviations[i]), units::fm_to_m(r.bounds[i])});
    bounded = bounded && r.deviations[i] <= r.bounds[i];
    for (std::size_t j = 0; j < r.epsilons.size(); ++j)
      if (r.epsilons[j] < r.epsilons[i] && !(r.deviations[j] < r.deviations[i])) monotone = false;
  }
  text << "exponent " << format_number(r.exponent) << "\n";
  check("deviation_decreasing", monotone, monotone ? 1.0 : 0.0, 1.0);
  check("within_bound", bounded, bounded ? 1.0 : 0.0, 1.0);
  if (r.epsilons.size() >= 2)
    check("exponent", r.exponent >= tol::exponent_lo && r.exponent <= tol::exponent_hi, r.exponent, tol::exponent_hi);
  return check.ok ? 0 : 1;
}

}  // namespace rqt::cli

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rqt/trajectory.hpp"
#include "rqt/tolerances.hpp"

using namespace rqt;

namespace ref {
constexpr double c = 2.99792458e23;
constexpr double k_e2 = 9.799057302471633e-3;       // fm^-1
constexpr double omega_e2 = 2.8401793935102685e21;  // s^-1, (E^2 - m^2) / (hbar E)
constexpr double dt_e2 = 1.106124726053659e-21;     // s
constexpr double dx_e2 = 320.6015187601142;         // fm
constexpr double slope_e2 = 0.9668091943474288;     // units of c
constexpr double dx_ph12 = 516.6008267650468;       // fm
constexpr double rate_03 = 8.665897821477394e20;    // s^-1, E - U0 = 0.3 MeV
constexpr double t_plus_03 = 1.812618102768146e-21;   // s, x -> +inf for (4, 2)
constexpr double t_minus_03 = 3.0902107314859168e-21; // s, x -> -inf for (4, 2)
constexpr double offset_42 = 112.9852274172162;     // fm, arctan(2) / k
}  // namespace ref

namespace {

const Scenario& photon12() {
  static const Scenario s = Scenario::make(Species::photon(), Potential::constant(0.0), 1.2);
  return s;
}

const Scenario& linear() {
  static const Scenario s = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  return s;
}

}  // namespace

TEST(Motion, FrozenScales) {
  const OscillatoryMotion m = oscillatory_motion(Scenario{});
  EXPECT_NEAR(m.k / ref::k_e2, 1.0, 1e-14);
  EXPECT_NEAR(m.omega / ref::omega_e2, 1.0, 1e-14);
  EXPECT_NEAR(m.node_dt / ref::dt_e2, 1.0, 1e-14);
  EXPECT_NEAR(m.node_dx / ref::dx_e2, 1.0, 1e-14);
  EXPECT_NEAR(m.node_dt / 1.10612e-21, 1.0, 1e-5);
  EXPECT_NEAR(m.velocity / ref::c / ref::slope_e2, 1.0, 1e-14);
  const OscillatoryMotion ph = oscillatory_motion(photon12());
  EXPECT_NEAR(ph.node_dx / ref::dx_ph12, 1.0, 1e-14);
  EXPECT_NEAR(ph.velocity / ref::c, 1.0, 1e-15);
}

TEST(Motion, Errors) {
  EXPECT_THROW(oscillatory_motion(linear()), PreconditionError);
  EXPECT_THROW(oscillatory_motion(Scenario::make(Species::electron(), Potential::constant(2.0), 2.0)), SingularEnergyError);
  EXPECT_THROW(oscillatory_motion(Scenario::make(Species::electron(), Potential::constant(2.0 - 0.510998950), 2.0)),
               DegenerateBasisError);
  EXPECT_THROW(oscillatory_motion(Scenario::make(Species::electron(), Potential::constant(1.7), 2.0)), PreconditionError);
  EXPECT_THROW(forbidden_motion(Scenario{}), PreconditionError);
  EXPECT_THROW(forbidden_motion(photon12()), PreconditionError);
}

TEST(ClosedForm, StraightLines) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  const TimeGrid g{0.0, 4.0 * m.node_dt, m.node_dt / 400.0};
  const Trajectory tr = trajectory_constant_allowed(s, MobiusParams::make(1.0, 0.0), g);
  double worst = 0.0;
  for (const auto& smp : tr.samples)
    if (smp.t > 0.0) worst = std::max(worst, std::abs(smp.x / smp.t / (ref::slope_e2 * ref::c) - 1.0));
  EXPECT_LE(worst, tol::straight_slope);
  const Trajectory ph = trajectory_photon(photon12(), MobiusParams::make(1.0, 0.0), g);
  worst = 0.0;
  for (const auto& smp : ph.samples)
    if (smp.t > 0.0) worst = std::max(worst, std::abs(smp.x / smp.t / ref::c - 1.0));
  EXPECT_LE(worst, tol::straight_slope);
}

TEST(ClosedForm, FamilySharesNodes) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{4.0, 2.0}, std::pair{0.5, -1.0}, std::pair{-3.0, 1.0}}) {
    const auto p = MobiusParams::make(a, b, 25.0);
    for (int n = -3; n <= 3; ++n) {
      const double t = (n + 0.5) * ref::dt_e2;
      const double want = p.direction() * (n + 0.5) * ref::dx_e2 + 25.0;
      EXPECT_NEAR(oscillatory_position(m, p, t), want, 1e-9 * ref::dx_e2) << a << "," << b << " n=" << n;
    }
  }
}

TEST(ClosedForm, StartOffsetAndContinuity) {
  const OscillatoryMotion m = oscillatory_motion(Scenario{});
  const auto p = MobiusParams::make(4.0, 2.0);
  EXPECT_NEAR(oscillatory_position(m, p, 0.0), ref::offset_42, 1e-10);
  // No jumps where the phase passes odd multiples of pi / 2.
  double prev = oscillatory_position(m, p, 0.0), worst = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    const double x = oscillatory_position(m, p, i * ref::dt_e2 / 1000.0);
    worst = std::max(worst, std::abs(x - prev));
    prev = x;
  }
  EXPECT_LT(worst, 0.05 * ref::dx_e2);
}

TEST(ClosedForm, GridIncludesNodeTimes) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  const Trajectory tr = trajectory_constant_allowed(s, MobiusParams::make(4.0, 2.0), TimeGrid{0.0, 3.0 * m.node_dt, m.node_dt / 7.0});
  ASSERT_EQ(tr.node_times.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(tr.node_times[i] / ((i + 0.5) * ref::dt_e2), 1.0, 1e-14);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
  ASSERT_TRUE(tr.action.has_value());
  EXPECT_DOUBLE_EQ(tr.action->a, 0.25);
  EXPECT_THROW(trajectory_constant_allowed(photon12(), MobiusParams::make(1.0, 0.0), TimeGrid{0.0, 1e-21, 1e-23}),
               PreconditionError);
  EXPECT_THROW(trajectory_photon(s, MobiusParams::make(1.0, 0.0), TimeGrid{0.0, 1e-21, 1e-23}), PreconditionError);
  EXPECT_THROW(trajectory_constant_allowed(s, MobiusParams::make(1.0, 0.0), TimeGrid{0.0, 1e-21, 0.0}), PreconditionError);
}

TEST(ClosedForm, PhotonBelowPotentialMatchesAbsoluteEnergyGap) {
  const Scenario above = Scenario::make(Species::photon(), Potential::constant(2.4), 1.2);
  const TimeGrid g{0.0, 5e-21, 2e-24};
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{4.0, 2.0}}) {
    const Trajectory t1 = trajectory_photon(above, MobiusParams::make(a, b), g);
    const Trajectory t2 = trajectory_photon(photon12(), MobiusParams::make(a, b), g);
    ASSERT_EQ(t1.samples.size(), t2.samples.size());
    for (std::size_t i = 0; i < t1.samples.size(); ++i) EXPECT_DOUBLE_EQ(t1.samples[i].x, t2.samples[i].x);
  }
}

TEST(Forbidden, DivergenceTimesAndBrackets) {
  const Scenario s = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  const ForbiddenMotion m = forbidden_motion(s);
  EXPECT_NEAR(m.rate / ref::rate_03, 1.0, 1e-14);
  const double period = std::numbers::pi / m.rate;
  const ForbiddenTrajectory ft =
      trajectory_constant_forbidden(s, MobiusParams::make(4.0, 2.0), TimeGrid{0.0, period, period / 2000.0}, 1e6);
  ASSERT_EQ(ft.divergences.size(), 2u);
  EXPECT_NEAR(ft.divergences[0].t_star / ref::t_plus_03, 1.0, 1e-14);
  EXPECT_EQ(ft.divergences[0].direction, +1);
  EXPECT_NEAR(ft.divergences[1].t_star / ref::t_minus_03, 1.0, 1e-14);
  EXPECT_EQ(ft.divergences[1].direction, -1);
  const auto brackets = sampled_divergence_brackets(ft.trajectory);
  ASSERT_EQ(brackets.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LE(brackets[i].first, ft.divergences[i].t_star);
    EXPECT_GE(brackets[i].second, ft.divergences[i].t_star);
    EXPECT_LE(brackets[i].second - brackets[i].first, 2.0 * period / 2000.0 * 1.0000001);
  }
  for (const auto& smp : ft.trajectory.samples) EXPECT_LE(std::abs(smp.x), 1e6);
  // (a, b) -> (-a, -b) leaves the forbidden trajectory unchanged.
  const double t = 0.3 * period;
  EXPECT_DOUBLE_EQ(forbidden_position(m, MobiusParams::make(-4.0, -2.0), t), forbidden_position(m, MobiusParams::make(4.0, 2.0), t));
}

TEST(Ode, MatchesClosedFormOnConstantPotential) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  const KgBasis b = kg_closed_constant(s);
  for (auto [a, bb] : {std::pair{1.0, 0.0}, std::pair{4.0, 2.0}, std::pair{0.5, -1.0}}) {
    const auto traj = MobiusParams::make(a, bb);
    MobiusParams act = action_params_from_trajectory(traj);
    act.x0 = std::atan(bb) / m.k;
    const Trajectory tr = trajectory_ode(s, b, act, XRange{act.x0, act.x0 + 3.5 * m.node_dx}, 2000);
    EXPECT_EQ(tr.kind, TrajectoryKind::OdeGeneral);
    EXPECT_GE(tr.node_times.size(), 3u);
    double worst = 0.0;
    for (const auto& smp : tr.samples) worst = std::max(worst, std::abs(smp.x - oscillatory_position(m, traj, smp.t)));
    EXPECT_LE(worst, tol::ode_oracle * m.node_dx) << a << "," << bb;
  }
}

TEST(Ode, TruncatesAtTurningPoint) {
  const KgBasis b = kg_solve_numeric(linear(), -600.0, 7.9560042);
  const Trajectory tr = trajectory_ode(linear(), b, MobiusParams::make(1.0, 0.0, -600.0), XRange{-600.0, 7.0}, 500);
  ASSERT_TRUE(tr.turning_point.has_value());
  EXPECT_NEAR(*tr.turning_point, 5.9560042, 1e-9);
  EXPECT_LT(tr.samples.back().x, 5.9560042);
  EXPECT_DOUBLE_EQ(tr.samples.front().t, 0.0);
  EXPECT_DOUBLE_EQ(tr.samples.front().x, -600.0);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) EXPECT_GT(tr.samples[i].x, tr.samples[i - 1].x);
  EXPECT_THROW(trajectory_ode(linear(), b, MobiusParams::make(1.0, 0.0, -700.0), XRange{-600.0, 0.0}, 500),
               PreconditionError);
  EXPECT_THROW(trajectory_ode(linear(), b, MobiusParams::make(1.0, 0.0, -600.0), XRange{-600.0, 0.0}, 8),
               PreconditionError);
}

TEST(Resolution, SpeedSwing) {
  EXPECT_DOUBLE_EQ(speed_swing(MobiusParams::make(1.0, 0.0)), 1.0);
  EXPECT_NEAR(speed_swing(MobiusParams::make(4.0, 2.0)), 25.523320144309373, 1e-12);
  EXPECT_NEAR(speed_swing(MobiusParams::make(0.5, -1.0)), 18.195039966835857, 1e-12);
  EXPECT_EQ(resolved_per_interval(MobiusParams::make(1.0, 0.0)), 128u);
  EXPECT_EQ(resolved_per_interval(MobiusParams::make(4.0, 2.0)), 817u);
}

TEST(Firqnl, ConstantPotentialTiers) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  const Trajectory straight =
      trajectory_constant_allowed(s, MobiusParams::make(1.0, 0.0), TimeGrid{0.0, 3.0 * m.node_dt, m.node_dt / 200.0});
  EXPECT_LE(firqnl_residual(straight), tol::firqnl_straight);
  const Trajectory general =
      trajectory_constant_allowed(s, MobiusParams::make(4.0, 2.0), TimeGrid{0.0, 3.0 * m.node_dt, m.node_dt / 2000.0});
  EXPECT_LE(firqnl_residual(general), tol::firqnl_general);
  const OscillatoryMotion pm = oscillatory_motion(photon12());
  const Trajectory ph =
      trajectory_photon(photon12(), MobiusParams::make(4.0, 2.0), TimeGrid{0.0, 3.0 * pm.node_dt, pm.node_dt / 2000.0});
  EXPECT_LE(firqnl_residual(ph), tol::firqnl_general);
}

TEST(Firqnl, ForbiddenBranch) {
  const Scenario s = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  const ForbiddenMotion m = forbidden_motion(s);
  // A window strictly between the two blow-ups of (4, 2).
  const double lo = ref::t_plus_03 + 0.1 / m.rate, hi = ref::t_minus_03 - 0.1 / m.rate;
  const ForbiddenTrajectory ft =
      trajectory_constant_forbidden(s, MobiusParams::make(4.0, 2.0), TimeGrid{lo, hi, (hi - lo) / 2000.0});
  EXPECT_LE(firqnl_residual(ft.trajectory), tol::firqnl_general);
}

TEST(Firqnl, TermsVanishForStraightLine) {
  const Scenario s;
  const double v = ref::slope_e2 * ref::c;
  const auto t = firqnl_terms(s, 0.0, v, 0.0, 0.0);
  double sum = 0.0, scale = 0.0;
  for (double x : t) {
    sum += x;
    scale = std::max(scale, std::abs(x));
  }
  EXPECT_LE(std::abs(sum) / scale, 1e-14);
}

TEST(VelocityMomentum, ConstantPotential) {
  const Scenario s;
  const OscillatoryMotion m = oscillatory_motion(s);
  const KgBasis b = kg_closed_constant(s);
  for (auto [a, bb] : {std::pair{1.0, 0.0}, std::pair{4.0, 2.0}, std::pair{-1.0, 0.0}}) {
    const Trajectory tr =
        trajectory_constant_allowed(s, MobiusParams::make(a, bb, 40.0), TimeGrid{0.0, 3.0 * m.node_dt, m.node_dt / 2000.0});
    EXPECT_LE(velocity_momentum_check(tr, b, *tr.action), tol::velocity_momentum) << a << "," << bb;
  }
}

TEST(LinearPotential, OdeResidualsAtResolvedSampling) {
  const KgBasis b = kg_solve_numeric(linear(), -600.0, 7.9560042);
  const auto& z = b.phi2_zeros();
  const double hi = *(std::lower_bound(z.begin(), z.end(), 5.9560042) - 1);
  for (auto [a, bb] : {std::pair{1.0, 0.0}, std::pair{4.0, 2.0}}) {
    const auto p = MobiusParams::make(a, bb, -600.0);
    const Trajectory tr = trajectory_ode(linear(), b, p, XRange{-600.0, hi}, 16, resolved_per_interval(p));
    EXPECT_LE(firqnl_residual(tr), tol::firqnl_general);
    EXPECT_LE(velocity_momentum_check(tr, b, p), tol::velocity_momentum);
  }
}

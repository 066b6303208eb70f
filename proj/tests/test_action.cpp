#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rqt/action.hpp"
#include "rqt/tolerances.hpp"

using namespace rqt;

namespace ref {
constexpr double k_e2 = 9.799057302471633e-3;      // fm^-1
constexpr double p_e2 = 6.449856682835089e-24;     // MeV s / fm, sqrt(E^2 - m^2) / c
constexpr double hbar = 6.582119569e-22;           // MeV s
}  // namespace ref

TEST(MobiusParams, CanonicalSignAndMapping) {
  const auto p = MobiusParams::make(-4.0, -2.0, 7.0);
  EXPECT_DOUBLE_EQ(p.a, 4.0);
  EXPECT_DOUBLE_EQ(p.b, 2.0);
  EXPECT_TRUE(p.flipped);
  EXPECT_EQ(p.direction(), -1);
  EXPECT_DOUBLE_EQ(p.signed_a(), -4.0);
  EXPECT_DOUBLE_EQ(p.x0, 7.0);
  EXPECT_THROW(MobiusParams::make(0.0, 1.0), PreconditionError);
  EXPECT_THROW(MobiusParams::make(NAN, 1.0), PreconditionError);

  const auto q = action_params_from_trajectory(MobiusParams::make(4.0, 2.0));
  EXPECT_DOUBLE_EQ(q.a, 0.25);
  EXPECT_DOUBLE_EQ(q.b, -0.5);
  const auto r = action_params_from_trajectory(MobiusParams::make(1.0, 0.0));
  EXPECT_DOUBLE_EQ(r.a, 1.0);
  EXPECT_DOUBLE_EQ(r.b, 0.0);
}

TEST(ReducedAction, StraightCaseIsHbarKx) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const auto p = MobiusParams::make(1.0, 0.0);
  for (double x : {-2500.0, -17.0, 0.0, 99.0, 1000.0, 3000.0}) {
    const ActionSample a = reduced_action(b, p, x);
    EXPECT_NEAR(a.s0, ref::hbar * ref::k_e2 * x, 1e-12 * ref::hbar * std::max(1.0, ref::k_e2 * std::abs(x)));
    EXPECT_NEAR(a.ds0_dx / ref::p_e2, 1.0, 1e-14);
  }
}

TEST(ReducedAction, JumpAcrossNodeIsPiHbarForEveryPair) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const auto& z = b.phi2_zeros();
  const auto mid = std::upper_bound(z.begin(), z.end(), 0.0);
  for (double a : {0.5, 1.0, 4.0})
    for (double bb : {-2.0, 0.0, 2.0}) {
      const auto p = MobiusParams::make(a, bb);
      const double jump = reduced_action(b, p, *mid).s0 - reduced_action(b, p, *(mid - 1)).s0;
      EXPECT_NEAR(jump / (std::numbers::pi * ref::hbar), 1.0, 1e-14) << a << "," << bb;
      const double two = reduced_action(b, p, *(mid + 1)).s0 - reduced_action(b, p, *(mid - 1)).s0;
      EXPECT_NEAR(two / (std::numbers::pi * ref::hbar), 2.0, 1e-14);
    }
}

TEST(ReducedAction, ContinuousAcrossZeros) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const double z = b.phi2_zeros()[12];
  const auto p = MobiusParams::make(4.0, 2.0);
  const double left = reduced_action(b, p, z - 1e-7).s0, at = reduced_action(b, p, z).s0;
  const double right = reduced_action(b, p, z + 1e-7).s0;
  EXPECT_NEAR((at - left) / ref::hbar, 0.0, 1e-8);
  EXPECT_NEAR((right - at) / ref::hbar, 0.0, 1e-8);
}

TEST(ReducedAction, FlipNegates) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const double x = 412.0;
  const auto p = MobiusParams::make(4.0, 2.0), q = MobiusParams::make(-4.0, -2.0);
  EXPECT_DOUBLE_EQ(reduced_action(b, q, x).s0, -reduced_action(b, p, x).s0);
  EXPECT_DOUBLE_EQ(reduced_action(b, q, x).ds0_dx, -reduced_action(b, p, x).ds0_dx);
  EXPECT_DOUBLE_EQ(conjugate_momentum(b, p, x, -1), -conjugate_momentum(b, p, x));
}

TEST(ReducedAction, MomentumMatchesDerivativeOfAction) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const auto p = MobiusParams::make(0.5, -1.0);
  const double x = 55.5, h = 1e-3;
  const double fd = (reduced_action(b, p, x + h).s0 - reduced_action(b, p, x - h).s0) / (2 * h);
  EXPECT_NEAR(fd / reduced_action(b, p, x).ds0_dx, 1.0, 1e-7);
}

TEST(Rqshje, DefaultStep) {
  EXPECT_DOUBLE_EQ(rqshje_default_step(Scenario{}, 0.0), 0.1);
  const Scenario lin = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  EXPECT_NEAR(rqshje_default_step(lin, -100.0), 1e-3 / local_wavenumber(lin, -100.0), 1e-15);
  EXPECT_DOUBLE_EQ(rqshje_default_step(lin, -5000.0), 1e-3);
}

TEST(Rqshje, ConstantPotentialTiers) {
  const KgBasis b = kg_closed_constant(Scenario{});
  double straight = 0.0, general = 0.0;
  for (int i = -50; i <= 50; ++i) {
    const double x = i * 37.3 + 0.1;
    straight = std::max(straight, rqshje_residual(b, MobiusParams::make(1.0, 0.0), x));
    general = std::max(general, rqshje_residual(b, MobiusParams::make(4.0, 2.0), x));
  }
  EXPECT_LE(straight, tol::analytic_vanishing);
  EXPECT_LE(general, tol::rqshje_general);
}

TEST(Rqshje, TermsBalance) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const RqshjeTerms t = rqshje_terms(b, MobiusParams::make(1.0, 0.0), 10.0);
  EXPECT_NEAR(t.momentum_sq / (ref::p_e2 * ref::p_e2), 1.0, 1e-13);
  EXPECT_NEAR(t.classical / (ref::p_e2 * ref::p_e2), 1.0, 1e-13);
  EXPECT_LE(std::abs(t.quantum) / t.scale(), 1e-6);
}

TEST(Rqshje, ForbiddenAndPhoton) {
  const Scenario forb = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  const KgBasis hb = kg_closed_constant(forb);
  const Scenario ph = Scenario::make(Species::photon(), Potential::constant(0.0), 1.2);
  const KgBasis pb = kg_closed_constant(ph);
  for (double x : {-900.0, -100.0, 0.0, 350.0, 1111.0}) {
    EXPECT_LE(rqshje_residual(hb, MobiusParams::make(4.0, 2.0), x), tol::rqshje_general);
    EXPECT_LE(rqshje_residual(pb, MobiusParams::make(1.0, 0.0), x), tol::analytic_vanishing);
    EXPECT_LE(rqshje_residual(pb, MobiusParams::make(4.0, 2.0), x), tol::rqshje_general);
  }
}

TEST(Rqshje, LinearPotential) {
  const Scenario lin = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  const KgBasis b = kg_solve_numeric(lin, -600.0, 7.9560042);
  double worst = 0.0;
  for (double x = -595.0; x < 5.4; x += 13.7)
    for (auto p : {MobiusParams::make(1.0, 0.0, -600.0), MobiusParams::make(4.0, 2.0, -600.0)})
      worst = std::max(worst, rqshje_residual(b, p, x));
  EXPECT_LE(worst, tol::rqshje_linear);
}

TEST(Rqshje, Errors) {
  const KgBasis b = kg_closed_constant(Scenario{}, Domain{0.0, 100.0});
  EXPECT_THROW(rqshje_residual(b, MobiusParams::make(1.0, 0.0), 0.05), DomainError);
  EXPECT_THROW(rqshje_residual(b, MobiusParams::make(1.0, 0.0), 50.0, -1.0), PreconditionError);
}

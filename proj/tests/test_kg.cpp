#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rqt/kg.hpp"
#include "rqt/tolerances.hpp"

using namespace rqt;
using numerics::StepMethod;

namespace ref {
constexpr double k_e2 = 9.799057302471633e-3;     // fm^-1, electron E = 2 MeV
constexpr double k_ph12 = 6.081276859858005e-3;   // fm^-1, photon E = 1.2 MeV
constexpr double kappa_03 = 2.0963501447222974e-3;  // fm^-1, E - U0 = 0.3 MeV
constexpr double first_node = 160.30075938005710;  // fm, pi / (2 k)
}  // namespace ref

namespace {

double max_closed_error(const KgBasis& nb, double k) {
  const double k0 = std::max(k, 1.0 / nb.domain().length());
  double w = 0.0;
  for (std::size_t i = 0; i < nb.sample_count(); ++i) {
    const double x = nb.sample_position(i) - nb.domain().lo;
    const BasisPoint v = nb.sample(i);
    w = std::max({w, std::abs(v.phi1 - (k0 / k) * std::sin(k * x)), std::abs(v.phi2 - std::cos(k * x))});
  }
  return w;
}

double max_phi2_error(const KgBasis& nb, double k) {
  double w = 0.0;
  for (std::size_t i = 0; i < nb.sample_count(); ++i)
    w = std::max(w, std::abs(nb.sample(i).phi2 - std::cos(k * nb.sample_position(i))));
  return w;
}

}  // namespace

TEST(KgCoefficient, SignFollowsRegion) {
  EXPECT_LT(kg_coefficient(Scenario{}, 0.0), 0.0);
  EXPECT_NEAR(local_wavenumber(Scenario{}, 0.0), ref::k_e2, 1e-17);
  const Scenario forb = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  EXPECT_GT(kg_coefficient(forb, 0.0), 0.0);
  EXPECT_EQ(local_wavenumber(forb, 0.0), 0.0);
}

TEST(ClosedBasis, TrigonometricWavenumbers) {
  const KgBasis b = kg_closed_constant(Scenario{});
  EXPECT_EQ(b.closed_kind(), ClosedFormKind::Trigonometric);
  EXPECT_NEAR(b.closed_wavenumber() / ref::k_e2, 1.0, 1e-14);
  EXPECT_NEAR(b.closed_wavenumber() / 9.79906e-3, 1.0, 1e-5);
  const KgBasis ph = kg_closed_constant(Scenario::make(Species::photon(), Potential::constant(0.0), 1.2));
  EXPECT_NEAR(ph.closed_wavenumber() / ref::k_ph12, 1.0, 1e-14);
}

TEST(ClosedBasis, ValuesAndWronskian) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const double x = 123.4;
  const BasisPoint v = b.evaluate(x);
  EXPECT_NEAR(v.phi1, std::sin(ref::k_e2 * x), 1e-14);
  EXPECT_NEAR(v.phi2, std::cos(ref::k_e2 * x), 1e-14);
  EXPECT_NEAR(v.wronskian(), ref::k_e2, 1e-17);
  EXPECT_LE(wronskian_drift(b), tol::wronskian_closed);
  EXPECT_LE(klein_gordon_residual(b), tol::kg_fd_residual);
}

TEST(ClosedBasis, ZerosAtHalfIntegerMultiples) {
  const KgBasis b = kg_closed_constant(Scenario{});
  const auto& z = b.phi2_zeros();
  ASSERT_EQ(z.size(), 20u);
  const auto right = std::upper_bound(z.begin(), z.end(), 0.0);
  EXPECT_NEAR(*right, ref::first_node, 1e-9);
  for (std::size_t i = 1; i < z.size(); ++i)
    EXPECT_NEAR((z[i] - z[i - 1]) / (std::numbers::pi / ref::k_e2), 1.0, 1e-12);
}

TEST(ClosedBasis, HyperbolicHasNoZeros) {
  const Scenario forb = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  const KgBasis b = kg_closed_constant(forb, Domain{-3.0 / ref::kappa_03, 3.0 / ref::kappa_03});
  EXPECT_EQ(b.closed_kind(), ClosedFormKind::Hyperbolic);
  EXPECT_NEAR(b.closed_wavenumber() / ref::kappa_03, 1.0, 1e-13);
  EXPECT_TRUE(b.phi2_zeros().empty());
  EXPECT_LE(wronskian_drift(b), tol::wronskian_closed);
  const BasisPoint v = b.evaluate(100.0);
  EXPECT_NEAR(v.phi2, std::cosh(ref::kappa_03 * 100.0), 1e-14);
}

TEST(ClosedBasis, Errors) {
  const Scenario turn = Scenario::make(Species::electron(), Potential::constant(2.0 - 0.510998950), 2.0);
  EXPECT_THROW(kg_closed_constant(turn), DegenerateBasisError);
  const Scenario lin = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  EXPECT_THROW(kg_closed_constant(lin), PreconditionError);
  EXPECT_THROW(kg_closed_constant(Scenario{}, Domain{1.0, 1.0}), PreconditionError);
  const KgBasis b = kg_closed_constant(Scenario{}, Domain{0.0, 100.0});
  EXPECT_THROW(b.evaluate(200.0), DomainError);
}

TEST(NumericBasis, Rk4MatchesClosedFormOverTenPeriods) {
  const double length = 10.0 * 2.0 * std::numbers::pi / ref::k_e2;
  const KgBasis nb = kg_solve_numeric(Scenario{}, 0.0, length, KgSolveOptions{StepMethod::RK4, 1e-3, 1e-2});
  EXPECT_LE(max_closed_error(nb, ref::k_e2), tol::kg_oracle);
  EXPECT_LE(wronskian_drift(nb), tol::wronskian_numeric);
  EXPECT_LE(klein_gordon_residual(nb), tol::kg_fd_residual);
  EXPECT_EQ(nb.phi2_zeros().size(), 20u);
}

TEST(NumericBasis, NodesEqualClosedFormNodes) {
  const double length = 10.0 * 2.0 * std::numbers::pi / ref::k_e2;
  const KgBasis nb = kg_solve_numeric(Scenario{}, 0.0, length);
  const auto& z = nb.phi2_zeros();
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_NEAR(z[i] / ((static_cast<double>(i) + 0.5) * std::numbers::pi / ref::k_e2), 1.0, 1e-9);
    EXPECT_LE(std::abs(nb.evaluate(z[i]).phi2), 1e-9);
  }
}

TEST(NumericBasis, EvaluateAgreesWithStoredSamplesAndInterpolant) {
  const KgBasis nb = kg_solve_numeric(Scenario{}, 0.0, 700.0);
  for (std::size_t i : {std::size_t{0}, std::size_t{1234}, nb.sample_count() - 1}) {
    const double x = nb.sample_position(i);
    EXPECT_NEAR(nb.evaluate(x).phi2, nb.sample(i).phi2, 1e-13);
  }
  const double x = 333.333;
  EXPECT_NEAR(nb.interpolate(x).phi2, nb.evaluate(x).phi2, 1e-5);
}

TEST(NumericBasis, RichardsonOrders) {
  const Scenario s;
  const double length = 2.0 * std::numbers::pi / ref::k_e2;
  auto ratios = [&](StepMethod m, double h0) {
    double e[3];
    for (int j = 0; j < 3; ++j) {
      const double h = h0 / std::pow(2.0, j);
      e[j] = max_phi2_error(kg_solve_numeric(s, 0.0, length, KgSolveOptions{m, h, h0}), ref::k_e2);
    }
    return std::pair{e[0] / e[1], e[1] / e[2]};
  };
  const auto [e1, e2] = ratios(StepMethod::Euler, 0.4);
  EXPECT_NEAR(e1 / 2.0, 1.0, tol::richardson);
  EXPECT_NEAR(e2 / 2.0, 1.0, tol::richardson);
  const auto [r1, r2] = ratios(StepMethod::RK4, 4.0);
  EXPECT_NEAR(r1 / 16.0, 1.0, tol::richardson);
  EXPECT_NEAR(r2 / 16.0, 1.0, tol::richardson);
}

TEST(NumericBasis, ForbiddenRegionHasNoZeros) {
  const Scenario forb = Scenario::make(Species::electron(), Potential::constant(1.7), 2.0);
  const KgBasis nb = kg_solve_numeric(forb, 0.0, 1000.0);
  EXPECT_TRUE(nb.phi2_zeros().empty());
  EXPECT_LE(wronskian_drift(nb), tol::wronskian_numeric);
}

TEST(NumericBasis, LinearPotentialSpacingGrowsTowardTurningPoint) {
  const Scenario s = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  const KgBasis nb = kg_solve_numeric(s, -600.0, 7.9560042);
  const auto& z = nb.phi2_zeros();
  ASSERT_GT(z.size(), 10u);
  for (std::size_t i = 2; i < z.size(); ++i) EXPECT_GT(z[i] - z[i - 1], z[i - 1] - z[i - 2]);
  EXPECT_LT(z.back(), 5.9560042);
  EXPECT_LE(wronskian_drift(nb), tol::wronskian_numeric);
  EXPECT_LE(klein_gordon_residual(nb), tol::kg_fd_residual);
}

TEST(NumericBasis, Errors) {
  EXPECT_THROW(kg_solve_numeric(Scenario{}, 1.0, 0.0), PreconditionError);
  EXPECT_THROW(kg_solve_numeric(Scenario{}, 0.0, 1.0, KgSolveOptions{StepMethod::RK4, 0.0, 1e-2}), PreconditionError);
  // Euler gains energy every step; far enough out it overflows.
  const Scenario s = Scenario::make(Species::electron(), Potential::linear(0.25), 2.0);
  EXPECT_THROW(kg_solve_numeric(s, -5400.0, 7.9, KgSolveOptions{StepMethod::Euler, 1e-1, 1e-1}), OverflowError);
  EXPECT_EQ(numerics::parse_step_method("rk4"), StepMethod::RK4);
  EXPECT_THROW(numerics::parse_step_method("leapfrog"), ConfigError);
}

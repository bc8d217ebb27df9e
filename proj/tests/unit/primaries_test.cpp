#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vm3b/errors.hpp"
#include "vm3b/primaries.hpp"

using namespace vm3b;

namespace {

SystemConfig rotating(MassLaw law = MassLaw::constant(), double nu = 0.5) {
  SystemConfig c;
  c.nu = nu;
  c.law = std::move(law);
  return c;
}

// |d/dt(u R') - rhs| at step midpoints, with d/dt from the dense output.
double midpoint_defect(const PrimaryEphemeris& eph, bool with_rotation) {
  const auto& ts = eph.solution().times();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t = 0.5 * (ts[i] + ts[i + 1]);
    const double h = std::min(1e-3, 0.2 * (ts[i + 1] - ts[i]));
    auto uRd = [&](double s) {
      const auto p = eph.sample(s);
      return p.u * p.R_dot;
    };
    const auto p = eph.sample(t);
    const double rhs = (with_rotation ? 1.0 / (p.u * std::pow(p.R, 3)) : 0.0) -
                       eph.G() * p.u * p.u / (p.R * p.R);
    worst = std::max(worst, std::abs(oracle::centred_derivative(uRd, t, h) - rhs) /
                                (1.0 + std::abs(rhs)));
  }
  return worst;
}

}  // namespace

TEST(SystemConfig, Validation) {
  SystemConfig c;
  c.nu = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c.nu = 0.51;
  EXPECT_THROW(c.validate(), DomainError);
  c.nu = 0.5;
  c.G = -1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c.G = 1.0;
  EXPECT_NO_THROW(c.validate());
}

TEST(Rotating, ClassicalCircle) {
  const auto eph = propagate_rotating(rotating(), {0.0, 20.0}, {});
  for (double t = 0.0; t <= 20.0; t += 0.5) {
    const auto p = eph.sample(t);
    EXPECT_NEAR(p.R, 1.0, 1e-12);
    EXPECT_NEAR(p.theta, t, 1e-9);
    EXPECT_NEAR(p.omega, 1.0, 1e-12);
  }
}

TEST(Rotating, AngularMomentumRelation) {
  for (const MassLaw& law : {MassLaw::linear(0.1), MassLaw::exponential(0.02),
                             MassLaw::mestschersky(0.01, 0.005, 1.0)}) {
    const auto eph = propagate_rotating(rotating(law), {0.0, 10.0}, {});
    for (double t = 0.0; t <= 10.0; t += 0.1) {
      const auto p = eph.sample(t);
      EXPECT_NEAR(p.u * p.R * p.R * p.omega, 1.0, 1e-9);
    }
  }
}

TEST(Rotating, DefectAtMidpoints) {
  IntegratorSettings s;
  const auto eph = propagate_rotating(rotating(MassLaw::linear(0.05)), {0.0, 10.0}, s);
  EXPECT_LT(midpoint_defect(eph, true), 100 * s.rtol * 10);
}

TEST(Rotating, TighterReintegrationAgrees) {
  IntegratorSettings s;
  IntegratorSettings tight = s;
  tight.rtol /= 100;
  tight.atol /= 100;
  const auto a = propagate_rotating(rotating(MassLaw::linear(0.05)), {0.0, 10.0}, s);
  const auto b = propagate_rotating(rotating(MassLaw::linear(0.05)), {0.0, 10.0}, tight);
  for (double t = 0.0; t <= 10.0; t += 0.25) {
    EXPECT_NEAR(a.sample(t).R, b.sample(t).R, 1e-8 * b.sample(t).R);
  }
}

TEST(Rotating, EllipticClassicalEnergyConserved) {
  PrimaryInitialState init;
  init.R_dot = 0.2;
  const auto eph = propagate_rotating(rotating(), {0.0, 30.0}, {}, init);
  const double e0 = oracle::reduced_energy(1.0, 0.2);
  for (double t = 0.0; t <= 30.0; t += 0.3) {
    const auto p = eph.sample(t);
    EXPECT_NEAR(oracle::reduced_energy(p.R, p.R_dot), e0, 1e-9);
  }
}

TEST(Rotating, KappaLawKeepsConstraint) {
  const MassLaw law = solve_kappa_constrained(2.0, 1.0, 1.0, -0.1, {0.0, 10.0}, {});
  const auto eph = propagate_rotating(rotating(law), {0.0, 10.0}, {});
  for (double t = 0.0; t <= 10.0; t += 0.05) {
    const auto p = eph.sample(t);
    EXPECT_NEAR(p.R * p.u * p.u * p.u, 2.0, 2e-8);
  }
}

TEST(Rotating, ConsistentInitialStateForKappaLaw) {
  SystemConfig c;
  c.G = 1.5;
  c.law = solve_kappa_constrained(3.0, 1.5, 1.0, -0.05, {0.0, 1.0}, {});
  const auto init = consistent_initial_state(c, 0.0);
  EXPECT_DOUBLE_EQ(init.R, 3.0 / 1.5);
  EXPECT_DOUBLE_EQ(init.R_dot, -3.0 * 3.0 * -0.05 / 1.5);
}

TEST(Rotating, ModeMismatchRejected) {
  SystemConfig c;
  c.mode = FrameMode::collinear;
  EXPECT_THROW((void)propagate_rotating(c, {0.0, 1.0}, {}), DomainError);
  EXPECT_THROW((void)propagate_collinear(rotating(), {0.0, 1.0}, {}), DomainError);
}

TEST(Rotating, SpanBeyondLawValidityRejected) {
  EXPECT_THROW((void)propagate_rotating(rotating(MassLaw::linear(-0.2)), {0.0, 10.0}, {}),
               DomainError);
}

TEST(Collinear, FallTimeMatchesQuadrature) {
  SystemConfig c;
  c.mode = FrameMode::collinear;
  const auto eph = propagate_collinear(c, {0.0, 5.0}, {});
  ASSERT_EQ(eph.status(), TerminalStatus::event_stopped);
  ASSERT_TRUE(eph.solution().event().has_value());
  EXPECT_EQ(eph.solution().event()->name, "collision");
  const double expected = oracle::radial_fall_time(1.0, 1.0, kCollisionRadius);
  EXPECT_NEAR(eph.span().end, expected, 1e-8);
  EXPECT_NEAR(eph.span().end, M_PI / (2 * std::sqrt(2.0)), 1e-8);
  for (double t = 0.0; t < eph.span().end; t += 0.1) EXPECT_EQ(eph.sample(t).theta, 0.0);
}

TEST(Collinear, ScalesWithG) {
  SystemConfig c;
  c.mode = FrameMode::collinear;
  c.G = 4.0;
  const auto eph = propagate_collinear(c, {0.0, 5.0}, {});
  EXPECT_NEAR(eph.span().end, oracle::radial_fall_time(4.0, 1.0, kCollisionRadius), 1e-8);
}

TEST(Collinear, EscapeWithLargeOutwardSpeed) {
  SystemConfig c;
  c.mode = FrameMode::collinear;
  PrimaryInitialState init;
  init.R_dot = 3.0;
  const auto eph = propagate_collinear(c, {0.0, 10.0}, {}, init);
  EXPECT_EQ(eph.status(), TerminalStatus::completed);
  double prev = 0.0;
  for (double t = 0.0; t <= 10.0; t += 0.1) {
    const double R = eph.sample(t).R;
    EXPECT_GT(R, prev);
    prev = R;
  }
}

TEST(Collinear, DefectUnderLinearLaw) {
  SystemConfig c;
  c.mode = FrameMode::collinear;
  c.law = MassLaw::linear(0.1);
  PrimaryInitialState init;
  init.R_dot = 0.5;
  IntegratorSettings s;
  const auto eph = propagate_collinear(c, {0.0, 0.8}, s, init);
  EXPECT_LT(midpoint_defect(eph, false), 100 * s.rtol * 10);
}

TEST(PrimaryPositions, Barycentric) {
  const auto eph = propagate_rotating(rotating(), {0.0, 1.0}, {});
  auto [x1, x2] = primary_positions(eph, 0.5, 0.3);
  EXPECT_NEAR(x1, -0.5, 1e-12);
  EXPECT_NEAR(x2, 0.5, 1e-12);
  PrimaryInitialState init;
  init.R = 2.0;
  init.R_dot = 0.0;
  const auto eph2 = propagate_rotating(rotating(MassLaw::linear(0.1)), {0.0, 3.0}, {}, init);
  std::tie(x1, x2) = primary_positions(eph2, 0.2, 0.0);
  EXPECT_DOUBLE_EQ(x1, -0.4);
  EXPECT_DOUBLE_EQ(x2, 1.6);
  for (double t = 0.0; t <= 3.0; t += 0.3) {
    std::tie(x1, x2) = primary_positions(eph2, 0.2, t);
    EXPECT_NEAR(0.8 * x1 + 0.2 * x2, 0.0, 1e-15);
  }
  EXPECT_THROW((void)primary_positions(eph2, 0.2, 3.5), OutOfSpanError);
}

TEST(FullCartesian, MomentumSeparationAndBarycenter) {
  const double nu = 0.3;
  const MassLaw law = MassLaw::linear(0.1);
  IntegratorSettings s;
  TwoBodyState init;
  // Rotating circular start: relative speed R * omega = 1/(u R).
  init.r1 = {-nu, 0.0, 0.0};
  init.r2 = {1.0 - nu, 0.0, 0.0};
  init.v1 = {0.0, -nu, 0.0};
  init.v2 = {0.0, 1.0 - nu, 0.0};
  const auto full = propagate_full_cartesian(1.0 - nu, nu, law, init, {0.0, 10.0}, s);
  const auto reduced = propagate_rotating(rotating(law, nu), {0.0, 10.0}, s);
  const Vec3 p0 = full.momentum(0.0);
  for (double t = 0.0; t <= 10.0; t += 0.1) {
    EXPECT_LT(norm(full.momentum(t) - p0), 1e-9);
    EXPECT_NEAR(full.separation(t), reduced.sample(t).R, 1e-7);
    EXPECT_LT(norm(full.barycenter(t)), 1e-9);
  }
}

TEST(FullCartesian, RejectsBadInput) {
  TwoBodyState init;
  init.r2 = {1.0, 0.0, 0.0};
  EXPECT_THROW((void)propagate_full_cartesian(0.0, 1.0, MassLaw::constant(), init, {0, 1}, {}),
               DomainError);
  TwoBodyState same;
  EXPECT_THROW((void)propagate_full_cartesian(1.0, 1.0, MassLaw::constant(), same, {0, 1}, {}),
               DomainError);
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vm3b/equilibria.hpp"
#include "vm3b/errors.hpp"
#include "vm3b/third_body.hpp"

using namespace vm3b;

namespace {

SystemConfig make_config(double nu, MassLaw law = MassLaw::constant(),
                         FrameMode mode = FrameMode::rotating) {
  SystemConfig c;
  c.nu = nu;
  c.law = std::move(law);
  c.mode = mode;
  return c;
}

PrimarySample unit_primaries() {
  return {};
}

}  // namespace

TEST(RotatingRhs, ClassicalLimitMatchesCrtbpField) {
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), vel(-1.0, 1.0), mass(0.001, 0.5);
  int checked = 0;
  while (checked < 1000) {
    const double nu = mass(rng);
    const ThirdBodyState s{0.0, {pos(rng), pos(rng), pos(rng)}, {vel(rng), vel(rng), vel(rng)}};
    if (norm(s.r - Vec3{-nu, 0, 0}) < 0.05 || norm(s.r - Vec3{1 - nu, 0, 0}) < 0.05) continue;
    const auto d = rotating_rhs(s, unit_primaries(), nu, 1.0);
    const auto ref = oracle::classical_crtbp_accel({s.r.x, s.r.y, s.r.z, s.v.x, s.v.y, s.v.z}, nu);
    EXPECT_NEAR(d.v_dot.x, ref[0], 1e-12);
    EXPECT_NEAR(d.v_dot.y, ref[1], 1e-12);
    EXPECT_NEAR(d.v_dot.z, ref[2], 1e-12);
    EXPECT_EQ(d.r_dot.x, s.v.x);
    ++checked;
  }
}

TEST(RotatingRhs, AxialDisplacementSymmetric) {
  PrimarySample p;
  p.u = 1.3;
  p.u_dot = 0.2;
  p.R = 1.7;
  p.R_dot = 0.4;
  const ThirdBodyState s{0.0, {0.0, 0.0, 0.8}, {0.0, 0.0, 0.1}};
  const auto d = rotating_rhs(s, p, 0.5, 1.0);
  EXPECT_NEAR(d.v_dot.x, 0.0, 1e-15);
  EXPECT_NEAR(d.v_dot.y, 0.0, 1e-15);
}

TEST(RotatingRhs, CrossTermUsesXForY) {
  // With y = 0 and zero velocity, only the x R'/R^3 term can push along y.
  PrimarySample p;
  p.u = 1.0;
  p.R = 1.0;
  p.R_dot = 0.5;
  const ThirdBodyState s{0.0, {3.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const auto d = rotating_rhs(s, p, 0.3, 1.0);
  EXPECT_NEAR(d.v_dot.y, 2.0 * 3.0 * 0.5, 1e-14);
}

TEST(RotatingRhs, GuardNearPrimary) {
  const ThirdBodyState s{0.0, {0.5 + 1e-8, 0.0, 0.0}, {}};
  EXPECT_THROW((void)rotating_rhs(s, unit_primaries(), 0.5, 1.0), DomainError);
  EXPECT_THROW((void)inertial_rhs(s, unit_primaries(), 0.5, 1.0), DomainError);
}

TEST(InertialRhs, MidpointOfEqualMassesBalanced) {
  PrimarySample p;
  p.R = 0.7;
  const ThirdBodyState s{0.0, {0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}};
  const auto d = inertial_rhs(s, p, 0.5, 1.0);
  EXPECT_NEAR(d.v_dot.x, 0.0, 1e-15);
}

TEST(InertialRhs, MonopoleFarField) {
  PrimarySample p;
  p.u = 1.2;
  for (double r : {10.0, 100.0, 1000.0}) {
    const ThirdBodyState s{0.0, {0.3 * r, 0.4 * r, std::sqrt(0.75) * r}, {}};
    const auto d = inertial_rhs(s, p, 0.2, 1.0);
    const double expected = p.u * p.u / (r * r) / p.u;
    EXPECT_LT(std::abs(norm(d.v_dot) - expected) / expected, p.R / r);
    EXPECT_LT(dot(d.v_dot, s.r), 0.0);
  }
}

TEST(InertialRhs, DragTermFromMassChange) {
  PrimarySample p;
  p.u = 2.0;
  p.u_dot = 0.4;
  const ThirdBodyState s{0.0, {1e6, 0.0, 0.0}, {0.0, 3.0, 0.0}};
  const auto d = inertial_rhs(s, p, 0.5, 1.0);
  EXPECT_NEAR(d.v_dot.y, -0.4 * 3.0 / 2.0, 1e-12);
}

TEST(Simulate, ClassicalL4StaysPut) {
  const double nu = 0.01215;
  const auto cfg = make_config(nu);
  const auto eph = propagate_primaries(cfg, {0.0, 100.0}, {});
  const Vec3 l4 = triangular(nu)[0].coords();
  const auto traj = simulate(cfg, eph, {0.0, l4, {}}, {0.0, 100.0}, {});
  for (const auto& s : traj.samples()) EXPECT_LT(norm(s.r - l4), 1e-6);
  EXPECT_LT(self_similarity_residual(traj, eph, l4), 1e-6);
}

TEST(Simulate, JacobiConstantInClassicalLimit) {
  const double nu = 0.01215;
  const auto cfg = make_config(nu);
  IntegratorSettings s;
  s.rtol = 1e-12;
  s.atol = 1e-14;
  const auto eph = propagate_primaries(cfg, {0.0, 100.0}, s);
  const ThirdBodyState s0{0.0, {0.5, 0.88, 0.0}, {0.0, 0.01, 0.0}};
  const auto traj = simulate(cfg, eph, s0, {0.0, 100.0}, s);
  ASSERT_EQ(traj.status(), TerminalStatus::completed);
  const double j0 = jacobi_constant(s0, nu);
  for (double t = 0.0; t <= 100.0; t += 0.1) {
    EXPECT_NEAR(jacobi_constant(traj.state(t), nu), j0, 1e-9);
  }
}

TEST(Jacobi, AtL4AtRest) {
  for (double nu : {0.5, 0.1, 0.01215}) {
    const ThirdBodyState s{0.0, triangular(nu)[0].coords(), {}};
    EXPECT_NEAR(jacobi_constant(s, nu), 3.0 - nu + nu * nu, 1e-14);
  }
  const ThirdBodyState far{0.0, {1e6, 0.0, 0.0}, {}};
  EXPECT_NEAR(jacobi_constant(far, 0.3) / 1e12, 1.0, 1e-6);
}

TEST(Simulate, LinearLawL4SelfSimilar) {
  const double nu = 0.01215;
  const auto cfg = make_config(nu, MassLaw::linear(0.1));
  const auto eph = propagate_primaries(cfg, {0.0, 10.0}, {});
  const Vec3 l4 = triangular(nu)[0].coords();
  const auto traj = simulate(cfg, eph, self_similar_seed(eph, l4, 0.0), {0.0, 10.0}, {});
  EXPECT_LT(self_similarity_residual(traj, eph, l4), 1e-6);
}

TEST(Simulate, ExponentialLawL4AgreesAcrossTolerances) {
  const double nu = 0.01215;
  const auto cfg = make_config(nu, MassLaw::exponential(0.02));
  const Vec3 l4 = triangular(nu)[0].coords();
  for (double rtol : {1e-10, 1e-12}) {
    IntegratorSettings s;
    s.rtol = rtol;
    s.atol = rtol * 1e-2;
    const auto eph = propagate_primaries(cfg, {0.0, 10.0}, s);
    const auto traj = simulate(cfg, eph, self_similar_seed(eph, l4, 0.0), {0.0, 10.0}, s);
    EXPECT_LT(self_similarity_residual(traj, eph, l4), 1e-6) << rtol;
  }
}

TEST(Simulate, DisplacedSeedDrifts) {
  const double nu = 0.01215;
  const auto cfg = make_config(nu, MassLaw::linear(0.1));
  const auto eph = propagate_primaries(cfg, {0.0, 10.0}, {});
  const Vec3 l1 = collinear(nu)[0].coords();
  const Vec3 shifted = l1 + Vec3{0.1, 0.0, 0.0};
  const auto traj = simulate(cfg, eph, self_similar_seed(eph, shifted, 0.0), {0.0, 10.0}, {});
  EXPECT_GT(self_similarity_residual(traj, eph, l1), 1e-2);
}

TEST(Simulate, RingPointUntilCollision) {
  const double nu = 0.3;
  const auto cfg = make_config(nu, MassLaw::constant(), FrameMode::collinear);
  const auto eph = propagate_primaries(cfg, {0.0, 5.0}, {});
  ASSERT_EQ(eph.status(), TerminalStatus::event_stopped);
  const Vec3 q = ring(nu).point(2.0);
  const auto traj = simulate(cfg, eph, self_similar_seed(eph, q, 0.0), eph.span(), {});
  EXPECT_LT(self_similarity_residual(traj, eph, q), 1e-6);
}

TEST(Simulate, AnalyticTrajectoryHasZeroResidual) {
  // r = p R(t) with R = 1 in the classical limit is just the point itself.
  const auto cfg = make_config(0.5);
  const auto eph = propagate_primaries(cfg, {0.0, 2.0}, {});
  const Vec3 l4 = triangular(0.5)[0].coords();
  const auto traj = simulate(cfg, eph, {0.0, l4, {}}, {0.0, 2.0}, {});
  EXPECT_LT(self_similarity_residual(traj, eph, l4), 1e-13);
}

TEST(Simulate, PreconditionsChecked) {
  const auto cfg = make_config(0.3);
  const auto eph = propagate_primaries(cfg, {0.0, 2.0}, {});
  const ThirdBodyState s0{0.0, {0.2, 0.9, 0.0}, {}};
  EXPECT_THROW((void)simulate(cfg, eph, s0, {0.0, 3.0}, {}), DomainError);
  EXPECT_THROW((void)simulate(cfg, eph, {0.5, s0.r, {}}, {0.0, 1.0}, {}), DomainError);
  const auto other = make_config(0.3, MassLaw::constant(), FrameMode::collinear);
  EXPECT_THROW((void)simulate(other, eph, s0, {0.0, 1.0}, {}), DomainError);
}

TEST(Simulate, StopsNearPrimary) {
  const double nu = 0.5;
  const auto cfg = make_config(nu, MassLaw::constant(), FrameMode::collinear);
  const auto eph = propagate_primaries(cfg, {0.0, 1.0}, {});
  // At rest 0.01 beyond a primary: falls onto it long before the primaries meet.
  const ThirdBodyState s0{0.0, {0.51, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const auto traj = simulate(cfg, eph, s0, {0.0, 1.0}, {});
  ASSERT_EQ(traj.status(), TerminalStatus::event_stopped);
  EXPECT_EQ(traj.solution().event()->name.rfind("near-primary", 0), 0u);
}

TEST(Trajectory, SamplesMatchDenseHandle) {
  const auto cfg = make_config(0.2, MassLaw::linear(0.1));
  const auto eph = propagate_primaries(cfg, {0.0, 3.0}, {});
  const ThirdBodyState s0{0.0, {0.3, 0.7, 0.1}, {0.05, -0.02, 0.0}};
  const auto traj = simulate(cfg, eph, s0, {0.0, 3.0}, {});
  EXPECT_EQ(traj.frame(), FrameMode::rotating);
  const auto samples = traj.samples();
  for (std::size_t i = 1; i < samples.size(); ++i) EXPECT_GT(samples[i].t, samples[i - 1].t);
  for (const auto& s : samples) {
    const auto again = traj.state(s.t);
    EXPECT_EQ(again.r.x, s.r.x);
    EXPECT_EQ(again.v.z, s.v.z);
  }
}

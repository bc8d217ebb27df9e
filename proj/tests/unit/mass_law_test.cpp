#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vm3b/errors.hpp"
#include "vm3b/mass_law.hpp"
#include "vm3b/primaries.hpp"

using namespace vm3b;

TEST(MassLaw, ClosedFormValues) {
  const auto c = MassLaw::constant().eval(7.0);
  EXPECT_EQ(c.u, 1.0);
  EXPECT_EQ(c.u_dot, 0.0);
  const auto l = MassLaw::linear(0.1).eval(2.0);
  EXPECT_DOUBLE_EQ(l.u, 1.2);
  EXPECT_DOUBLE_EQ(l.u_dot, 0.1);
  const auto e = MassLaw::exponential(0.02).eval(3.0);
  EXPECT_DOUBLE_EQ(e.u, std::exp(0.06));
  EXPECT_DOUBLE_EQ(e.u_dot, 0.02 * std::exp(0.06));
  for (double t : {-3.0, 0.0, 5.0}) {
    const auto m = MassLaw::mestschersky(0.0, 0.0, 1.0).eval(t);
    EXPECT_EQ(m.u, 1.0);
    EXPECT_EQ(m.u_dot, 0.0);
  }
}

TEST(MassLaw, DerivativeMatchesFiniteDifferences) {
  const MassLaw laws[] = {MassLaw::constant(2.0), MassLaw::linear(0.1), MassLaw::linear(-0.05),
                          MassLaw::exponential(0.02), MassLaw::exponential(-0.3),
                          MassLaw::mestschersky(0.01, 0.005, 1.0),
                          MassLaw::mestschersky(0.2, -0.1, 0.5)};
  for (const auto& law : laws) {
    for (double t : {0.0, 0.7, 3.0, 9.5}) {
      if (!law.validity().contains(t - 1e-4) || !law.validity().contains(t + 1e-4)) continue;
      const double fd = oracle::centred_derivative([&](double s) { return law.eval(s).u; }, t, 1e-5);
      const double ud = law.eval(t).u_dot;
      EXPECT_LE(std::abs(fd - ud), 1e-8 * std::max(1.0, std::abs(ud)))
          << law.spec().to_string() << " t=" << t;
    }
  }
}

TEST(MassLaw, LinearValidityEndsWhereMassVanishes) {
  const MassLaw law = MassLaw::linear(-0.1);
  EXPECT_DOUBLE_EQ(law.validity().end, 10.0);
  EXPECT_THROW((void)law.eval(10.5), DomainError);
  EXPECT_GT(law.eval(9.99).u, 0.0);
}

TEST(MassLaw, MestscherskyRejectsNonPositiveQuadratic) {
  // alpha t^2 + 2 beta t + gamma = 1 - t^2 vanishes at t = 1.
  const MassLaw law = MassLaw::mestschersky(-1.0, 0.0, 1.0);
  EXPECT_LE(law.validity().end, 1.0);
  EXPECT_THROW((void)law.eval(1.5), DomainError);
}

TEST(MassLawSpec, RoundTrip) {
  for (const char* text : {"constant", "constant:2", "linear:0.1", "exponential:-0.02",
                           "mestschersky:0.01,0.005,1", "kappa:2", "kappa:2,1,-0.1"}) {
    const auto spec = MassLawSpec::parse(text);
    EXPECT_EQ(MassLawSpec::parse(spec.to_string()), spec) << text;
  }
}

TEST(MassLawSpec, RejectsBadText) {
  EXPECT_THROW((void)MassLawSpec::parse("quadratic:1"), DomainError);
  EXPECT_THROW((void)MassLawSpec::parse("linear"), DomainError);
  EXPECT_THROW((void)MassLawSpec::parse("linear:abc"), DomainError);
  EXPECT_THROW((void)MassLawSpec::parse("mestschersky:1,2"), DomainError);
  EXPECT_THROW((void)MassLawSpec::parse("constant:-1"), DomainError);
  try {
    (void)MassLawSpec::parse("kappa:0.5");
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("kappa must exceed 1"), std::string::npos);
  }
}

TEST(KappaLaw, RejectsKappaAtOrBelowOne) {
  for (double k : {0.5, 1.0, 1.0 + 1e-9}) {
    EXPECT_THROW((void)solve_kappa_constrained(k, 1.0, 1.0, 0.0, {0.0, 1.0}, {}), DomainError) << k;
  }
}

TEST(KappaLaw, ConstraintAndRadialEquationHold) {
  IntegratorSettings s;
  const MassLaw law = solve_kappa_constrained(2.0, 1.0, 1.0, -0.1, {0.0, 10.0}, s);
  ASSERT_EQ(law.kind(), MassLawKind::kappa_constrained);
  EXPECT_EQ(law.validity().end, 10.0);
  const KappaLawCheck check = check_kappa_law(law);
  EXPECT_LT(check.max_constraint_deviation, 1e-8);
  EXPECT_LT(check.max_radial_residual, 100 * s.rtol);

  // Independent check: R = kappa/(G u^3), differentiate u R' numerically and
  // compare with the right side of the radial equation.
  auto R = [&](double t) { return 2.0 / std::pow(law.eval(t).u, 3); };
  auto uRdot = [&](double t) {
    const auto m = law.eval(t);
    return m.u * (-6.0 * m.u_dot / std::pow(m.u, 4));
  };
  for (double t = 0.5; t < 9.5; t += 0.5) {
    const double lhs = oracle::centred_derivative(uRdot, t, 1e-3);
    const double u = law.eval(t).u;
    const double r = R(t);
    const double rhs = 1.0 / (u * r * r * r) - u * u / (r * r);
    EXPECT_NEAR(lhs, rhs, 1e-7 * (1.0 + std::abs(rhs))) << t;
  }
}

TEST(KappaLaw, ZeroRateRunsAwayAndValidityIsCut) {
  const MassLaw law = solve_kappa_constrained(2.0, 1.0, 1.0, 0.0, {0.0, 10.0}, {});
  EXPECT_LT(law.validity().end, 10.0);
  EXPECT_GT(law.validity().end, 4.0);
  EXPECT_THROW((void)law.eval(law.validity().end + 0.1), OutOfSpanError);
  SystemConfig cfg;
  cfg.law = law;
  EXPECT_THROW((void)propagate_primaries(cfg, {0.0, 10.0}, {}), DomainError);
}

TEST(KappaLaw, LargeKappaShortSpanStaysNearUnity) {
  IntegratorSettings s;
  const MassLaw a = solve_kappa_constrained(10.0, 1.0, 1.0, 0.0, {0.0, 0.1}, s);
  IntegratorSettings tight = s;
  tight.rtol = s.rtol / 100;
  tight.atol = s.atol / 100;
  const MassLaw b = solve_kappa_constrained(10.0, 1.0, 1.0, 0.0, {0.0, 0.1}, tight);
  for (double t = 0.0; t <= 0.1; t += 0.01) {
    EXPECT_NEAR(a.eval(t).u, 1.0, 0.01);
    EXPECT_NEAR(a.eval(t).u, b.eval(t).u, 1e-9);
  }
}

TEST(KappaLaw, BuiltFromSpec) {
  const MassLaw law = build_mass_law(MassLawSpec::parse("kappa:2,1,-0.1"), 1.0, {0.0, 10.0}, {});
  ASSERT_TRUE(law.kappa().has_value());
  EXPECT_EQ(*law.kappa(), 2.0);
  EXPECT_EQ(law.eval(0.0).u, 1.0);
  EXPECT_DOUBLE_EQ(law.eval(0.0).u_dot, -0.1);
}

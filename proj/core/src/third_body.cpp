#include "vm3b/third_body.hpp"

#include <algorithm>
#include <cmath>

#include "vm3b/errors.hpp"

namespace vm3b {

namespace {

struct Gravity {
  Vec3 accel;  // per unit third-body mass, before dividing by u
  double r1;
  double r2;
};

Gravity gravity(const Vec3& r, double R, double u, double nu, double G, bool guard) {
  const Vec3 d1{r.x + nu * R, r.y, r.z};
  const Vec3 d2{r.x - (1.0 - nu) * R, r.y, r.z};
  const double r1 = norm(d1);
  const double r2 = norm(d2);
  if (guard && (r1 < kCollisionRadius || r2 < kCollisionRadius)) {
    throw DomainError("third body coincides with a primary");
  }
  const double s = -G * u * u;
  const Vec3 a = s * ((1.0 - nu) / (r1 * r1 * r1) * d1 + nu / (r2 * r2 * r2) * d2);
  return {a, r1, r2};
}

constexpr int kInteriorSamples = 4;

ThirdBodyDerivative rotating_field(const ThirdBodyState& s, const PrimarySample& p, double nu,
                                   double G, bool guard) {
  const double R = p.R, Rd = p.R_dot, u = p.u;
  const Gravity g = gravity(s.r, R, u, nu, G, guard);
  const double R2 = R * R;
  const double R3 = R2 * R;
  const double uR4 = u * R2 * R2;
  // The y equation carries +2 x R'/R^3: expanding (u omega)' with
  // omega = 1/(u R^2) gives that term, and only it cancels under r = p R(t).
  const double fx = g.accel.x + 2.0 * s.v.y / R2 - 2.0 * s.r.y * Rd / R3 + s.r.x / uR4;
  const double fy = g.accel.y - 2.0 * s.v.x / R2 + 2.0 * s.r.x * Rd / R3 + s.r.y / uR4;
  const double fz = g.accel.z;
  return {s.v, Vec3{fx - p.u_dot * s.v.x, fy - p.u_dot * s.v.y, fz - p.u_dot * s.v.z} * (1.0 / u)};
}

ThirdBodyDerivative inertial_field(const ThirdBodyState& s, const PrimarySample& p, double nu,
                                   double G, bool guard) {
  const Gravity g = gravity(s.r, p.R, p.u, nu, G, guard);
  return {s.v, (g.accel - p.u_dot * s.v) * (1.0 / p.u)};
}

}  // namespace

ThirdBodyDerivative rotating_rhs(const ThirdBodyState& s, const PrimarySample& p, double nu,
                                 double G) {
  return rotating_field(s, p, nu, G, true);
}

ThirdBodyDerivative rotating_rhs(const ThirdBodyState& state, const PrimaryEphemeris& eph,
                                 const SystemConfig& config) {
  if (eph.mode() != FrameMode::rotating) throw DomainError("rotating_rhs needs a rotating ephemeris");
  return rotating_rhs(state, eph.sample(state.t), config.nu, config.G);
}

ThirdBodyDerivative inertial_rhs(const ThirdBodyState& s, const PrimarySample& p, double nu,
                                 double G) {
  return inertial_field(s, p, nu, G, true);
}

ThirdBodyDerivative inertial_rhs(const ThirdBodyState& state, const PrimaryEphemeris& eph,
                                 const SystemConfig& config) {
  if (eph.mode() != FrameMode::collinear) {
    throw DomainError("inertial_rhs needs a collinear ephemeris");
  }
  return inertial_rhs(state, eph.sample(state.t), config.nu, config.G);
}

ThirdBodyState Trajectory::state(double t) const {
  double y[9];  // third body, then the co-integrated (R, R', theta)
  solution_.sample_into(t, y);
  return {t, {y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

std::vector<ThirdBodyState> Trajectory::samples() const {
  std::vector<ThirdBodyState> out;
  const auto& ts = solution_.times();
  out.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto y = solution_.node_state(i);
    out.push_back({ts[i], {y[0], y[1], y[2]}, {y[3], y[4], y[5]}});
  }
  return out;
}

Trajectory simulate(const SystemConfig& config, const PrimaryEphemeris& eph,
                    const ThirdBodyState& state0, TimeSpan span,
                    const IntegratorSettings& settings, double collision_radius) {
  config.validate();
  if (eph.mode() != config.mode) throw DomainError("ephemeris mode does not match config mode");
  if (state0.t != span.begin) throw DomainError("initial state time must equal the span start");
  const TimeSpan es = eph.span();
  if (!(span.begin >= es.begin && span.end <= es.end)) {
    throw DomainError("simulation span escapes the ephemeris span");
  }

  const double nu = config.nu;
  const double G = config.G;
  const bool rotating = config.mode == FrameMode::rotating;
  const MassLaw& law = eph.law();
  const FrameMode mode = config.mode;
  // The primaries' (R, R', theta) ride along in slots 6..8, started from the
  // ephemeris at span.begin: the third body then sees the same smooth R(t) the
  // integrator steps through instead of the ephemeris interpolant.
  RhsFunction rhs = [&law, nu, G, rotating, mode](double t, std::span<const double> y,
                                                  std::span<double> dy) {
    primary_field(law, G, mode, t, y.subspan(6, 3), dy.subspan(6, 3));
    const MassSample m = law.eval(t);
    PrimarySample p;
    p.t = t;
    p.u = m.u;
    p.u_dot = m.u_dot;
    p.R = y[6];
    p.R_dot = y[7];
    p.theta = y[8];
    const ThirdBodyState s{t, {y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
    // Unguarded: closeness to a primary is handled by the events below.
    const ThirdBodyDerivative d =
        rotating ? rotating_field(s, p, nu, G, false) : inertial_field(s, p, nu, G, false);
    dy[0] = d.r_dot.x;
    dy[1] = d.r_dot.y;
    dy[2] = d.r_dot.z;
    dy[3] = d.v_dot.x;
    dy[4] = d.v_dot.y;
    dy[5] = d.v_dot.z;
  };
  auto distance_to = [](std::span<const double> y, double offset) {
    const Vec3 d{y[0] - offset * y[6], y[1], y[2]};
    return norm(d);
  };
  const std::array<EventFunction, 3> guards{
      EventFunction{"near-primary-1",
                    [distance_to, nu, collision_radius](double, std::span<const double> y) {
                      return distance_to(y, -nu) - collision_radius;
                    },
                    EventDirection::falling},
      EventFunction{"near-primary-2",
                    [distance_to, nu, collision_radius](double, std::span<const double> y) {
                      return distance_to(y, 1.0 - nu) - collision_radius;
                    },
                    EventDirection::falling},
      EventFunction{"collision",
                    [collision_radius](double, std::span<const double> y) {
                      return y[6] - collision_radius;
                    },
                    EventDirection::falling},
  };
  const PrimarySample p0 = eph.sample(span.begin);
  const std::array<double, 9> y0{state0.r.x, state0.r.y, state0.r.z, state0.v.x, state0.v.y,
                                 state0.v.z, p0.R,       p0.R_dot,   p0.theta};
  DenseSolution sol = integrate(rhs, y0, span, settings, guards);
  return Trajectory(config.mode, config, std::move(sol));
}

ThirdBodyState self_similar_seed(const PrimaryEphemeris& eph, const Vec3& point, double t) {
  const PrimarySample p = eph.sample(t);
  return {t, point * p.R, point * p.R_dot};
}

double self_similarity_residual(const Trajectory& traj, const PrimaryEphemeris& eph,
                                const Vec3& point) {
  const auto& ts = traj.solution().times();
  double worst = 0.0;
  auto probe = [&](double t) {
    const double R = eph.sample(t).R;
    const Vec3 r = traj.state(t).r;
    worst = std::max(worst, norm(r - point * R) / std::max(R, 1.0));
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    probe(ts[i]);
    if (i + 1 < ts.size()) {
      for (int k = 1; k <= kInteriorSamples; ++k) {
        probe(ts[i] + (ts[i + 1] - ts[i]) * k / (kInteriorSamples + 1));
      }
    }
  }
  return worst;
}

double jacobi_constant(const ThirdBodyState& s, double nu) {
  const double r1 = norm(Vec3{s.r.x + nu, s.r.y, s.r.z});
  const double r2 = norm(Vec3{s.r.x - 1.0 + nu, s.r.y, s.r.z});
  return s.r.x * s.r.x + s.r.y * s.r.y + 2.0 * (1.0 - nu) / r1 + 2.0 * nu / r2 - dot(s.v, s.v);
}

}  // namespace vm3b

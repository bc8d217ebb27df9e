#include "vm3b/primaries.hpp"

#include <array>
#include <cmath>

#include "vm3b/errors.hpp"
#include "vm3b/format.hpp"

namespace vm3b {

namespace {

void require_within_validity(const MassLaw& law, TimeSpan span) {
  const TimeSpan v = law.validity();
  if (!(span.begin >= v.begin && span.end <= v.end)) {
    throw DomainError("span [" + format_roundtrip(span.begin) + ", " + format_roundtrip(span.end) +
                      "] exceeds the mass law validity [" + format_roundtrip(v.begin) + ", " +
                      format_roundtrip(v.end) + "]");
  }
}

}  // namespace

std::string to_string(FrameMode mode) {
  return mode == FrameMode::rotating ? "rotating" : "collinear";
}

FrameMode parse_frame_mode(std::string_view text) {
  if (text == "rotating") return FrameMode::rotating;
  if (text == "collinear") return FrameMode::collinear;
  throw DomainError("mode must be 'rotating' or 'collinear', got '" + std::string(text) + "'");
}

void SystemConfig::validate() const {
  if (!(nu > 0.0 && nu <= 0.5)) throw DomainError("nu must satisfy 0 < nu <= 1/2");
  if (!(G > 0.0) || !std::isfinite(G)) throw DomainError("G must be positive");
}

PrimaryInitialState consistent_initial_state(const SystemConfig& config, double t0,
                                             double R_dot0) {
  PrimaryInitialState init;
  init.R_dot = R_dot0;
  if (const auto kappa = config.law.kappa()) {
    const MassSample m = config.law.eval(t0);
    const double u3 = m.u * m.u * m.u;
    init.R = *kappa / (config.G * u3);
    init.R_dot = -3.0 * *kappa * m.u_dot / (config.G * u3 * m.u);
  }
  return init;
}

PrimarySample PrimaryEphemeris::sample(double t) const {
  double y[3];
  solution_.sample_into(t, y);
  const MassSample m = law_.eval(t);
  PrimarySample s;
  s.t = t;
  s.u = m.u;
  s.u_dot = m.u_dot;
  s.R = y[0];
  s.R_dot = y[1];
  s.theta = y[2];
  s.omega = mode_ == FrameMode::rotating ? 1.0 / (m.u * y[0] * y[0]) : 0.0;
  return s;
}

PrimaryEphemeris propagate_primaries(const SystemConfig& config, TimeSpan span,
                                     const IntegratorSettings& settings,
                                     std::optional<PrimaryInitialState> initial,
                                     double collision_radius) {
  config.validate();
  require_within_validity(config.law, span);
  const PrimaryInitialState init = initial.value_or(consistent_initial_state(config, span.begin));
  if (!(init.R > 0.0)) throw DomainError("initial separation R must be positive");

  const MassLaw& law = config.law;
  const double G = config.G;
  const FrameMode mode = config.mode;
  RhsFunction rhs = [&law, G, mode](double t, std::span<const double> y, std::span<double> dy) {
    primary_field(law, G, mode, t, y, dy);
  };
  const std::array<EventFunction, 1> collision{EventFunction{
      "collision",
      [collision_radius](double, std::span<const double> y) { return y[0] - collision_radius; },
      EventDirection::falling}};
  const std::array<double, 3> y0{init.R, init.R_dot, init.theta};
  DenseSolution sol = integrate(rhs, y0, span, settings, collision);
  return PrimaryEphemeris(config.mode, config.law, G, std::move(sol));
}

PrimaryEphemeris propagate_rotating(const SystemConfig& config, TimeSpan span,
                                    const IntegratorSettings& settings,
                                    std::optional<PrimaryInitialState> initial,
                                    double collision_radius) {
  if (config.mode != FrameMode::rotating) {
    throw DomainError("propagate_rotating needs mode = rotating");
  }
  return propagate_primaries(config, span, settings, initial, collision_radius);
}

PrimaryEphemeris propagate_collinear(const SystemConfig& config, TimeSpan span,
                                     const IntegratorSettings& settings,
                                     std::optional<PrimaryInitialState> initial,
                                     double collision_radius) {
  if (config.mode != FrameMode::collinear) {
    throw DomainError("propagate_collinear needs mode = collinear");
  }
  return propagate_primaries(config, span, settings, initial, collision_radius);
}

void primary_field(const MassLaw& law, double G, FrameMode mode, double t,
                   std::span<const double> y, std::span<double> dy) {
  const bool rotating = mode == FrameMode::rotating;
  const MassSample m = law.eval(t);
  const double R = y[0], Rd = y[1];
  const double gravity = -G * m.u * m.u / (R * R);
  const double centrifugal = rotating ? 1.0 / (m.u * R * R * R) : 0.0;
  // d/dt(u R') = u R'' + u' R'
  dy[0] = Rd;
  dy[1] = (centrifugal + gravity - m.u_dot * Rd) / m.u;
  dy[2] = rotating ? 1.0 / (m.u * R * R) : 0.0;
}

std::pair<double, double> primary_positions(const PrimaryEphemeris& eph, double nu, double t) {
  const double R = eph.sample(t).R;
  return {-nu * R, (1.0 - nu) * R};
}

TwoBodyState TwoBodyTrajectory::state(double t) const {
  double y[12];
  solution_.sample_into(t, y);
  return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}, {y[6], y[7], y[8]}, {y[9], y[10], y[11]}};
}

double TwoBodyTrajectory::separation(double t) const {
  const TwoBodyState s = state(t);
  return norm(s.r1 - s.r2);
}

Vec3 TwoBodyTrajectory::momentum(double t) const {
  const TwoBodyState s = state(t);
  const double u = law_.eval(t).u;
  return u * (m10_ * s.v1 + m20_ * s.v2);
}

Vec3 TwoBodyTrajectory::barycenter(double t) const {
  const TwoBodyState s = state(t);
  return (m10_ * s.r1 + m20_ * s.r2) * (1.0 / (m10_ + m20_));
}

TwoBodyTrajectory propagate_full_cartesian(double m10, double m20, const MassLaw& law,
                                           const TwoBodyState& initial, TimeSpan span,
                                           const IntegratorSettings& settings, double G,
                                           double collision_radius) {
  if (!(m10 > 0.0) || !(m20 > 0.0)) throw DomainError("primary masses must be positive");
  if (!(G > 0.0)) throw DomainError("G must be positive");
  if (norm(initial.r1 - initial.r2) == 0.0) throw DomainError("initial separation is zero");
  require_within_validity(law, span);

  RhsFunction rhs = [&law, m10, m20, G](double t, std::span<const double> y,
                                        std::span<double> dy) {
    const MassSample m = law.eval(t);
    const Vec3 r1{y[0], y[1], y[2]}, r2{y[3], y[4], y[5]};
    const Vec3 v1{y[6], y[7], y[8]}, v2{y[9], y[10], y[11]};
    const Vec3 r = r1 - r2;
    const double d = norm(r);
    // Force on body 1 divided by m10 * u, and on body 2 by m20 * u.
    const Vec3 pull = r * (-G * m.u / (d * d * d));
    const double loss = m.u_dot / m.u;
    const Vec3 a1 = m20 * pull - loss * v1;
    const Vec3 a2 = -m10 * pull - loss * v2;
    const std::array<double, 12> out{v1.x, v1.y, v1.z, v2.x, v2.y, v2.z,
                                     a1.x, a1.y, a1.z, a2.x, a2.y, a2.z};
    std::copy(out.begin(), out.end(), dy.begin());
  };
  const std::array<EventFunction, 1> collision{EventFunction{
      "collision",
      [collision_radius](double, std::span<const double> y) {
        const Vec3 r{y[0] - y[3], y[1] - y[4], y[2] - y[5]};
        return norm(r) - collision_radius;
      },
      EventDirection::falling}};
  const std::array<double, 12> y0{initial.r1.x, initial.r1.y, initial.r1.z, initial.r2.x,
                                  initial.r2.y, initial.r2.z, initial.v1.x, initial.v1.y,
                                  initial.v1.z, initial.v2.x, initial.v2.y, initial.v2.z};
  DenseSolution sol = integrate(rhs, y0, span, settings, collision);
  return TwoBodyTrajectory(m10, m20, law, std::move(sol));
}

}  // namespace vm3b

#pragma once

#include <array>
#include <vector>

#include "vm3b/ode.hpp"
#include "vm3b/primaries.hpp"
#include "vm3b/vec3.hpp"

namespace vm3b {

/// Third body in the working frame: synodic coordinates (rotating mode) or
/// inertial coordinates with the primaries on the x axis (collinear mode).
/// Its own mass factor m0 cancels from the equations and is never needed.
struct ThirdBodyState {
  double t = 0.0;
  Vec3 r;
  Vec3 v;
};

/// (r', v') for a third-body state.
struct ThirdBodyDerivative {
  Vec3 r_dot;
  Vec3 v_dot;
};

/// Synodic-frame field for fixed primary data:
///   u x'' + u' x' = g_x + 2 y'/R^2 - 2 y R'/R^3 + x/(u R^4)
///   u y'' + u' y' = g_y - 2 x'/R^2 + 2 x R'/R^3 + y/(u R^4)
///   u z'' + u' z' = g_z
/// with g = -G u^2 [(1-nu)(r - r1)/r1^3 + nu (r - r2)/r2^3], primaries at
/// (-nu R, 0, 0) and ((1-nu) R, 0, 0). Throws DomainError when the body is
/// closer than kCollisionRadius to either primary.
[[nodiscard]] ThirdBodyDerivative rotating_rhs(const ThirdBodyState& state,
                                               const PrimarySample& primaries, double nu,
                                               double G);
[[nodiscard]] ThirdBodyDerivative rotating_rhs(const ThirdBodyState& state,
                                               const PrimaryEphemeris& eph,
                                               const SystemConfig& config);

/// Inertial field for collinear primaries: only the gravitational terms and
/// the mass-accretion drag u'/u v survive.
[[nodiscard]] ThirdBodyDerivative inertial_rhs(const ThirdBodyState& state,
                                               const PrimarySample& primaries, double nu,
                                               double G);
[[nodiscard]] ThirdBodyDerivative inertial_rhs(const ThirdBodyState& state,
                                               const PrimaryEphemeris& eph,
                                               const SystemConfig& config);

class Trajectory {
 public:
  [[nodiscard]] FrameMode frame() const { return frame_; }
  [[nodiscard]] const SystemConfig& config() const { return config_; }
  [[nodiscard]] const DenseSolution& solution() const { return solution_; }
  [[nodiscard]] TimeSpan span() const { return solution_.span(); }
  [[nodiscard]] TerminalStatus status() const { return solution_.status(); }

  [[nodiscard]] ThirdBodyState state(double t) const;
  /// One state per accepted integration node.
  [[nodiscard]] std::vector<ThirdBodyState> samples() const;

 private:
  friend Trajectory simulate(const SystemConfig&, const PrimaryEphemeris&, const ThirdBodyState&,
                             TimeSpan, const IntegratorSettings&, double);
  Trajectory(FrameMode frame, SystemConfig config, DenseSolution sol)
      : frame_(frame), config_(std::move(config)), solution_(std::move(sol)) {}

  FrameMode frame_;
  SystemConfig config_;
  DenseSolution solution_;
};

/// Integrates the third body against a precomputed ephemeris. The span must
/// start at state0.t and lie inside the ephemeris span. The primaries' radial
/// equation is integrated alongside from the ephemeris state at span.begin.
/// The run stops with event status if the body comes within
/// `collision_radius` of a primary or the primaries collide.
[[nodiscard]] Trajectory simulate(const SystemConfig& config, const PrimaryEphemeris& eph,
                                  const ThirdBodyState& state0, TimeSpan span,
                                  const IntegratorSettings& settings,
                                  double collision_radius = kCollisionRadius);

/// Seed of the self-similar solution r = p R(t) at time t: position p R(t),
/// velocity p R'(t).
[[nodiscard]] ThirdBodyState self_similar_seed(const PrimaryEphemeris& eph, const Vec3& point,
                                               double t);

/// max over the trajectory of |r(t) - p R(t)| / max(R(t), 1), sampled at every
/// node and at interior points of every step.
[[nodiscard]] double self_similarity_residual(const Trajectory& traj, const PrimaryEphemeris& eph,
                                              const Vec3& point);

/// Classical-limit Jacobi integral x^2 + y^2 + 2(1-nu)/r1 + 2 nu/r2 - |v|^2,
/// primaries fixed at -nu and 1-nu.
[[nodiscard]] double jacobi_constant(const ThirdBodyState& state, double nu);

}  // namespace vm3b

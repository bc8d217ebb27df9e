#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "vm3b/mass_law.hpp"
#include "vm3b/ode.hpp"
#include "vm3b/vec3.hpp"

namespace vm3b {

/// rotating: primaries orbit each other, third body in the synodic frame.
/// collinear: zero angular momentum, primaries fall along a fixed line and the
/// third body is integrated in the inertial frame.
enum class FrameMode { rotating, collinear };

std::string to_string(FrameMode mode);
FrameMode parse_frame_mode(std::string_view text);

/// Normalised units: initial separation r0 = 1, total mass M0 = 1 and
/// angular rate omega0 = 1, so that theta' = 1 / (u R^2) in rotating mode.
struct SystemConfig {
  double nu = 0.5;  ///< m20 / M0, smaller primary's share, 0 < nu <= 1/2
  double G = 1.0;
  FrameMode mode = FrameMode::rotating;
  MassLaw law = MassLaw::constant();

  /// Throws DomainError naming the offending field.
  void validate() const;
};

struct PrimaryInitialState {
  double R = 1.0;
  double R_dot = 0.0;
  double theta = 0.0;
};

/// Initial data at t0 matching the law. A kappa-constrained law pins
/// R = kappa / (G u^3) and R' = -3 kappa u' / (G u^4); every other law starts
/// from R = 1 with the given R'.
[[nodiscard]] PrimaryInitialState consistent_initial_state(const SystemConfig& config, double t0,
                                                           double R_dot0 = 0.0);

inline constexpr double kCollisionRadius = 1e-6;

struct PrimarySample {
  double t = 0.0;
  double u = 1.0;
  double u_dot = 0.0;
  double R = 1.0;
  double R_dot = 0.0;
  double theta = 0.0;
  double omega = 0.0;  ///< 1/(u R^2) in rotating mode, 0 in collinear mode
};

/// Dense record of the primaries' relative motion R(t), theta(t).
class PrimaryEphemeris {
 public:
  [[nodiscard]] FrameMode mode() const { return mode_; }
  [[nodiscard]] TimeSpan span() const { return solution_.span(); }
  [[nodiscard]] TerminalStatus status() const { return solution_.status(); }
  [[nodiscard]] const DenseSolution& solution() const { return solution_; }
  [[nodiscard]] const MassLaw& law() const { return law_; }
  [[nodiscard]] double G() const { return G_; }

  /// Throws OutOfSpanError outside span().
  [[nodiscard]] PrimarySample sample(double t) const;

 private:
  friend PrimaryEphemeris propagate_primaries(const SystemConfig&, TimeSpan,
                                              const IntegratorSettings&,
                                              std::optional<PrimaryInitialState>, double);
  PrimaryEphemeris(FrameMode mode, MassLaw law, double G, DenseSolution sol)
      : mode_(mode), law_(std::move(law)), G_(G), solution_(std::move(sol)) {}

  FrameMode mode_;
  MassLaw law_;
  double G_;
  DenseSolution solution_;  // state (R, R', theta)
};

/// Integrates d/dt(u R') = 1/(u R^3) - G u^2/R^2 with theta' = 1/(u R^2).
/// Stops with event status if R falls below `collision_radius`.
[[nodiscard]] PrimaryEphemeris propagate_rotating(
    const SystemConfig& config, TimeSpan span, const IntegratorSettings& settings,
    std::optional<PrimaryInitialState> initial = std::nullopt,
    double collision_radius = kCollisionRadius);

/// Radial motion with zero angular momentum, d/dt(u R') = -G u^2/R^2, theta fixed.
[[nodiscard]] PrimaryEphemeris propagate_collinear(
    const SystemConfig& config, TimeSpan span, const IntegratorSettings& settings,
    std::optional<PrimaryInitialState> initial = std::nullopt,
    double collision_radius = kCollisionRadius);

/// Dispatches on config.mode.
[[nodiscard]] PrimaryEphemeris propagate_primaries(
    const SystemConfig& config, TimeSpan span, const IntegratorSettings& settings,
    std::optional<PrimaryInitialState> initial = std::nullopt,
    double collision_radius = kCollisionRadius);

/// Right side of the primaries' state (R, R', theta) at time t.
void primary_field(const MassLaw& law, double G, FrameMode mode, double t,
                   std::span<const double> y, std::span<double> dy);

/// Barycentric abscissae of the primaries on the frame x axis:
/// x1 = -nu R(t), x2 = (1 - nu) R(t).
[[nodiscard]] std::pair<double, double> primary_positions(const PrimaryEphemeris& eph, double nu,
                                                          double t);

struct TwoBodyState {
  Vec3 r1, r2, v1, v2;
};

/// Inertial-frame motion of both primaries, d/dt(m_i r_i') = -+ G m1 m2 r / r^3
/// with r = r1 - r2. Used to cross-check the reduced relative equation.
class TwoBodyTrajectory {
 public:
  [[nodiscard]] TimeSpan span() const { return solution_.span(); }
  [[nodiscard]] TerminalStatus status() const { return solution_.status(); }
  [[nodiscard]] const DenseSolution& solution() const { return solution_; }

  [[nodiscard]] TwoBodyState state(double t) const;
  [[nodiscard]] double separation(double t) const;
  /// Total momentum m1 r1' + m2 r2' (with the time-dependent masses).
  [[nodiscard]] Vec3 momentum(double t) const;
  [[nodiscard]] Vec3 barycenter(double t) const;

 private:
  friend TwoBodyTrajectory propagate_full_cartesian(double, double, const MassLaw&,
                                                    const TwoBodyState&, TimeSpan,
                                                    const IntegratorSettings&, double, double);
  TwoBodyTrajectory(double m10, double m20, MassLaw law, DenseSolution sol)
      : m10_(m10), m20_(m20), law_(std::move(law)), solution_(std::move(sol)) {}

  double m10_;
  double m20_;
  MassLaw law_;
  DenseSolution solution_;  // (r1, r2, v1, v2)
};

[[nodiscard]] TwoBodyTrajectory propagate_full_cartesian(
    double m10, double m20, const MassLaw& law, const TwoBodyState& initial, TimeSpan span,
    const IntegratorSettings& settings, double G = 1.0,
    double collision_radius = kCollisionRadius);

}  // namespace vm3b

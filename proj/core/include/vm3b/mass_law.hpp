#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vm3b/ode.hpp"

namespace vm3b {

/// Common mass factor u(t): every body has m_i(t) = m_i0 * u(t), so the mass
/// ratios stay fixed and the barycentre moves inertially.
enum class MassLawKind { constant, linear, exponential, mestschersky, kappa_constrained };

std::string to_string(MassLawKind kind);

struct MassSample {
  double u = 1.0;
  double u_dot = 0.0;
};

/// Text form of a law, "kind[:p1,p2,...]". Kinds and parameters:
///   constant[:u0]                u = u0 (default 1)
///   linear:a                     u = 1 + a t
///   exponential:alpha            u = exp(alpha t)
///   mestschersky:alpha,beta,gamma  u = (alpha t^2 + 2 beta t + gamma)^(-1/2)
///   kappa:k[,u0,u_dot0]          G R u^3 = k, solved numerically
struct MassLawSpec {
  MassLawKind kind = MassLawKind::constant;
  std::vector<double> params;

  [[nodiscard]] std::string to_string() const;
  /// Throws DomainError with a message naming the bad piece.
  static MassLawSpec parse(std::string_view text);

  friend bool operator==(const MassLawSpec&, const MassLawSpec&) = default;
};

class MassLaw {
 public:
  static MassLaw constant(double u0 = 1.0);
  static MassLaw linear(double rate);
  static MassLaw exponential(double rate);
  static MassLaw mestschersky(double alpha, double beta, double gamma);

  [[nodiscard]] MassLawKind kind() const { return kind_; }

  /// u(t) and du/dt. Throws OutOfSpanError outside a tabulated law's span and
  /// DomainError where a closed-form law stops being positive.
  [[nodiscard]] MassSample eval(double t) const;

  /// Interval around the reference epoch on which u stays positive and finite.
  [[nodiscard]] TimeSpan validity() const { return validity_; }

  /// Constraint constant and gravitational constant of a kappa-constrained law.
  [[nodiscard]] std::optional<double> kappa() const;
  [[nodiscard]] double gravity() const { return gravity_; }
  /// Dense (u, u_dot) table; null for closed-form laws.
  [[nodiscard]] const DenseSolution* table() const { return table_.get(); }

  [[nodiscard]] MassLawSpec spec() const;

 private:
  friend MassLaw solve_kappa_constrained(double, double, double, double, TimeSpan,
                                         const IntegratorSettings&, double);
  MassLaw(MassLawKind kind, std::array<double, 3> params, TimeSpan validity)
      : kind_(kind), params_(params), validity_(validity) {}

  MassLawKind kind_;
  std::array<double, 3> params_{};
  TimeSpan validity_;
  double gravity_ = 1.0;
  std::shared_ptr<const DenseSolution> table_;
};

/// Default smallest admissible kappa - 1 for the tabulated law.
inline constexpr double kMinKappaExcess = 1e-6;

/// Mass law that keeps G R(t) u(t)^3 = kappa while the primaries obey
/// d/dt(u R') = 1/(u R^3) - G u^2 / R^2.
///
/// Substituting R = kappa / (G u^3) leaves a scalar second-order equation in u,
///   u'' = 3 u'^2 / u + G^4 (kappa - 1) u^11 / (3 kappa^4),
/// which is integrated on `span`. For kappa > 1 the forcing term is positive,
/// so unless u_dot0 is negative enough u runs away in finite time; the table
/// then ends where u leaves [1e-12, 1e3] and validity() reports the cut.
/// Every accepted node is re-checked against the radial equation and the
/// algebraic constraint; a violation beyond 100 * rtol throws SolverError.
[[nodiscard]] MassLaw solve_kappa_constrained(double kappa, double G, double u0, double u_dot0,
                                              TimeSpan span, const IntegratorSettings& settings,
                                              double min_kappa_excess = kMinKappaExcess);

struct KappaLawCheck {
  double max_constraint_deviation = 0.0;  // |G R u^3 - kappa| / kappa
  double max_radial_residual = 0.0;       // radial equation residual, relative to (1 + |rhs|)
};

/// Re-evaluates the constraint and the radial equation at every node of a
/// kappa-constrained table.
[[nodiscard]] KappaLawCheck check_kappa_law(const MassLaw& law);

/// Builds a law from its text description. Tabulated laws are solved on `span`.
[[nodiscard]] MassLaw build_mass_law(const MassLawSpec& spec, double G, TimeSpan span,
                                     const IntegratorSettings& settings);

}  // namespace vm3b

#pragma once

// Self-similar configurations r(t) = (xi, eta, zeta) R(t) of the third body.
//
// Substituting the ansatz into the synodic equations and eliminating
// d/dt(u R') with the primaries' radial equation leaves time-independent
// conditions on the similarity coordinates:
//
//   xi - (1-nu)(xi+nu)/rho1^3 - nu(xi+nu-1)/rho2^3 = 0
//   eta (1 - (1-nu)/rho1^3 - nu/rho2^3)           = 0
//   zeta [1 - G R u^3 (1 - (1-nu)/rho1^3 - nu/rho2^3)] = 0
//
// rho1, rho2 being the distances to the primaries at (-nu, 0, 0), (1-nu, 0, 0).
// With zeta = 0 the first two lines are the classical libration conditions
// (L1-L5). Off-plane points need G R u^3 = kappa constant with kappa > 1
// (coplanar family L6/L7, escaping to zeta = +-inf as kappa -> 1). With
// collinear primaries the third line loses its rotation term, so the L4/L5
// triangle rotated about the x axis gives the ring L0.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vm3b/vec3.hpp"

namespace vm3b {

enum class PointLabel {
  L0, L1, L2, L3, L4, L5, L6, L7, L8, L9, L10, L11, L_plus_inf, L_minus_inf,
};

std::string to_string(PointLabel label);
/// Accepts "L0".."L11", "L+inf", "L-inf".
PointLabel parse_point_label(std::string_view text);

struct EquilibriumPoint {
  PointLabel label = PointLabel::L1;
  double xi = 0.0;
  double eta = 0.0;
  double zeta = 0.0;
  double nu = 0.5;
  std::optional<double> kappa;  ///< set for the coplanar family only
  double residual_norm = 0.0;

  [[nodiscard]] Vec3 coords() const { return {xi, eta, zeta}; }
};

/// Left sides of the stationarity conditions at p. The third entry is
/// kappa (1 - S) - 1 when kappa is supplied and zeta != 0; without kappa a
/// time-varying G R u^3 can only satisfy the third condition with zeta = 0,
/// so zeta itself is returned. Throws DomainError within 1e-12 of a primary.
[[nodiscard]] std::array<double, 3> residual(const Vec3& p, double nu,
                                             std::optional<double> kappa = std::nullopt);

/// Conditions for collinear (non-rotating) primaries:
/// {xi - ..., eta (1 - S), zeta (1 - S)}.
[[nodiscard]] std::array<double, 3> collinear_case_residual(const Vec3& p, double nu);

/// L4 (eta > 0) and L5 at (1/2 - nu, +-sqrt(3)/2, 0).
[[nodiscard]] std::array<EquilibriumPoint, 2> triangular(double nu);

/// L1 in (-nu, 1-nu), L2 in (1-nu, inf), L3 in (-inf, -nu), each refined to
/// |d xi| < 1e-12 by a bracketed Newton iteration.
[[nodiscard]] std::array<EquilibriumPoint, 3> collinear(double nu);

struct CoplanarOptions {
  // Multi-start grid used to catch branches the continuation does not track.
  double grid_xi_min = -2.0;
  double grid_xi_max = 2.0;
  double grid_zeta_max = 3.0;
  std::size_t grid_xi_points = 41;
  std::size_t grid_zeta_points = 30;
  /// Fraction of a grid cell by which every seed is shifted (0 <= offset < 1).
  double grid_offset = 0.5;
  std::size_t continuation_steps = 32;
  std::size_t newton_iterations = 80;
};

/// Coplanar (eta = 0, zeta != 0) solutions for the kappa-constrained motion.
/// The on-axis pair tracked by continuation from the nu = 1/2 closed form is
/// labelled L6 (zeta > 0) / L7; any further roots from the grid are labelled
/// L8.. in order of increasing xi with their mirrors following. Returned list
/// is closed under zeta -> -zeta. Throws DomainError for kappa <= 1.
[[nodiscard]] std::vector<EquilibriumPoint> coplanar(double nu, double kappa,
                                                     const CoplanarOptions& options = {});

/// Largest x in [lo, hi] (to `tol`) where `exists` still holds, assuming it
/// holds at lo and fails at hi.
[[nodiscard]] double bisect_existence_bound(const std::function<bool(double)>& exists, double lo,
                                            double hi, double tol);

struct KappaBoundOptions {
  double kappa_min = 1.0 + 1e-6;
  double kappa_max = 1e3;
  std::size_t scan_points = 40;
  double tolerance = 1e-6;
  CoplanarOptions coplanar;
};

/// Largest kappa for which coplanar() still finds roots beyond the L6/L7
/// pair; nullopt when the scan over [kappa_min, kappa_max] never finds any.
[[nodiscard]] std::optional<double> kappa_bound(double nu, const KappaBoundOptions& options = {});

struct RemoteLimitEntry {
  double kappa = 0.0;
  double xi = 0.0;
  double eta = 0.0;
  double zeta = 0.0;  ///< largest |zeta| among the coplanar roots at this kappa
};

struct RemoteLimitRecord {
  double nu = 0.5;
  std::vector<RemoteLimitEntry> entries;
  bool strictly_increasing = false;
  /// Every entry with kappa - 1 < 1e-9 has |zeta| > 1e3.
  bool diverged = false;
  /// Least-squares slope of log|zeta| against log(kappa - 1).
  double fitted_exponent = 0.0;
};

/// Tracks the coplanar pair along a strictly decreasing kappa sequence
/// towards 1, where it becomes the infinitely remote pair L+-inf.
[[nodiscard]] RemoteLimitRecord remote_limit(double nu, std::span<const double> kappas);

struct RingSolution {
  double nu = 0.5;
  double xi = 0.0;
  double radius = 0.0;

  /// (xi, radius cos phi, radius sin phi); phi = 0 is L4, phi = pi is L5.
  [[nodiscard]] Vec3 point(double phi) const;
  [[nodiscard]] std::vector<Vec3> sample(std::size_t count) const;
};

[[nodiscard]] RingSolution ring(double nu);

}  // namespace vm3b

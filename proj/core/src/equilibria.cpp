#include "vm3b/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vm3b/errors.hpp"
#include "vm3b/format.hpp"

namespace vm3b {

namespace {

constexpr double kSqrt3Half = std::numbers::sqrt3 / 2.0;
constexpr double kMinPrimaryDistance = 1e-12;
constexpr double kAcceptResidual = 1e-10;

void require_nu(double nu) {
  if (!(nu > 0.0 && nu <= 0.5)) throw DomainError("nu must satisfy 0 < nu <= 1/2");
}

void require_kappa(double kappa) {
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw DomainError("kappa must exceed 1");
}

struct Distances {
  double rho1;
  double rho2;
  double S;  // (1-nu)/rho1^3 + nu/rho2^3
};

Distances distances(const Vec3& p, double nu) {
  const double t2 = p.y * p.y + p.z * p.z;
  const double a = p.x + nu;
  const double b = p.x + nu - 1.0;
  const double rho1 = std::sqrt(a * a + t2);
  const double rho2 = std::sqrt(b * b + t2);
  if (rho1 < kMinPrimaryDistance || rho2 < kMinPrimaryDistance) {
    throw DomainError("point coincides with a primary");
  }
  return {rho1, rho2, (1.0 - nu) / (rho1 * rho1 * rho1) + nu / (rho2 * rho2 * rho2)};
}

double axial_condition(const Vec3& p, double nu, const Distances& d) {
  const double r13 = d.rho1 * d.rho1 * d.rho1;
  const double r23 = d.rho2 * d.rho2 * d.rho2;
  return p.x - (1.0 - nu) * (p.x + nu) / r13 - nu * (p.x + nu - 1.0) / r23;
}

double max_abs(const std::array<double, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

// ---------------------------------------------------------------- collinear

// Axial condition restricted to the x axis and its derivative, which is
// 1 + 2(1-nu)/|xi+nu|^3 + 2 nu/|xi+nu-1|^3 > 0: one root per interval.
struct AxisValue {
  double f;
  double df;
};

AxisValue axis_function(double xi, double nu) {
  const double a = xi + nu;
  const double b = xi + nu - 1.0;
  const double a3 = std::abs(a) * a * a;
  const double b3 = std::abs(b) * b * b;
  return {xi - (1.0 - nu) * a / a3 - nu * b / b3, 1.0 + 2.0 * (1.0 - nu) / a3 + 2.0 * nu / b3};
}

double refine_axis_root(double lo, double hi, double nu) {
  if (!(axis_function(lo, nu).f < 0.0 && axis_function(hi, nu).f > 0.0)) {
    throw SolverError("collinear root is not bracketed");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const AxisValue v = axis_function(x, nu);
    if (v.f == 0.0) return x;
    if (v.f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - v.f / v.df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) {
      return x;
    }
  }
  return x;
}

EquilibriumPoint make_point(PointLabel label, const Vec3& p, double nu,
                            std::optional<double> kappa) {
  EquilibriumPoint e;
  e.label = label;
  e.xi = p.x;
  e.eta = p.y;
  e.zeta = p.z;
  e.nu = nu;
  e.kappa = kappa;
  e.residual_norm = max_abs(residual(p, nu, kappa));
  return e;
}

// ---------------------------------------------------------------- coplanar

// Scaled coplanar system: F1 = axial condition, F2 = S - (kappa-1)/kappa.
struct CoplanarValue {
  double f1, f2;
  double j11, j12, j21, j22;
};

CoplanarValue coplanar_system(double xi, double zeta, double nu, double target) {
  const double a = xi + nu;
  const double b = xi + nu - 1.0;
  const double z2 = zeta * zeta;
  const double q1 = a * a + z2;
  const double q2 = b * b + z2;
  const double i13 = 1.0 / (q1 * std::sqrt(q1));
  const double i23 = 1.0 / (q2 * std::sqrt(q2));
  const double i15 = i13 / q1;
  const double i25 = i23 / q2;
  const double w1 = 1.0 - nu;
  const double S = w1 * i13 + nu * i23;
  const double ax = w1 * a * i15 + nu * b * i25;
  CoplanarValue v;
  v.f1 = xi - w1 * a * i13 - nu * b * i23;
  v.f2 = S - target;
  v.j11 = 1.0 - S + 3.0 * (w1 * a * a * i15 + nu * b * b * i25);
  v.j12 = 3.0 * zeta * ax;
  v.j21 = -3.0 * ax;
  v.j22 = -3.0 * zeta * (w1 * i15 + nu * i25);
  return v;
}

struct Point2 {
  double xi;
  double zeta;
};

// Damped Newton on the scaled system, zeta kept positive.
std::optional<Point2> coplanar_newton(Point2 x, double nu, double kappa, std::size_t iterations) {
  const double target = (kappa - 1.0) / kappa;
  auto merit = [&](const CoplanarValue& v) {
    const double g = v.f2 / target;
    return v.f1 * v.f1 + g * g;
  };
  CoplanarValue v = coplanar_system(x.xi, x.zeta, nu, target);
  double m = merit(v);
  bool small_step = false;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double det = v.j11 * v.j22 - v.j12 * v.j21;
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dxi = -(v.f1 * v.j22 - v.f2 * v.j12) / det;
    const double dzeta = -(v.j11 * v.f2 - v.j21 * v.f1) / det;
    double lambda = 1.0;
    Point2 trial{};
    CoplanarValue tv{};
    double tm = 0.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      trial = {x.xi + lambda * dxi, x.zeta + lambda * dzeta};
      if (trial.zeta > 0.0) {
        tv = coplanar_system(trial.xi, trial.zeta, nu, target);
        tm = merit(tv);
        if (std::isfinite(tm) && (tm < m || small_step)) {
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    const double step = std::max(std::abs(trial.xi - x.xi) / (1.0 + std::abs(x.xi)),
                                 std::abs(trial.zeta - x.zeta) / (1.0 + std::abs(x.zeta)));
    x = trial;
    v = tv;
    m = tm;
    if (small_step) break;
    if (step < 1e-13) small_step = true;  // one extra polishing iteration
  }
  if (!std::isfinite(x.xi) || !std::isfinite(x.zeta) || !(x.zeta > 0.0)) return std::nullopt;
  try {
    if (max_abs(residual({x.xi, 0.0, x.zeta}, nu, kappa)) < kAcceptResidual) return x;
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

// Equal masses: xi = 0 by symmetry and rho^3 = kappa/(kappa-1) in closed form.
Point2 symmetric_coplanar(double kappa) {
  const double excess = kappa - 1.0;  // exact for kappa in (1, 2]
  const double rho = std::cbrt(kappa / excess);
  double zeta = std::sqrt(rho * rho - 0.25);
  const double target = excess / kappa;
  for (int it = 0; it < 3; ++it) {
    const double r2 = 0.25 + zeta * zeta;
    const double r = std::sqrt(r2);
    const double g = 1.0 / (r2 * r) - target;
    const double dg = -3.0 * zeta / (r2 * r2 * r);
    const double next = zeta - g / dg;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    zeta = next;
  }
  return {0.0, zeta};
}

// Continuation in nu from the equal-mass closed form, with step halving.
std::optional<Point2> continue_in_nu(double nu, double kappa, const CoplanarOptions& opt) {
  Point2 x = symmetric_coplanar(kappa);
  if (nu == 0.5) return x;
  double current = 0.5;
  double step = (nu - 0.5) / static_cast<double>(std::max<std::size_t>(opt.continuation_steps, 1));
  const double min_step = 1e-9;
  while (current != nu) {
    double next = current + step;
    if ((step < 0.0 && next < nu) || (step > 0.0 && next > nu)) next = nu;
    if (auto sol = coplanar_newton(x, next, kappa, opt.newton_iterations)) {
      x = *sol;
      current = next;
    } else {
      step *= 0.5;
      if (std::abs(step) < min_step) return std::nullopt;
    }
  }
  return x;
}

bool same_point(const Point2& a, const Point2& b) {
  const double scale = 1.0 + std::max(std::abs(a.zeta), std::abs(b.zeta));
  return std::abs(a.xi - b.xi) < 1e-7 * scale && std::abs(a.zeta - b.zeta) < 1e-7 * scale;
}

}  // namespace

std::string to_string(PointLabel label) {
  switch (label) {
    case PointLabel::L_plus_inf:
      return "L+inf";
    case PointLabel::L_minus_inf:
      return "L-inf";
    default:
      return "L" + std::to_string(static_cast<int>(label));
  }
}

PointLabel parse_point_label(std::string_view text) {
  if (text == "L+inf") return PointLabel::L_plus_inf;
  if (text == "L-inf") return PointLabel::L_minus_inf;
  if (text.size() >= 2 && text.size() <= 3 && text[0] == 'L') {
    int n = 0;
    for (char c : text.substr(1)) {
      if (c < '0' || c > '9') throw DomainError("unknown point label '" + std::string(text) + "'");
      n = n * 10 + (c - '0');
    }
    if (n <= 11) return static_cast<PointLabel>(n);
  }
  throw DomainError("unknown point label '" + std::string(text) + "'");
}

std::array<double, 3> residual(const Vec3& p, double nu, std::optional<double> kappa) {
  const Distances d = distances(p, nu);
  const double third = (kappa && p.z != 0.0) ? *kappa * (1.0 - d.S) - 1.0 : p.z;
  return {axial_condition(p, nu, d), p.y * (1.0 - d.S), third};
}

std::array<double, 3> collinear_case_residual(const Vec3& p, double nu) {
  const Distances d = distances(p, nu);
  return {axial_condition(p, nu, d), p.y * (1.0 - d.S), p.z * (1.0 - d.S)};
}

std::array<EquilibriumPoint, 2> triangular(double nu) {
  require_nu(nu);
  return {make_point(PointLabel::L4, {0.5 - nu, kSqrt3Half, 0.0}, nu, std::nullopt),
          make_point(PointLabel::L5, {0.5 - nu, -kSqrt3Half, 0.0}, nu, std::nullopt)};
}

std::array<EquilibriumPoint, 3> collinear(double nu) {
  require_nu(nu);
  const double left = -nu;       // larger primary
  const double right = 1.0 - nu;  // smaller primary
  auto offset = [](double x) { return std::max(1e-9, 1e-9 * std::abs(x)); };

  double far_right = right + 1.0;
  while (axis_function(far_right, nu).f <= 0.0) far_right *= 2.0;
  double far_left = left - 1.0;
  while (axis_function(far_left, nu).f >= 0.0) far_left *= 2.0;

  const double l1 = refine_axis_root(left + offset(left), right - offset(right), nu);
  const double l2 = refine_axis_root(right + offset(right), far_right, nu);
  const double l3 = refine_axis_root(far_left, left - offset(left), nu);
  return {make_point(PointLabel::L1, {l1, 0.0, 0.0}, nu, std::nullopt),
          make_point(PointLabel::L2, {l2, 0.0, 0.0}, nu, std::nullopt),
          make_point(PointLabel::L3, {l3, 0.0, 0.0}, nu, std::nullopt)};
}

std::vector<EquilibriumPoint> coplanar(double nu, double kappa, const CoplanarOptions& opt) {
  require_nu(nu);
  require_kappa(kappa);

  std::optional<Point2> tracked = continue_in_nu(nu, kappa, opt);

  std::vector<Point2> extra;
  const std::size_t nx = std::max<std::size_t>(opt.grid_xi_points, 2);
  const std::size_t nz = std::max<std::size_t>(opt.grid_zeta_points, 1);
  const double dx = (opt.grid_xi_max - opt.grid_xi_min) / static_cast<double>(nx - 1);
  const double dz = opt.grid_zeta_max / static_cast<double>(nz);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nz; ++j) {
      const Point2 seed{opt.grid_xi_min + (static_cast<double>(i) + opt.grid_offset - 0.5) * dx,
                        (static_cast<double>(j) + opt.grid_offset) * dz};
      if (!(seed.zeta > 0.0)) continue;
      const auto sol = coplanar_newton(seed, nu, kappa, opt.newton_iterations);
      if (!sol) continue;
      if (tracked && same_point(*sol, *tracked)) continue;
      if (std::any_of(extra.begin(), extra.end(), [&](const Point2& e) { return same_point(e, *sol); })) {
        continue;
      }
      extra.push_back(*sol);
    }
  }
  if (!tracked && !extra.empty()) {
    // Continuation lost the branch; adopt the grid root farthest off the plane.
    auto it = std::max_element(extra.begin(), extra.end(),
                               [](const Point2& a, const Point2& b) { return a.zeta < b.zeta; });
    tracked = *it;
    extra.erase(it);
  }
  std::sort(extra.begin(), extra.end(), [](const Point2& a, const Point2& b) { return a.xi < b.xi; });
  if (extra.size() > 2) {
    throw SolverError("coplanar search found " + std::to_string(extra.size()) +
                      " roots beyond L6/L7 at nu=" + format_roundtrip(nu) +
                      ", kappa=" + format_roundtrip(kappa));
  }

  std::vector<EquilibriumPoint> out;
  if (tracked) {
    out.push_back(make_point(PointLabel::L6, {tracked->xi, 0.0, tracked->zeta}, nu, kappa));
    out.push_back(make_point(PointLabel::L7, {tracked->xi, 0.0, -tracked->zeta}, nu, kappa));
  }
  const std::array<PointLabel, 2> upper{PointLabel::L8, PointLabel::L9};
  const std::array<PointLabel, 2> lower{PointLabel::L10, PointLabel::L11};
  for (std::size_t k = 0; k < extra.size(); ++k) {
    out.push_back(make_point(upper[k], {extra[k].xi, 0.0, extra[k].zeta}, nu, kappa));
  }
  for (std::size_t k = 0; k < extra.size(); ++k) {
    out.push_back(make_point(lower[k], {extra[k].xi, 0.0, -extra[k].zeta}, nu, kappa));
  }
  return out;
}

double bisect_existence_bound(const std::function<bool(double)>& exists, double lo, double hi,
                              double tol) {
  if (!(hi > lo)) throw DomainError("existence bound needs lo < hi");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (exists(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::optional<double> kappa_bound(double nu, const KappaBoundOptions& opt) {
  require_nu(nu);
  require_kappa(opt.kappa_min);
  if (!(opt.kappa_max > opt.kappa_min)) throw DomainError("kappa_max must exceed kappa_min");
  auto exists = [&](double kappa) { return coplanar(nu, kappa, opt.coplanar).size() > 2; };

  const std::size_t n = std::max<std::size_t>(opt.scan_points, 2);
  const double lo_ex = opt.kappa_min - 1.0;
  const double ratio = (opt.kappa_max - 1.0) / lo_ex;
  std::optional<std::size_t> last_true;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = 1.0 + lo_ex * std::pow(ratio, static_cast<double>(i) / static_cast<double>(n - 1));
    if (exists(grid[i])) last_true = i;
  }
  if (!last_true) return std::nullopt;
  if (*last_true == n - 1) return grid.back();
  return bisect_existence_bound(exists, grid[*last_true], grid[*last_true + 1], opt.tolerance);
}

RemoteLimitRecord remote_limit(double nu, std::span<const double> kappas) {
  require_nu(nu);
  RemoteLimitRecord rec;
  rec.nu = nu;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    require_kappa(kappas[i]);
    if (i > 0 && !(kappas[i] < kappas[i - 1])) {
      throw DomainError("remote_limit needs a strictly decreasing kappa sequence");
    }
    const auto pts = coplanar(nu, kappas[i]);
    const auto l6 = std::find_if(pts.begin(), pts.end(),
                                 [](const EquilibriumPoint& p) { return p.label == PointLabel::L6; });
    if (l6 == pts.end()) {
      throw SolverError("coplanar pair not found at kappa=" + format_roundtrip(kappas[i]));
    }
    rec.entries.push_back({kappas[i], l6->xi, l6->eta, std::abs(l6->zeta)});
  }

  rec.strictly_increasing = !rec.entries.empty();
  for (std::size_t i = 1; i < rec.entries.size(); ++i) {
    if (!(rec.entries[i].zeta > rec.entries[i - 1].zeta)) rec.strictly_increasing = false;
  }
  bool any_near = false;
  rec.diverged = true;
  for (const auto& e : rec.entries) {
    if (e.kappa - 1.0 < 1e-9) {
      any_near = true;
      if (!(e.zeta > 1e3)) rec.diverged = false;
    }
  }
  rec.diverged = rec.diverged && any_near;

  if (rec.entries.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rec.entries.size());
    for (const auto& e : rec.entries) {
      const double x = std::log(e.kappa - 1.0);
      const double y = std::log(e.zeta);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rec.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rec;
}

Vec3 RingSolution::point(double phi) const {
  return {xi, radius * std::cos(phi), radius * std::sin(phi)};
}

std::vector<Vec3> RingSolution::sample(std::size_t count) const {
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(point(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count)));
  }
  return out;
}

RingSolution ring(double nu) {
  require_nu(nu);
  return {nu, 0.5 - nu, kSqrt3Half};
}

}  // namespace vm3b

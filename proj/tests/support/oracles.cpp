#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

double axial(double x, double nu) {
  const double a = x + nu;
  const double b = x + nu - 1.0;
  return x - (1.0 - nu) * a / std::pow(std::abs(a), 3) - nu * b / std::pow(std::abs(b), 3);
}

double bisect(double lo, double hi, double nu, double tol) {
  double flo = axial(lo, nu);
  if (flo * axial(hi, nu) > 0.0) throw std::runtime_error("oracle: no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = axial(mid, nu);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::array<double, 3> collinear_roots_bisection(double nu, double tol) {
  const double eps = 1e-10;
  return {bisect(-nu + eps, 1.0 - nu - eps, nu, tol), bisect(1.0 - nu + eps, 10.0, nu, tol),
          bisect(-10.0, -nu - eps, nu, tol)};
}

double radial_fall_time(double G, double R0, double R_end) {
  // t(eta) = sqrt(R0^3 / (2G)) * integral_0^eta 2 cos^2(s) ds
  const double eta_end = std::acos(std::sqrt(R_end / R0));
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const int panels = 2000;
  const double h = eta_end / panels;
  long double sum = 0.0L;
  for (int k = 0; k < panels; ++k) {
    const double mid = (k + 0.5) * h;
    for (int j = 0; j < 5; ++j) {
      const double c = std::cos(mid + 0.5 * h * x[j]);
      sum += w[j] * 0.5 * h * 2.0 * c * c;
    }
  }
  return std::sqrt(R0 * R0 * R0 / (2.0 * G)) * static_cast<double>(sum);
}

std::array<double, 3> classical_crtbp_accel(const std::array<double, 6>& s, double nu) {
  const double x = s[0], y = s[1], z = s[2], vx = s[3], vy = s[4];
  const double d1 = std::sqrt((x + nu) * (x + nu) + y * y + z * z);
  const double d2 = std::sqrt((x - 1 + nu) * (x - 1 + nu) + y * y + z * z);
  const double k1 = (1 - nu) / (d1 * d1 * d1);
  const double k2 = nu / (d2 * d2 * d2);
  // Gradient of x^2/2 + y^2/2 + (1-nu)/d1 + nu/d2 plus Coriolis.
  return {2 * vy + x - k1 * (x + nu) - k2 * (x - 1 + nu), -2 * vx + y - k1 * y - k2 * y,
          -k1 * z - k2 * z};
}

std::array<long double, 3> stationarity_long(long double xi, long double eta, long double zeta,
                                             long double nu, long double kappa, bool with_kappa) {
  const long double r1 = std::sqrt((xi + nu) * (xi + nu) + eta * eta + zeta * zeta);
  const long double r2 = std::sqrt((xi + nu - 1) * (xi + nu - 1) + eta * eta + zeta * zeta);
  const long double t1 = (1 - nu) / (r1 * r1 * r1);
  const long double t2 = nu / (r2 * r2 * r2);
  const long double first = xi - t1 * (xi + nu) - t2 * (xi + nu - 1);
  const long double second = eta * (1 - t1 - t2);
  const long double third = with_kappa ? kappa * (1 - t1 - t2) - 1 : zeta;
  return {first, second, third};
}

double symmetric_coplanar_zeta(double kappa) {
  const double rho = std::cbrt(kappa / (kappa - 1.0));
  return std::sqrt(rho * rho - 0.25);
}

double centred_derivative(const std::function<double(double)>& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

double reduced_energy(double R, double R_dot) {
  return 0.5 * (R_dot * R_dot + 1.0 / (R * R)) - 1.0 / R;
}

}  // namespace oracle

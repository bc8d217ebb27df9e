#include "vm3b/mass_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vm3b/errors.hpp"
#include "vm3b/format.hpp"

namespace vm3b {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKappaUpperCap = 1e3;
constexpr double kKappaLowerCap = 1e-12;

// Largest interval around t = 0 on which q(t) = a t^2 + 2 b t + c stays positive.
TimeSpan positive_quadratic_interval(double a, double b, double c) {
  double lo = -kInf, hi = kInf;
  auto clip = [&](double root) {
    if (!std::isfinite(root)) return;
    if (root > 0.0) hi = std::min(hi, root);
    if (root < 0.0) lo = std::max(lo, root);
  };
  if (a == 0.0) {
    if (b != 0.0) clip(-c / (2.0 * b));
  } else {
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      clip((-b + s) / a);
      clip((-b - s) / a);
    }
  }
  return {lo, hi};
}

double kappa_u_ddot(double kappa, double G, double u, double u_dot) {
  const double g2 = G * G;
  const double k2 = kappa * kappa;
  const double u2 = u * u;
  const double u4 = u2 * u2;
  const double u11 = u4 * u4 * u2 * u;
  return 3.0 * u_dot * u_dot / u + g2 * g2 * (kappa - 1.0) * u11 / (3.0 * k2 * k2);
}

double parse_number(std::string_view s, std::string_view what) {
  // strtod handles "1e-9", "inf" etc. consistently with the %.17g writer.
  const std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
    throw DomainError("mass law: cannot parse " + std::string(what) + " '" + tmp + "'");
  }
  return v;
}

}  // namespace

std::string to_string(MassLawKind kind) {
  switch (kind) {
    case MassLawKind::constant:
      return "constant";
    case MassLawKind::linear:
      return "linear";
    case MassLawKind::exponential:
      return "exponential";
    case MassLawKind::mestschersky:
      return "mestschersky";
    case MassLawKind::kappa_constrained:
      return "kappa";
  }
  return "unknown";
}

std::string MassLawSpec::to_string() const {
  std::string out = vm3b::to_string(kind);
  for (std::size_t i = 0; i < params.size(); ++i) {
    out += (i == 0 ? ':' : ',');
    out += format_roundtrip(params[i]);
  }
  return out;
}

MassLawSpec MassLawSpec::parse(std::string_view text) {
  MassLawSpec spec;
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  if (name == "constant") {
    spec.kind = MassLawKind::constant;
  } else if (name == "linear") {
    spec.kind = MassLawKind::linear;
  } else if (name == "exponential") {
    spec.kind = MassLawKind::exponential;
  } else if (name == "mestschersky") {
    spec.kind = MassLawKind::mestschersky;
  } else if (name == "kappa") {
    spec.kind = MassLawKind::kappa_constrained;
  } else {
    throw DomainError("mass law: unknown kind '" + std::string(name) + "'");
  }
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      spec.params.push_back(parse_number(rest.substr(0, comma), "parameter"));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }

  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (spec.params.size() < lo || spec.params.size() > hi) {
      throw DomainError("mass law: '" + std::string(name) + "' takes " + std::to_string(lo) +
                        (lo == hi ? "" : "-" + std::to_string(hi)) + " parameter(s)");
    }
  };
  switch (spec.kind) {
    case MassLawKind::constant:
      arity(0, 1);
      if (!spec.params.empty() && !(spec.params[0] > 0.0)) {
        throw DomainError("mass law: constant u0 must be positive");
      }
      break;
    case MassLawKind::linear:
    case MassLawKind::exponential:
      arity(1, 1);
      break;
    case MassLawKind::mestschersky:
      arity(3, 3);
      if (!(spec.params[2] > 0.0)) throw DomainError("mass law: mestschersky gamma must be positive");
      break;
    case MassLawKind::kappa_constrained:
      arity(1, 3);
      if (!(spec.params[0] > 1.0)) throw DomainError("kappa must exceed 1");
      if (spec.params.size() >= 2 && !(spec.params[1] > 0.0)) {
        throw DomainError("mass law: kappa u0 must be positive");
      }
      break;
  }
  return spec;
}

MassLaw MassLaw::constant(double u0) {
  if (!(u0 > 0.0) || !std::isfinite(u0)) throw DomainError("constant mass law needs u0 > 0");
  return MassLaw(MassLawKind::constant, {u0, 0.0, 0.0}, {-kInf, kInf});
}

MassLaw MassLaw::linear(double rate) {
  if (!std::isfinite(rate)) throw DomainError("linear mass law rate must be finite");
  TimeSpan v{-kInf, kInf};
  if (rate > 0.0) v.begin = -1.0 / rate;
  if (rate < 0.0) v.end = -1.0 / rate;
  return MassLaw(MassLawKind::linear, {rate, 0.0, 0.0}, v);
}

MassLaw MassLaw::exponential(double rate) {
  if (!std::isfinite(rate)) throw DomainError("exponential mass law rate must be finite");
  return MassLaw(MassLawKind::exponential, {rate, 0.0, 0.0}, {-kInf, kInf});
}

MassLaw MassLaw::mestschersky(double alpha, double beta, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("mestschersky law needs gamma > 0 so that u(0) is real");
  return MassLaw(MassLawKind::mestschersky, {alpha, beta, gamma},
                 positive_quadratic_interval(alpha, beta, gamma));
}

std::optional<double> MassLaw::kappa() const {
  if (kind_ != MassLawKind::kappa_constrained) return std::nullopt;
  return params_[0];
}

MassLawSpec MassLaw::spec() const {
  switch (kind_) {
    case MassLawKind::constant:
      return {kind_, {params_[0]}};
    case MassLawKind::linear:
    case MassLawKind::exponential:
      return {kind_, {params_[0]}};
    case MassLawKind::mestschersky:
      return {kind_, {params_[0], params_[1], params_[2]}};
    case MassLawKind::kappa_constrained:
      return {kind_, {params_[0], params_[1], params_[2]}};
  }
  return {};
}

MassSample MassLaw::eval(double t) const {
  MassSample s;
  switch (kind_) {
    case MassLawKind::constant:
      s = {params_[0], 0.0};
      break;
    case MassLawKind::linear:
      s = {1.0 + params_[0] * t, params_[0]};
      break;
    case MassLawKind::exponential: {
      const double u = std::exp(params_[0] * t);
      s = {u, params_[0] * u};
      break;
    }
    case MassLawKind::mestschersky: {
      const double q = params_[0] * t * t + 2.0 * params_[1] * t + params_[2];
      if (!(q > 0.0)) {
        throw DomainError("mestschersky mass law is not defined at t=" + std::to_string(t));
      }
      const double u = 1.0 / std::sqrt(q);
      s = {u, -(params_[0] * t + params_[1]) * u * u * u};
      break;
    }
    case MassLawKind::kappa_constrained: {
      double y[2];
      table_->sample_into(t, y);
      s = {y[0], y[1]};
      break;
    }
  }
  if (!(s.u > 0.0) || !std::isfinite(s.u)) {
    throw DomainError("mass law " + vm3b::to_string(kind_) + " is not positive at t=" +
                      std::to_string(t));
  }
  return s;
}

MassLaw solve_kappa_constrained(double kappa, double G, double u0, double u_dot0, TimeSpan span,
                                const IntegratorSettings& settings, double min_kappa_excess) {
  if (!(kappa > 1.0)) throw DomainError("kappa must exceed 1");
  if (!(kappa - 1.0 >= min_kappa_excess)) {
    throw DomainError("kappa - 1 = " + format_roundtrip(kappa - 1.0) +
                      " is below the configured minimum " + format_roundtrip(min_kappa_excess));
  }
  if (!(G > 0.0)) throw DomainError("G must be positive");
  if (!(u0 > 0.0)) throw DomainError("kappa law needs u0 > 0");
  if (!std::isfinite(u_dot0)) throw DomainError("kappa law needs a finite u_dot0");

  RhsFunction rhs = [kappa, G](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = kappa_u_ddot(kappa, G, y[0], y[1]);
  };
  const std::array<EventFunction, 2> guards{
      EventFunction{"u-runaway",
                    [](double, std::span<const double> y) { return y[0] - kKappaUpperCap; },
                    EventDirection::rising},
      EventFunction{"u-vanishes",
                    [](double, std::span<const double> y) { return y[0] - kKappaLowerCap; },
                    EventDirection::falling},
  };
  const std::array<double, 2> y0{u0, u_dot0};
  auto table = std::make_shared<DenseSolution>(integrate(rhs, y0, span, settings, guards));

  MassLaw law(MassLawKind::kappa_constrained, {kappa, u0, u_dot0}, table->span());
  law.gravity_ = G;
  law.table_ = std::move(table);

  const KappaLawCheck check = check_kappa_law(law);
  const double bound = 100.0 * settings.rtol;
  if (check.max_constraint_deviation > bound || check.max_radial_residual > bound) {
    throw SolverError("kappa-constrained law failed its a posteriori check (constraint " +
                      format_roundtrip(check.max_constraint_deviation) + ", radial residual " +
                      format_roundtrip(check.max_radial_residual) + ")");
  }
  return law;
}

KappaLawCheck check_kappa_law(const MassLaw& law) {
  const auto kappa = law.kappa();
  if (!kappa || law.table() == nullptr) throw DomainError("not a kappa-constrained law");
  const double k = *kappa;
  const double G = law.gravity();
  const DenseSolution& tab = *law.table();

  KappaLawCheck out;
  for (std::size_t i = 0; i < tab.times().size(); ++i) {
    const auto y = tab.node_state(i);
    const double u = y[0], ud = y[1];
    const double udd = kappa_u_ddot(k, G, u, ud);
    const double R = k / (G * u * u * u);
    // u R' = -3 kappa u' / (G u^3), differentiated once more by the chain rule.
    const double lhs = -3.0 * k / G * (udd / (u * u * u) - 3.0 * ud * ud / (u * u * u * u));
    const double rhs = 1.0 / (u * R * R * R) - G * u * u / (R * R);
    out.max_constraint_deviation =
        std::max(out.max_constraint_deviation, std::abs(G * R * u * u * u - k) / k);
    out.max_radial_residual =
        std::max(out.max_radial_residual, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return out;
}

MassLaw build_mass_law(const MassLawSpec& spec, double G, TimeSpan span,
                       const IntegratorSettings& settings) {
  const auto& p = spec.params;
  auto at = [&](std::size_t i, double fallback) { return i < p.size() ? p[i] : fallback; };
  switch (spec.kind) {
    case MassLawKind::constant:
      return MassLaw::constant(at(0, 1.0));
    case MassLawKind::linear:
      return MassLaw::linear(at(0, 0.0));
    case MassLawKind::exponential:
      return MassLaw::exponential(at(0, 0.0));
    case MassLawKind::mestschersky:
      return MassLaw::mestschersky(at(0, 0.0), at(1, 0.0), at(2, 1.0));
    case MassLawKind::kappa_constrained:
      if (p.empty()) throw DomainError("kappa law needs a kappa value");
      return solve_kappa_constrained(p[0], G, at(1, 1.0), at(2, 0.0), span, settings);
  }
  throw DomainError("unknown mass law kind");
}

}  // namespace vm3b

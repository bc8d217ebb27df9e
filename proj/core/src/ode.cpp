#include "vm3b/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vm3b/errors.hpp"

namespace vm3b {

namespace {

// Dormand & Prince (1980) tableau with Shampine's dense output weights.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// Step size controller constants (Hairer, Norsett & Wanner, DOPRI5).
constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;   // largest shrink 1/5
constexpr double kFacMax = 10.0;  // largest growth
constexpr double kBeta = 0.04;    // PI stabilisation

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool crossed(double g_old, double g_new, EventDirection dir) {
  const bool rising = g_old < 0.0 && g_new >= 0.0;
  const bool falling = g_old > 0.0 && g_new <= 0.0;
  switch (dir) {
    case EventDirection::rising:
      return rising;
    case EventDirection::falling:
      return falling;
    case EventDirection::any:
      break;
  }
  return rising || falling;
}

}  // namespace

std::string to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::completed:
      return "completed";
    case TerminalStatus::event_stopped:
      return "event-stopped";
    case TerminalStatus::step_failure:
      return "step-failure";
  }
  return "unknown";
}

void IntegratorSettings::validate() const {
  if (!(rtol > 0.0) || !std::isfinite(rtol)) throw DomainError("rtol must be positive");
  if (!(atol > 0.0) || !std::isfinite(atol)) throw DomainError("atol must be positive");
  if (!(initial_step > 0.0)) throw DomainError("initial_step must be positive");
  if (!(max_step >= initial_step)) throw DomainError("max_step must be >= initial_step");
  if (max_steps == 0) throw DomainError("max_steps must be positive");
  if (!(event_tolerance > 0.0)) throw DomainError("event_tolerance must be positive");
}

std::span<const double> DenseSolution::node_state(std::size_t i) const {
  return {states_.data() + i * dim_, dim_};
}

std::vector<double> DenseSolution::sample(double t) const {
  std::vector<double> out(dim_);
  sample_into(t, out);
  return out;
}

void DenseSolution::sample_into(double t, std::span<double> out) const {
  if (times_.empty() || !(t >= t_begin() && t <= t_end())) {
    throw OutOfSpanError("sample time " + std::to_string(t) + " outside solved span [" +
                         std::to_string(times_.empty() ? 0.0 : t_begin()) + ", " +
                         std::to_string(times_.empty() ? 0.0 : t_end()) + "]");
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t node = static_cast<std::size_t>(it - times_.begin()) - 1;
  if (times_[node] == t || node == step_count()) {
    const auto y = node_state(node);
    std::copy(y.begin(), y.end(), out.begin());
    return;
  }
  interpolate(node, t, out);
}

void DenseSolution::interpolate(std::size_t step, double t, std::span<double> out) const {
  const double theta = (t - times_[step]) / step_h_[step];
  const double theta1 = 1.0 - theta;
  const double* y = states_.data() + step * dim_;
  const double* r = coeffs_.data() + step * 4 * dim_;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double r2 = r[i], r3 = r[dim_ + i], r4 = r[2 * dim_ + i], r5 = r[3 * dim_ + i];
    out[i] = y[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
  }
}

class DormandPrince {
 public:
  DormandPrince(const RhsFunction& rhs, std::size_t n, const IntegratorSettings& s,
                std::span<const EventFunction> events)
      : rhs_(rhs), n_(n), s_(s), events_(events) {
    for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_, &yerr_}) {
      k->assign(n_, 0.0);
    }
  }

  DenseSolution run(std::span<const double> y0, TimeSpan span) {
    DenseSolution sol;
    sol.dim_ = n_;
    sol.times_.push_back(span.begin);
    sol.states_.assign(y0.begin(), y0.end());

    std::vector<double> y(y0.begin(), y0.end());
    double t = span.begin;
    eval(t, y, k1_, sol);
    if (!all_finite(k1_)) throw DomainError("right-hand side is not finite at the initial state");

    std::vector<double> g_old(events_.size());
    for (std::size_t e = 0; e < events_.size(); ++e) g_old[e] = events_[e].value(t, y);

    double h = std::min({s_.initial_step, s_.max_step, span.length()});
    double err_old = 1e-4;
    bool last_rejected = false;
    std::size_t attempts = 0;

    while (t < span.end) {
      if (sol.step_count() >= s_.max_steps || attempts >= 4 * s_.max_steps) {
        sol.status_ = TerminalStatus::step_failure;
        sol.message_ = "maximum step count exceeded at t=" + std::to_string(t);
        return sol;
      }
      ++attempts;
      bool final_step = false;
      if (t + h >= span.end) {
        h = span.end - t;
        final_step = true;
      }
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
        sol.status_ = TerminalStatus::step_failure;
        sol.message_ = "step size underflow at t=" + std::to_string(t);
        return sol;
      }

      const double err = attempt(t, y, h, sol);
      if (!(err <= 1.0)) {
        const double shrink =
            std::isfinite(err) ? std::min(1.0 / kFacMin, std::pow(err, 0.2) / kSafety)
                               : 1.0 / kFacMin;
        h /= shrink;
        last_rejected = true;
        continue;
      }

      // Accepted: build the continuous extension before k1 is overwritten.
      const double t_new = final_step ? span.end : t + h;
      store_step(sol, y, h);
      std::swap(k1_, k7_);  // FSAL

      // Event scan on the freshly accepted step.
      std::optional<EventRecord> hit;
      std::vector<double> g_new(events_.size());
      for (std::size_t e = 0; e < events_.size(); ++e) {
        g_new[e] = events_[e].value(t_new, ynew_);
        if (crossed(g_old[e], g_new[e], events_[e].direction)) {
          const double tc = locate(sol, e, t, t_new, g_old[e]);
          if (!hit || tc < hit->t) hit = EventRecord{e, events_[e].name, tc};
        }
      }
      if (hit) {
        std::vector<double> yc(n_);
        sol.interpolate(sol.step_count() - 1, hit->t, yc);
        sol.times_.push_back(hit->t);
        sol.states_.insert(sol.states_.end(), yc.begin(), yc.end());
        sol.status_ = TerminalStatus::event_stopped;
        sol.message_ = "event '" + hit->name + "' at t=" + std::to_string(hit->t);
        sol.event_ = std::move(hit);
        return sol;
      }

      sol.times_.push_back(t_new);
      sol.states_.insert(sol.states_.end(), ynew_.begin(), ynew_.end());
      y = ynew_;
      t = t_new;
      g_old = std::move(g_new);

      const double fac11 = std::pow(err, 0.2 - kBeta * 0.75);
      double fac = fac11 / std::pow(err_old, kBeta);
      fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      err_old = std::max(err, 1e-4);
      last_rejected = false;
      h = std::min(h_new, s_.max_step);
    }
    sol.status_ = TerminalStatus::completed;
    return sol;
  }

 private:
  const RhsFunction& rhs_;
  std::size_t n_;
  const IntegratorSettings& s_;
  std::span<const EventFunction> events_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, yerr_;

  void eval(double t, std::span<const double> y, std::span<double> out, DenseSolution& sol) {
    rhs_(t, y, out);
    ++sol.rhs_evaluations_;
  }

  // One trial step of size h from (t, y); leaves the 5th-order result in ynew_
  // and returns the scaled error norm (infinite when anything went non-finite).
  double attempt(double t, std::span<const double> y, double h, DenseSolution& sol) {
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * a21 * k1_[i];
    eval(t + c2 * h, ytmp_, k2_, sol);
    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    eval(t + c3 * h, ytmp_, k3_, sol);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    eval(t + c4 * h, ytmp_, k4_, sol);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    eval(t + c5 * h, ytmp_, k5_, sol);
    for (std::size_t i = 0; i < n_; ++i)
      ytmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                             a65 * k5_[i]);
    eval(t + h, ytmp_, k6_, sol);
    for (std::size_t i = 0; i < n_; ++i)
      ynew_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                             a76 * k6_[i]);
    eval(t + h, ynew_, k7_, sol);

    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      yerr_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                      e7 * k7_[i]);
      const double sk = s_.atol + s_.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      const double r = yerr_[i] / sk;
      sum += r * r;
    }
    const double err = std::sqrt(sum / static_cast<double>(n_));
    if (!std::isfinite(err) || !all_finite(ynew_) || !all_finite(k7_)) {
      return std::numeric_limits<double>::infinity();
    }
    return err;
  }

  void store_step(DenseSolution& sol, std::span<const double> y, double h) {
    const std::size_t base = sol.coeffs_.size();
    sol.coeffs_.resize(base + 4 * n_);
    double* r = sol.coeffs_.data() + base;
    for (std::size_t i = 0; i < n_; ++i) {
      const double r2 = ynew_[i] - y[i];
      const double r3 = h * k1_[i] - r2;
      const double r4 = r2 - h * k7_[i] - r3;
      const double r5 = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                             d6 * k6_[i] + d7 * k7_[i]);
      r[i] = r2;
      r[n_ + i] = r3;
      r[2 * n_ + i] = r4;
      r[3 * n_ + i] = r5;
    }
    sol.step_h_.push_back(h);
  }

  // Bisection on the interpolant of the last stored step. Returns the first
  // bracket endpoint at which the crossing has already happened.
  double locate(const DenseSolution& sol, std::size_t e, double t0, double t1, double g0) {
    const std::size_t step = sol.step_count() - 1;
    std::vector<double> yy(n_);
    double lo = t0, hi = t1;
    while (hi - lo > s_.event_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      sol.interpolate(step, mid, yy);
      const double g = events_[e].value(mid, yy);
      if (crossed(g0, g, events_[e].direction)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }
};

DenseSolution integrate(const RhsFunction& rhs, std::span<const double> y0, TimeSpan span,
                        const IntegratorSettings& settings,
                        std::span<const EventFunction> events) {
  settings.validate();
  if (!(span.end > span.begin) || !std::isfinite(span.begin) || !std::isfinite(span.end)) {
    throw DomainError("integration span must be nonempty and finite");
  }
  if (y0.empty()) throw DomainError("initial state is empty");
  if (!all_finite(y0)) throw DomainError("initial state is not finite");
  DormandPrince stepper(rhs, y0.size(), settings, events);
  return stepper.run(y0, span);
}

}  // namespace vm3b

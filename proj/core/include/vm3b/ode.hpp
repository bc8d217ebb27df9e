#pragma once

// Explicit Dormand-Prince 5(4) integrator with continuous output and scalar
// event location. Every dynamics module in the library runs on top of this.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vm3b {

/// Closed time interval [begin, end]; integration always runs forward.
struct TimeSpan {
  double begin = 0.0;
  double end = 0.0;

  [[nodiscard]] double length() const { return end - begin; }
  [[nodiscard]] bool contains(double t) const { return t >= begin && t <= end; }
};

struct IntegratorSettings {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-4;
  double max_step = 1.0;
  std::size_t max_steps = 2'000'000;
  /// Width of the final bisection bracket when locating an event (time units).
  double event_tolerance = 1e-13;

  /// Throws DomainError naming the offending field.
  void validate() const;
};

using RhsFunction =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class EventDirection { any, rising, falling };

/// Scalar event g(t, y); integration stops at the first zero crossing.
struct EventFunction {
  std::string name;
  std::function<double(double t, std::span<const double> y)> value;
  EventDirection direction = EventDirection::any;
};

enum class TerminalStatus { completed, event_stopped, step_failure };

std::string to_string(TerminalStatus status);

struct EventRecord {
  std::size_t index = 0;
  std::string name;
  double t = 0.0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Accepted steps of an integration together with their interpolation data.
///
/// Node i holds (t_i, y_i); step i covers [t_i, t_{i+1}] and carries the four
/// extra coefficient vectors of the Dormand-Prince continuous extension. The
/// last node of an event-stopped run sits on the located event time.
class DenseSolution {
 public:
  DenseSolution() = default;

  [[nodiscard]] std::size_t dimension() const { return dim_; }
  [[nodiscard]] double t_begin() const { return times_.front(); }
  [[nodiscard]] double t_end() const { return times_.back(); }
  [[nodiscard]] TimeSpan span() const { return {t_begin(), t_end()}; }
  [[nodiscard]] TerminalStatus status() const { return status_; }
  [[nodiscard]] const std::string& message() const { return message_; }
  [[nodiscard]] const std::optional<EventRecord>& event() const { return event_; }

  [[nodiscard]] std::size_t step_count() const { return step_h_.size(); }
  [[nodiscard]] std::size_t rhs_evaluations() const { return rhs_evaluations_; }
  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] std::span<const double> node_state(std::size_t i) const;

  /// Continuous solution at t; throws OutOfSpanError outside [t_begin, t_end].
  [[nodiscard]] std::vector<double> sample(double t) const;
  void sample_into(double t, std::span<double> out) const;

  friend bool operator==(const DenseSolution&, const DenseSolution&) = default;

 private:
  friend class DormandPrince;

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<double> states_;  // (step_count + 1) * dim
  std::vector<double> step_h_;  // nominal step size (differs from node spacing on a cut step)
  std::vector<double> coeffs_;  // step_count * 4 * dim
  TerminalStatus status_ = TerminalStatus::completed;
  std::string message_;
  std::optional<EventRecord> event_;
  std::size_t rhs_evaluations_ = 0;

  void interpolate(std::size_t step, double t, std::span<double> out) const;
};

/// Integrates y' = rhs(t, y) from span.begin to span.end.
///
/// Step failures (step size underflow, non-finite derivatives that cannot be
/// stepped around, exhausted step budget) are reported through the returned
/// status rather than thrown, so callers keep the partial solution. Invalid
/// inputs throw DomainError.
[[nodiscard]] DenseSolution integrate(const RhsFunction& rhs, std::span<const double> y0,
                                      TimeSpan span, const IntegratorSettings& settings,
                                      std::span<const EventFunction> events = {});

}  // namespace vm3b

#pragma once

// Run configuration for the vm3b harness. Text grammar (see README):
//
//   file    := { line }
//   line    := blank | comment | section | entry
//   comment := '#' any text
//   section := '[' name ']'
//   entry   := key '=' value
//
// Lists are comma separated. Unknown sections or keys are rejected.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vm3b/equilibria.hpp"
#include "vm3b/mass_law.hpp"
#include "vm3b/ode.hpp"
#include "vm3b/primaries.hpp"

namespace vm3b::harness {

/// Bad configuration or command line; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One seed point: a label ("L1", "L0:phi") or an explicit "xi/eta/zeta".
struct PointSelection {
  std::optional<PointLabel> label;
  double phi = 0.0;  // ring angle, only for L0
  double xi = 0.0;
  double eta = 0.0;
  double zeta = 0.0;

  [[nodiscard]] std::string to_string() const;
  static PointSelection parse(std::string_view text);
  friend bool operator==(const PointSelection&, const PointSelection&) = default;
};

enum class Family { collinear, triangular, coplanar, ring };
std::string to_string(Family f);
Family parse_family(std::string_view text);

struct RunConfig {
  // [system]
  double nu = 0.5;
  double G = 1.0;
  FrameMode mode = FrameMode::rotating;
  double R_dot0 = 0.0;
  std::optional<double> kappa;  // for coplanar points under a non-tabulated law

  // [mass_law]
  MassLawSpec law;

  // [integration]
  double t_begin = 0.0;
  double t_end = 10.0;
  IntegratorSettings settings;

  // [run]
  std::vector<PointSelection> points;
  std::vector<Family> families{Family::collinear, Family::triangular};
  double threshold = 1e-6;
  std::size_t ring_samples = 8;

  // [sweep]
  std::vector<double> sweep_nu;
  std::vector<double> sweep_kappa;
  std::size_t workers = 0;  // 0: hardware concurrency

  // [output]
  std::string out_dir = "vm3b-out";
  bool svg = false;

  /// Throws ConfigError with "section.key: reason".
  void validate() const;
  /// kappa of a kappa-constrained law, else the [system] kappa.
  [[nodiscard]] std::optional<double> effective_kappa() const;
  [[nodiscard]] SystemConfig system(const MassLaw& law) const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

/// Parses and validates.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

double parse_double(std::string_view text, std::string_view field);
std::vector<double> parse_double_list(std::string_view text, std::string_view field);

}  // namespace vm3b::harness

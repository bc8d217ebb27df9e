#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"
#include "vm3b/equilibria.hpp"

namespace vm3b::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitThreshold = 3,
};

/// A seed point resolved against the configuration.
struct ResolvedPoint {
  std::string name;  // "L4", "L0:0.5", "0.5/0.1/0"
  std::optional<PointLabel> label;
  Vec3 coords;
};

/// Throws ConfigError for selections that cannot exist under `config`
/// (coplanar points without a kappa law, ring points in rotating mode, ...).
std::vector<ResolvedPoint> resolve_points(const RunConfig& config, bool for_simulation);

/// Records of the requested families, in family order.
std::vector<EquilibriumPoint> collect_equilibria(const RunConfig& config);

std::string equilibria_csv(const std::vector<EquilibriumPoint>& points);
std::string equilibria_json(const std::vector<EquilibriumPoint>& points);

// Each command writes into config.out_dir (plus a copy of the effective
// config as run.cfg) and returns the process exit code. Solver and domain
// failures propagate as exceptions; run_cli maps them to exit codes.
int run_equilibria(const RunConfig& config, std::ostream& log);
int run_propagate(const RunConfig& config, std::ostream& log);
int run_simulate(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);
int run_sweep(const RunConfig& config, std::ostream& log);

}  // namespace vm3b::harness

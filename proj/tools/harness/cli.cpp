#include "cli.hpp"

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"
#include "vm3b/errors.hpp"

namespace vm3b::harness {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> nu;
  std::optional<std::string> kappa;
  std::optional<std::string> mass_law;
  std::optional<double> t_end;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::optional<std::string> points;
  std::optional<std::string> families;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<double> threshold;
  std::optional<std::size_t> workers;
  bool svg = false;
};

void add_common(CLI::App* cmd, Overrides& o, bool sweep) {
  cmd->add_option("--config", o.config, "Run configuration file");
  cmd->add_option("--nu", o.nu, sweep ? "Comma-separated nu grid" : "Mass parameter nu");
  cmd->add_option("--kappa", o.kappa,
                  sweep ? "Comma-separated kappa grid" : "Constraint constant G R u^3 (> 1)");
  cmd->add_option("--mass-law", o.mass_law, "kind[:params], e.g. linear:0.1, kappa:2,1,-0.1");
  cmd->add_option("--t-end", o.t_end, "End of the time span");
  cmd->add_option("--rtol", o.rtol, "Relative tolerance");
  cmd->add_option("--atol", o.atol, "Absolute tolerance");
  cmd->add_option("--points", o.points, "Seed points: L1,..,L11, L0:phi or xi/eta/zeta");
  cmd->add_option("--families", o.families, "collinear,triangular,coplanar,ring");
  cmd->add_option("--mode", o.mode, "rotating | collinear");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--threshold", o.threshold, "Verification threshold");
  if (sweep) cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  cmd->add_flag("--svg", o.svg, "Also write SVG quick-look plots");
}

RunConfig assemble(const Overrides& o, bool sweep) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.nu) {
    if (sweep) {
      c.sweep_nu = parse_double_list(*o.nu, "--nu");
    } else {
      c.nu = parse_double(*o.nu, "--nu");
    }
  }
  if (o.mass_law) {
    try {
      c.law = MassLawSpec::parse(*o.mass_law);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--mass-law: ") + e.what());
    }
  }
  if (o.kappa) {
    if (sweep) {
      c.sweep_kappa = parse_double_list(*o.kappa, "--kappa");
    } else {
      const double k = parse_double(*o.kappa, "--kappa");
      if (!(k > 1.0)) throw ConfigError("--kappa: kappa must exceed 1");
      if (c.law.kind == MassLawKind::kappa_constrained) {
        c.law.params[0] = k;
        c.kappa.reset();
      } else {
        c.kappa = k;
      }
    }
  }
  if (o.t_end) c.t_end = *o.t_end;
  if (o.rtol) c.settings.rtol = *o.rtol;
  if (o.atol) c.settings.atol = *o.atol;
  if (o.points) {
    c.points.clear();
    std::string_view rest = *o.points;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      c.points.push_back(PointSelection::parse(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (o.families) {
    c.families.clear();
    std::string_view rest = *o.families;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      c.families.push_back(parse_family(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  if (o.mode) {
    try {
      c.mode = parse_frame_mode(*o.mode);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("--mode: ") + e.what());
    }
  }
  if (o.out) c.out_dir = *o.out;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.workers) c.workers = *o.workers;
  if (o.svg) c.svg = true;
  if (sweep && c.sweep_nu.empty() && c.sweep_kappa.empty()) {
    throw ConfigError("sweep: grid is empty (give --nu and/or --kappa lists)");
  }
  c.validate();
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-mass restricted three-body problem: equilibria and self-similar motion"};
  app.require_subcommand(1);
  Overrides o;
  using Command = std::function<int(const RunConfig&, std::ostream&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"equilibria", {"Solve the requested equilibrium families", run_equilibria}},
      {"propagate", {"Propagate the primaries and write the ephemeris", run_propagate}},
      {"simulate", {"Simulate the third body from self-similar seeds", run_simulate}},
      {"verify", {"Check self-similarity residuals against the threshold", run_verify}},
      {"sweep", {"Equilibrium atlas over a nu/kappa grid", run_sweep}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) {
    subs[name] = app.add_subcommand(name, entry.first);
    add_common(subs[name], o, name == "sweep");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (const auto& [name, entry] : commands) {
    if (!subs[name]->parsed()) continue;
    try {
      const RunConfig config = assemble(o, name == "sweep");
      return entry.second(config, out);
    } catch (const ConfigError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const DomainError& e) {
      err << "error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::exception& e) {
      err << "solver failure: " << e.what() << "\n";
      return kExitSolver;
    }
  }
  return kExitConfig;
}

}  // namespace vm3b::harness

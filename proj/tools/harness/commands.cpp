#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "output.hpp"
#include "vm3b/errors.hpp"
#include "vm3b/format.hpp"
#include "vm3b/third_body.hpp"

namespace vm3b::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNearLimitExcess = 1e-6;
constexpr double kCollapseRadius = 1e3 * kCollisionRadius;

bool is_coplanar(PointLabel l) {
  return l >= PointLabel::L6 && l <= PointLabel::L11;
}

bool is_remote(PointLabel l) {
  return l == PointLabel::L_plus_inf || l == PointLabel::L_minus_inf;
}

std::string file_tag(std::string name) {
  for (char& c : name) {
    if (c == '/' || c == ':' || c == '+') c = '_';
  }
  return name;
}

void save_config(const RunConfig& config) {
  write_atomic(fs::path(config.out_dir) / "run.cfg", format_config(config));
}

MassLaw build_law(const RunConfig& config) {
  return build_mass_law(config.law, config.G, {config.t_begin, config.t_end}, config.settings);
}

PrimaryEphemeris build_ephemeris(const RunConfig& config, const SystemConfig& sys) {
  const PrimaryInitialState init = consistent_initial_state(sys, config.t_begin, config.R_dot0);
  return propagate_primaries(sys, {config.t_begin, config.t_end}, config.settings, init);
}

std::vector<PointSelection> default_points(const RunConfig& config) {
  std::vector<PointSelection> out;
  auto add = [&](PointLabel l) {
    PointSelection p;
    p.label = l;
    out.push_back(p);
  };
  if (config.mode == FrameMode::collinear) {
    for (auto l : {PointLabel::L1, PointLabel::L2, PointLabel::L3, PointLabel::L0}) add(l);
    return out;
  }
  for (auto l : {PointLabel::L1, PointLabel::L2, PointLabel::L3, PointLabel::L4, PointLabel::L5}) {
    add(l);
  }
  if (config.law.kind == MassLawKind::kappa_constrained) {
    add(PointLabel::L6);
    add(PointLabel::L7);
  }
  return out;
}

json record_json(const EquilibriumPoint& p) {
  json j;
  j["label"] = to_string(p.label);
  j["nu"] = p.nu;
  j["kappa"] = p.kappa ? json(*p.kappa) : json(nullptr);
  j["xi"] = p.xi;
  j["eta"] = p.eta;
  j["zeta"] = p.zeta;
  j["residual"] = p.residual_norm;
  return j;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string equilibrium_row(const EquilibriumPoint& p) {
  return format_sci17(p.nu) + "," + (p.kappa ? format_sci17(*p.kappa) : std::string()) + "," +
         to_string(p.label) + "," + format_sci17(p.xi) + "," + format_sci17(p.eta) + "," +
         format_sci17(p.zeta) + "," + format_sci17(p.residual_norm) + "\n";
}

}  // namespace

std::vector<ResolvedPoint> resolve_points(const RunConfig& config, bool for_simulation) {
  const auto selections = config.points.empty() ? default_points(config) : config.points;
  std::vector<ResolvedPoint> out;
  for (const auto& sel : selections) {
    ResolvedPoint r;
    r.name = sel.to_string();
    r.label = sel.label;
    if (!sel.label) {
      r.coords = {sel.xi, sel.eta, sel.zeta};
      out.push_back(r);
      continue;
    }
    const PointLabel l = *sel.label;
    if (is_remote(l)) {
      throw ConfigError("run.points: " + r.name + " is infinitely remote and cannot be seeded");
    }
    if (l == PointLabel::L0) {
      if (config.mode != FrameMode::collinear) {
        throw ConfigError("run.points: ring point L0 exists only in collinear mode");
      }
      r.coords = ring(config.nu).point(sel.phi);
    } else if (is_coplanar(l)) {
      if (config.mode != FrameMode::rotating) {
        throw ConfigError("run.points: coplanar point " + r.name + " needs rotating mode");
      }
      if (for_simulation && config.law.kind != MassLawKind::kappa_constrained) {
        throw ConfigError("run.points: coplanar point " + r.name +
                          " needs a kappa-constrained mass law, got '" + config.law.to_string() +
                          "'");
      }
      const auto kappa = config.effective_kappa();
      if (!kappa) throw ConfigError("run.points: coplanar point " + r.name + " needs kappa");
      const auto pts = coplanar(config.nu, *kappa);
      const auto it = std::find_if(pts.begin(), pts.end(),
                                   [&](const EquilibriumPoint& p) { return p.label == l; });
      if (it == pts.end()) {
        throw SolverError(r.name + " does not exist at nu=" + format_roundtrip(config.nu) +
                          ", kappa=" + format_roundtrip(*kappa));
      }
      r.coords = it->coords();
    } else if (l == PointLabel::L4 || l == PointLabel::L5) {
      r.coords = triangular(config.nu)[l == PointLabel::L4 ? 0 : 1].coords();
    } else {
      r.coords = collinear(config.nu)[static_cast<int>(l) - 1].coords();
    }
    out.push_back(r);
  }
  return out;
}

std::vector<EquilibriumPoint> collect_equilibria(const RunConfig& config) {
  std::vector<EquilibriumPoint> out;
  for (Family f : config.families) {
    switch (f) {
      case Family::collinear:
        for (const auto& p : collinear(config.nu)) out.push_back(p);
        break;
      case Family::triangular:
        for (const auto& p : triangular(config.nu)) out.push_back(p);
        break;
      case Family::coplanar: {
        const auto kappa = config.effective_kappa();
        if (!kappa) {
          throw ConfigError("run.families: coplanar needs system.kappa or a kappa mass law");
        }
        for (const auto& p : coplanar(config.nu, *kappa)) out.push_back(p);
        break;
      }
      case Family::ring: {
        if (config.mode != FrameMode::collinear) {
          throw ConfigError("run.families: the ring exists only in collinear mode");
        }
        const RingSolution r = ring(config.nu);
        for (std::size_t k = 0; k < config.ring_samples; ++k) {
          const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(config.ring_samples);
          const Vec3 q = r.point(phi);
          EquilibriumPoint e;
          e.label = PointLabel::L0;
          e.xi = q.x;
          e.eta = q.y;
          e.zeta = q.z;
          e.nu = config.nu;
          const auto res = collinear_case_residual(q, config.nu);
          e.residual_norm =
              std::max({std::abs(res[0]), std::abs(res[1]), std::abs(res[2])});
          out.push_back(e);
        }
        break;
      }
    }
  }
  return out;
}

std::string equilibria_csv(const std::vector<EquilibriumPoint>& points) {
  std::string out = "nu,kappa,label,xi,eta,zeta,residual\n";
  for (const auto& p : points) out += equilibrium_row(p);
  return out;
}

std::string equilibria_json(const std::vector<EquilibriumPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back(record_json(p));
  return arr.dump(2) + "\n";
}

int run_equilibria(const RunConfig& config, std::ostream& log) {
  const auto points = collect_equilibria(config);
  const fs::path dir(config.out_dir);
  write_atomic(dir / "equilibria.csv", equilibria_csv(points));
  write_atomic(dir / "equilibria.json", equilibria_json(points));
  save_config(config);
  for (const auto& p : points) {
    log << to_string(p.label) << "  xi=" << format_roundtrip(p.xi) << "  eta="
        << format_roundtrip(p.eta) << "  zeta=" << format_roundtrip(p.zeta)
        << "  residual=" << format_roundtrip(p.residual_norm) << "\n";
  }
  log << points.size() << " records written to " << dir.string() << "\n";
  return kExitOk;
}

int run_propagate(const RunConfig& config, std::ostream& log) {
  const SystemConfig sys = config.system(build_law(config));
  const PrimaryEphemeris eph = build_ephemeris(config, sys);
  const auto& ts = eph.solution().times();
  std::string csv = "t,u,R,Rdot,theta,omega\n";
  Polyline line;
  for (double t : ts) {
    const PrimarySample s = eph.sample(t);
    csv += csv_row({s.t, s.u, s.R, s.R_dot, s.theta, s.omega});
    line.x.push_back(s.t);
    line.y.push_back(s.R);
  }
  const fs::path dir(config.out_dir);
  write_atomic(dir / "ephemeris.csv", csv);
  if (config.svg) write_atomic(dir / "ephemeris.svg", render_svg({line}, "R(t)", "t", "R"));
  save_config(config);
  log << "primaries: " << ts.size() << " nodes, status " << to_string(eph.status());
  if (const auto& ev = eph.solution().event()) {
    log << " (" << ev->name << " at t=" << format_roundtrip(ev->t) << ")";
  }
  log << "\n";
  if (eph.status() == TerminalStatus::step_failure) {
    log << "integration failed: " << eph.solution().message() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run_simulate(const RunConfig& config, std::ostream& log) {
  const auto points = resolve_points(config, true);
  const SystemConfig sys = config.system(build_law(config));
  const PrimaryEphemeris eph = build_ephemeris(config, sys);
  const fs::path dir(config.out_dir);
  int code = kExitOk;
  for (const auto& p : points) {
    const Trajectory traj = simulate(sys, eph, self_similar_seed(eph, p.coords, config.t_begin),
                                     eph.span(), config.settings);
    std::string csv = "t,x,y,z,vx,vy,vz\n";
    Polyline xy;
    for (const auto& s : traj.samples()) {
      csv += csv_row({s.t, s.r.x, s.r.y, s.r.z, s.v.x, s.v.y, s.v.z});
      xy.x.push_back(s.r.x);
      xy.y.push_back(s.r.y);
    }
    const std::string tag = file_tag(p.name);
    write_atomic(dir / ("trajectory_" + tag + ".csv"), csv);
    if (config.svg) {
      write_atomic(dir / ("trajectory_" + tag + ".svg"),
                   render_svg({xy}, "third body seeded at " + p.name, "x", "y"));
    }
    log << p.name << ": " << traj.samples().size() << " nodes, status " << to_string(traj.status())
        << "\n";
    if (traj.status() == TerminalStatus::step_failure) code = kExitSolver;
  }
  save_config(config);
  return code;
}

int run_verify(const RunConfig& config, std::ostream& log) {
  const auto points = resolve_points(config, true);
  const SystemConfig sys = config.system(build_law(config));
  const PrimaryEphemeris eph = build_ephemeris(config, sys);
  json report = json::array();
  bool all_ok = true;
  for (const auto& p : points) {
    const Trajectory traj = simulate(sys, eph, self_similar_seed(eph, p.coords, config.t_begin),
                                     eph.span(), config.settings);
    const double res = self_similarity_residual(traj, eph, p.coords);
    const auto& ev = traj.solution().event();
    // A body riding a shrinking configuration reaches a primary's guard sphere
    // only as the primaries themselves collapse; that stop is not a failure.
    const bool collapse =
        ev && (ev->name == "collision" || eph.sample(ev->t).R <= kCollapseRadius);
    const bool stopped_early = traj.status() == TerminalStatus::step_failure || (ev && !collapse);
    const bool ok = std::isfinite(res) && res < config.threshold && !stopped_early;
    all_ok = all_ok && ok;
    json j;
    j["point_label"] = p.name;
    j["xi"] = p.coords.x;
    j["eta"] = p.coords.y;
    j["zeta"] = p.coords.z;
    j["law"] = config.law.to_string();
    j["t_end"] = traj.span().end;
    j["residual"] = res;
    report.push_back(j);
    log << (ok ? "ok    " : "FAIL  ") << p.name << "  residual=" << format_roundtrip(res)
        << "  t_end=" << format_roundtrip(traj.span().end);
    if (ev) log << "  (" << ev->name << ")";
    log << "\n";
  }
  write_atomic(fs::path(config.out_dir) / "verify.json", report.dump(2) + "\n");
  save_config(config);
  return all_ok ? kExitOk : kExitThreshold;
}

int run_sweep(const RunConfig& config, std::ostream& log) {
  std::vector<double> nus = config.sweep_nu;
  if (nus.empty()) nus.push_back(config.nu);
  std::vector<std::optional<double>> kappas;
  for (double k : config.sweep_kappa) kappas.emplace_back(k);
  if (kappas.empty()) kappas.emplace_back(std::nullopt);
  std::sort(nus.begin(), nus.end());
  nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
  std::sort(kappas.begin(), kappas.end());
  kappas.erase(std::unique(kappas.begin(), kappas.end()), kappas.end());

  struct Flag {
    double nu;
    std::optional<double> kappa;
    std::string flag;
    std::string detail;
  };
  struct Cell {
    double nu;
    std::optional<double> kappa;
    std::vector<EquilibriumPoint> rows;
    std::vector<Flag> flags;
  };
  std::vector<Cell> cells;
  for (double nu : nus) {
    for (const auto& k : kappas) cells.push_back({nu, k, {}, {}});
  }
  std::vector<std::optional<double>> bounds(nus.size());
  std::vector<std::string> bound_errors(nus.size());

  // Work items: every cell, then one kappa_bound per nu. Each item writes only
  // its own slot, so the result does not depend on scheduling.
  const std::size_t total = cells.size() + (config.sweep_kappa.empty() ? 0 : nus.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      if (i < cells.size()) {
        Cell& c = cells[i];
        try {
          for (const auto& p : collinear(c.nu)) c.rows.push_back(p);
          for (const auto& p : triangular(c.nu)) c.rows.push_back(p);
          for (auto& p : c.rows) p.kappa = c.kappa;
        } catch (const std::exception& e) {
          c.flags.push_back({c.nu, c.kappa, "planar-failure", e.what()});
        }
        if (c.kappa) {
          try {
            const auto cop = coplanar(c.nu, *c.kappa);
            if (cop.empty()) c.flags.push_back({c.nu, c.kappa, "coplanar-missing", ""});
            c.rows.insert(c.rows.end(), cop.begin(), cop.end());
            if (*c.kappa - 1.0 < kNearLimitExcess) {
              double zmax = 0.0;
              for (const auto& p : cop) zmax = std::max(zmax, std::abs(p.zeta));
              c.flags.push_back({c.nu, c.kappa, "near-limit",
                                 "kappa-1=" + format_roundtrip(*c.kappa - 1.0) +
                                     " |zeta|=" + format_roundtrip(zmax)});
            }
          } catch (const std::exception& e) {
            c.flags.push_back({c.nu, c.kappa, "coplanar-failure", e.what()});
          }
        }
      } else {
        const std::size_t j = i - cells.size();
        try {
          bounds[j] = kappa_bound(nus[j]);
        } catch (const std::exception& e) {
          bound_errors[j] = e.what();
        }
      }
    }
  };
  std::size_t n_threads = config.workers ? config.workers : std::thread::hardware_concurrency();
  n_threads = std::clamp<std::size_t>(n_threads, 1, std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Single writer, deterministic order: nu, kappa, label.
  std::vector<EquilibriumPoint> rows;
  std::vector<Flag> flags;
  for (const auto& c : cells) {
    rows.insert(rows.end(), c.rows.begin(), c.rows.end());
    flags.insert(flags.end(), c.flags.begin(), c.flags.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
    return std::tie(a.nu, a.kappa, a.label) < std::tie(b.nu, b.kappa, b.label);
  });

  const fs::path dir(config.out_dir);
  write_atomic(dir / "sweep.csv", equilibria_csv(rows));
  std::string flag_csv = "nu,kappa,flag,detail\n";
  for (const auto& f : flags) {
    flag_csv += format_sci17(f.nu) + "," + (f.kappa ? format_sci17(*f.kappa) : std::string()) +
                "," + f.flag + "," + csv_quote(f.detail) + "\n";
  }
  write_atomic(dir / "sweep_flags.csv", flag_csv);
  if (!config.sweep_kappa.empty()) {
    std::string bound_csv = "nu,kappa_max,detail\n";
    for (std::size_t j = 0; j < nus.size(); ++j) {
      bound_csv += format_sci17(nus[j]) + "," + (bounds[j] ? format_sci17(*bounds[j]) : "none") +
                   "," +
                   csv_quote(!bound_errors[j].empty() ? bound_errors[j]
                             : bounds[j]             ? "roots beyond L6/L7 up to kappa_max"
                                                     : "no roots beyond L6/L7 found") +
                   "\n";
    }
    write_atomic(dir / "sweep_kappa_bound.csv", bound_csv);
  }
  save_config(config);
  log << rows.size() << " rows over " << cells.size() << " cells, " << flags.size()
      << " flags, written to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace vm3b::harness

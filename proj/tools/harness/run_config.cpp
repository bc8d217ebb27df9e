#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "vm3b/errors.hpp"
#include "vm3b/format.hpp"

namespace vm3b::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s = s.substr(pos + 1);
  }
  return out;
}

std::size_t parse_count(std::string_view text, std::string_view field) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(field) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view field) {
  text = trim(text);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(std::string(field) + ": expected true or false, got '" + std::string(text) + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out;
}

void check(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string(field) + ": " + why);
}

}  // namespace

double parse_double(std::string_view text, std::string_view field) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v)) {
    throw ConfigError(std::string(field) + ": expected a finite number, got '" + std::string(text) +
                      "'");
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view field) {
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(parse_double(item, field));
  return out;
}

std::string PointSelection::to_string() const {
  if (!label) return format_roundtrip(xi) + "/" + format_roundtrip(eta) + "/" + format_roundtrip(zeta);
  if (*label == PointLabel::L0) return "L0:" + format_roundtrip(phi);
  return vm3b::to_string(*label);
}

PointSelection PointSelection::parse(std::string_view text) {
  text = trim(text);
  PointSelection p;
  if (!text.empty() && text[0] == 'L') {
    const auto colon = text.find(':');
    try {
      p.label = parse_point_label(text.substr(0, colon));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("run.points: ") + e.what());
    }
    if (colon != std::string_view::npos) {
      if (*p.label != PointLabel::L0) {
        throw ConfigError("run.points: only L0 takes an angle, got '" + std::string(text) + "'");
      }
      p.phi = parse_double(text.substr(colon + 1), "run.points");
    }
    return p;
  }
  const auto parts = split(text, '/');
  if (parts.size() != 3) {
    throw ConfigError("run.points: expected a label or xi/eta/zeta, got '" + std::string(text) + "'");
  }
  p.xi = parse_double(parts[0], "run.points");
  p.eta = parse_double(parts[1], "run.points");
  p.zeta = parse_double(parts[2], "run.points");
  return p;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::collinear:
      return "collinear";
    case Family::triangular:
      return "triangular";
    case Family::coplanar:
      return "coplanar";
    case Family::ring:
      return "ring";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  text = trim(text);
  if (text == "collinear") return Family::collinear;
  if (text == "triangular") return Family::triangular;
  if (text == "coplanar") return Family::coplanar;
  if (text == "ring") return Family::ring;
  throw ConfigError("run.families: unknown family '" + std::string(text) +
                    "' (collinear, triangular, coplanar, ring)");
}

std::optional<double> RunConfig::effective_kappa() const {
  if (law.kind == MassLawKind::kappa_constrained && !law.params.empty()) return law.params[0];
  return kappa;
}

SystemConfig RunConfig::system(const MassLaw& built) const {
  SystemConfig s;
  s.nu = nu;
  s.G = G;
  s.mode = mode;
  s.law = built;
  return s;
}

void RunConfig::validate() const {
  check(nu > 0.0 && nu <= 0.5, "system.nu", "nu must satisfy 0 < nu <= 1/2");
  check(G > 0.0 && std::isfinite(G), "system.G", "G must be positive");
  check(std::isfinite(R_dot0), "system.R_dot0", "must be finite");
  if (kappa) check(*kappa > 1.0, "system.kappa", "kappa must exceed 1");
  try {
    (void)MassLawSpec::parse(law.to_string());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("mass_law.law: ") + e.what());
  }
  if (kappa && law.kind == MassLawKind::kappa_constrained && *kappa != law.params[0]) {
    throw ConfigError("system.kappa: conflicts with the kappa of mass_law.law");
  }
  check(std::isfinite(t_begin), "integration.t_begin", "must be finite");
  check(std::isfinite(t_end) && t_end > t_begin, "integration.t_end", "must exceed t_begin");
  check(settings.rtol > 0.0 && settings.rtol < 1.0, "integration.rtol", "must lie in (0, 1)");
  check(settings.atol > 0.0 && std::isfinite(settings.atol), "integration.atol", "must be positive");
  check(settings.initial_step > 0.0, "integration.initial_step", "must be positive");
  check(settings.max_step >= settings.initial_step, "integration.max_step",
        "must be >= initial_step");
  check(settings.max_steps > 0, "integration.max_steps", "must be positive");
  check(settings.event_tolerance > 0.0, "integration.event_tolerance", "must be positive");
  check(threshold > 0.0 && std::isfinite(threshold), "run.threshold", "must be positive");
  check(ring_samples > 0, "run.ring_samples", "must be positive");
  for (double v : sweep_nu) {
    check(v > 0.0 && v <= 0.5, "sweep.nu", "nu must satisfy 0 < nu <= 1/2, got " + format_roundtrip(v));
  }
  for (double k : sweep_kappa) {
    check(k > 1.0, "sweep.kappa", "kappa must exceed 1, got " + format_roundtrip(k));
  }
  check(!out_dir.empty(), "output.dir", "must not be empty");
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto key = [](const RunConfig& c) {
    return std::tie(c.nu, c.G, c.mode, c.R_dot0, c.kappa, c.law, c.t_begin, c.t_end,
                    c.settings.rtol, c.settings.atol, c.settings.initial_step, c.settings.max_step,
                    c.settings.max_steps, c.settings.event_tolerance, c.points, c.families,
                    c.threshold, c.ring_samples, c.sweep_nu, c.sweep_kappa, c.workers, c.out_dir,
                    c.svg);
  };
  return key(a) == key(b);
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::map<std::string, bool> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"system", "mass_law", "integration", "run", "sweep", "output"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError(where + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": entry outside of a section");
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string field = section + "." + key;
    if (seen[field]) throw ConfigError(field + ": given twice");
    seen[field] = true;

    if (field == "system.nu") {
      c.nu = parse_double(value, field);
    } else if (field == "system.G") {
      c.G = parse_double(value, field);
    } else if (field == "system.mode") {
      try {
        c.mode = parse_frame_mode(value);
      } catch (const DomainError& e) {
        throw ConfigError(field + ": " + e.what());
      }
    } else if (field == "system.R_dot0") {
      c.R_dot0 = parse_double(value, field);
    } else if (field == "system.kappa") {
      c.kappa = parse_double(value, field);
    } else if (field == "mass_law.law") {
      try {
        c.law = MassLawSpec::parse(value);
      } catch (const DomainError& e) {
        throw ConfigError(field + ": " + e.what());
      }
    } else if (field == "integration.t_begin") {
      c.t_begin = parse_double(value, field);
    } else if (field == "integration.t_end") {
      c.t_end = parse_double(value, field);
    } else if (field == "integration.rtol") {
      c.settings.rtol = parse_double(value, field);
    } else if (field == "integration.atol") {
      c.settings.atol = parse_double(value, field);
    } else if (field == "integration.initial_step") {
      c.settings.initial_step = parse_double(value, field);
    } else if (field == "integration.max_step") {
      c.settings.max_step = parse_double(value, field);
    } else if (field == "integration.max_steps") {
      c.settings.max_steps = parse_count(value, field);
    } else if (field == "integration.event_tolerance") {
      c.settings.event_tolerance = parse_double(value, field);
    } else if (field == "run.points") {
      c.points.clear();
      for (auto item : split(value, ',')) c.points.push_back(PointSelection::parse(item));
    } else if (field == "run.families") {
      c.families.clear();
      for (auto item : split(value, ',')) c.families.push_back(parse_family(item));
    } else if (field == "run.threshold") {
      c.threshold = parse_double(value, field);
    } else if (field == "run.ring_samples") {
      c.ring_samples = parse_count(value, field);
    } else if (field == "sweep.nu") {
      c.sweep_nu = parse_double_list(value, field);
    } else if (field == "sweep.kappa") {
      c.sweep_kappa = parse_double_list(value, field);
    } else if (field == "sweep.workers") {
      c.workers = parse_count(value, field);
    } else if (field == "output.dir") {
      c.out_dir = std::string(value);
    } else if (field == "output.svg") {
      c.svg = parse_bool(value, field);
    } else {
      throw ConfigError(where + ": unknown key '" + field + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  auto num = [](double v) { return format_roundtrip(v); };
  std::ostringstream o;
  o << "[system]\n";
  o << "nu = " << num(c.nu) << "\n";
  o << "G = " << num(c.G) << "\n";
  o << "mode = " << to_string(c.mode) << "\n";
  o << "R_dot0 = " << num(c.R_dot0) << "\n";
  if (c.kappa) o << "kappa = " << num(*c.kappa) << "\n";
  o << "\n[mass_law]\n";
  o << "law = " << c.law.to_string() << "\n";
  o << "\n[integration]\n";
  o << "t_begin = " << num(c.t_begin) << "\n";
  o << "t_end = " << num(c.t_end) << "\n";
  o << "rtol = " << num(c.settings.rtol) << "\n";
  o << "atol = " << num(c.settings.atol) << "\n";
  o << "initial_step = " << num(c.settings.initial_step) << "\n";
  o << "max_step = " << num(c.settings.max_step) << "\n";
  o << "max_steps = " << c.settings.max_steps << "\n";
  o << "event_tolerance = " << num(c.settings.event_tolerance) << "\n";
  o << "\n[run]\n";
  o << "points = " << join(c.points, [](const PointSelection& p) { return p.to_string(); }) << "\n";
  o << "families = " << join(c.families, [](Family f) { return to_string(f); }) << "\n";
  o << "threshold = " << num(c.threshold) << "\n";
  o << "ring_samples = " << c.ring_samples << "\n";
  o << "\n[sweep]\n";
  o << "nu = " << join(c.sweep_nu, num) << "\n";
  o << "kappa = " << join(c.sweep_kappa, num) << "\n";
  o << "workers = " << c.workers << "\n";
  o << "\n[output]\n";
  o << "dir = " << c.out_dir << "\n";
  o << "svg = " << (c.svg ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace vm3b::harness

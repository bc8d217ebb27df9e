#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "run_config.hpp"
#include "vm3b/format.hpp"

namespace vm3b::harness {

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

std::string csv_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_sci17(values[i]);
  }
  out += '\n';
  return out;
}

std::string render_svg(const std::vector<Polyline>& lines, std::string_view title,
                       std::string_view x_label, std::string_view y_label) {
  constexpr double W = 640, H = 480, M = 48;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& l : lines) {
    for (double v : l.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : l.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  // Degenerate ranges (an equilibrium sitting still) get a unit-relative pad.
  auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      const double d = 1e-6 * std::max(1.0, std::abs(lo));
      lo -= d;
      hi += d;
    }
  };
  pad(x0, x1);
  pad(y0, y1);
  auto sx = [&](double v) { return M + (v - x0) / (x1 - x0) * (W - 2 * M); };
  auto sy = [&](double v) { return H - M - (v - y0) / (y1 - y0) * (H - 2 * M); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  o << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\""
    << H - 2 * M << "\" fill=\"none\" stroke=\"#888\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << x_label << " [" << format_roundtrip(x0) << ", " << format_roundtrip(x1) << "]</text>\n";
  o << "<text x=\"12\" y=\"" << H / 2 << "\" font-size=\"12\" transform=\"rotate(-90 12 " << H / 2
    << ")\" text-anchor=\"middle\">" << y_label << " [" << format_roundtrip(y0) << ", "
    << format_roundtrip(y1) << "]</text>\n";
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    o << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"1.2\" points=\"";
    const std::size_t n = std::min(l.x.size(), l.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (i) o << ' ';
      o << sx(l.x[i]) << ',' << sy(l.y[i]);
    }
    o << "\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace vm3b::harness

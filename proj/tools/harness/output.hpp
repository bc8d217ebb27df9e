#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vm3b::harness {

/// Writes `content` to a sibling temporary and renames it over `path`, so a
/// partial file never appears under the final name.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Comma-joined row of %.16e numbers, newline terminated.
std::string csv_row(const std::vector<double>& values);

struct Polyline {
  std::vector<double> x;
  std::vector<double> y;
};

/// Plain SVG of one or more polylines scaled into a common box, with the data
/// ranges printed in the corners.
std::string render_svg(const std::vector<Polyline>& lines, std::string_view title,
                       std::string_view x_label, std::string_view y_label);

}  // namespace vm3b::harness

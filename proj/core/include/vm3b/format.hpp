#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace vm3b {

/// Shortest "%.Ng" text (N <= 17) that reads back to the same double.
inline std::string format_roundtrip(double v) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Full-precision scientific notation, 17 significant digits. Used for every
/// CSV column so regression outputs are byte-stable.
inline std::string format_sci17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace vm3b

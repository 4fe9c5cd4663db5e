#pragma once

#include <cstdio>
#include <string>

namespace qwalk {

/// %.17g: the CSV exports use 17 significant digits so doubles round-trip.
inline std::string fmt17(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace qwalk

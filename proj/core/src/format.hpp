#pragma once

#include <cstdio>
#include <string>

namespace cointvar::detail {

// 17 significant digits; parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace cointvar::detail

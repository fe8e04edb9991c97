#pragma once

#include <charconv>
#include <string>

namespace ganlab {

// Shortest decimal string that round-trips the exact double, so emitted CSV
// is byte-stable and parses back losslessly.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace ganlab

#ifndef PURSUIT_TEXT_UTIL_HPP
#define PURSUIT_TEXT_UTIL_HPP

#include <charconv>
#include <cmath>
#include <string>

namespace pursuit {

/// Shortest round-trip decimal form of a double ("0.05", not
/// "0.050000000000000003"); infinities render as inf/-inf.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace pursuit

#endif  // PURSUIT_TEXT_UTIL_HPP

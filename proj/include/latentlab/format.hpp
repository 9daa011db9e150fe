#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace latentlab {

/// Shortest decimal text that round-trips to the same double; "inf"/"-inf"
/// and "nan" for non-finite values.
inline std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

/// Fixed-point text with the given number of decimals.
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  return std::string(buf, result.ptr);
}

}  // namespace latentlab

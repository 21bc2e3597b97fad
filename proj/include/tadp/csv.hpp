#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace tadp {

/// Shortest representation that round-trips the exact double value, so CSV
/// consumers can recompute aggregates bit-for-bit.
inline std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string csv_num(std::uint64_t v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }

}  // namespace tadp

#pragma once

#include <charconv>
#include <string>

namespace porehom {

// Shortest decimal text that parses back to the identical double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace porehom

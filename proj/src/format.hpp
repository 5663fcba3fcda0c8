#pragma once

#include <charconv>
#include <string>

namespace choquard::detail {

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace choquard::detail

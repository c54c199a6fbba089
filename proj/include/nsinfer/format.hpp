#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace nsinfer {

/// Shortest decimal text that round-trips to the same double. Locale and
/// stream-state independent, so reports are byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace nsinfer

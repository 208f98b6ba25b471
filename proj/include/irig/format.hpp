#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <system_error>

namespace irig {

// Locale-independent decimal rendering with 17 significant digits; enough to
// round-trip any double exactly.
inline std::string format_sig17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_finite_double(const std::string &tok, const char *what) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw std::runtime_error(std::string("failed to parse ") + what + ": '" +
                             tok + "'");
  return v;
}

}  // namespace irig

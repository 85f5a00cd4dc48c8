#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "dmt/error.hpp"

namespace dmt {

// Locale-independent fixed notation; negative zero prints as zero.
inline std::string format_fixed(double v, int decimals = 6) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string format_scientific(double v, int decimals = 6) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, decimals);
  return {buf, res.ptr};
}

// Shortest representation that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view text, const std::string& context) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ParseError(context + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view text, const std::string& context) {
  const double v = parse_double(text, context);
  if (v != std::floor(v)) {
    throw ParseError(context + ": expected an integer, got '" + std::string(text) + "'");
  }
  return static_cast<long long>(v);
}

}  // namespace dmt

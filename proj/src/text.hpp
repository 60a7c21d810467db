#pragma once

// Small text helpers shared by the line-oriented file formats.

#include <charconv>
#include <cstdio>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "btl/errors.hpp"

namespace btl::text {

/// Shortest decimal that parses back to the identical double.
inline std::string format_exact(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// `%.10g`: ten significant digits.
inline std::string format_sig10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (at < s.size()) {
    while (at < s.size() && (s[at] == ' ' || s[at] == '\t' || s[at] == '\r')) ++at;
    std::size_t end = at;
    while (end < s.size() && s[end] != ' ' && s[end] != '\t' && s[end] != '\r') ++end;
    if (end > at) out.emplace_back(s.substr(at, end - at));
    at = end;
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (true) {
    const auto pos = s.find(sep, at);
    out.emplace_back(trim(s.substr(at, pos == std::string_view::npos ? s.npos : pos - at)));
    if (pos == std::string_view::npos) break;
    at = pos + 1;
  }
  return out;
}

template <typename T>
T parse(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Parse, "cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  }
  return value;
}

/// Yields non-empty lines that do not start with '#'.
class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      ++line_number_;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      line = std::string(t);
      return true;
    }
    return false;
  }

  int line_number() const { return line_number_; }

 private:
  std::istream& is_;
  int line_number_ = 0;
};

}  // namespace btl::text

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

namespace percolab {

/// Shortest round-trip decimal form; locale independent, so CSV bodies are
/// byte-stable across runs and worker counts.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace percolab

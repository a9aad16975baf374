#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mdix::csv {

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, const std::string& context) {
  size_t consumed = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &consumed);
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": cannot parse number '" + s + "'");
  }
  while (consumed < s.size() &&
         (s[consumed] == ' ' || s[consumed] == '\t' || s[consumed] == '\r')) {
    ++consumed;
  }
  if (consumed != s.size()) {
    throw std::runtime_error(context + ": trailing characters in number '" + s + "'");
  }
  return v;
}

inline long parse_int(const std::string& s, const std::string& context) {
  size_t consumed = 0;
  long v = 0;
  try {
    v = std::stol(s, &consumed);
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": cannot parse integer '" + s + "'");
  }
  if (consumed != s.size()) {
    throw std::runtime_error(context + ": trailing characters in integer '" + s + "'");
  }
  return v;
}

struct File {
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row
};

/// Comma-split reader; blank lines and '#' comment lines are skipped. No
/// quoting: the formats written here never need it.
inline File read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  File out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    out.rows.push_back(std::move(fields));
    out.line_numbers.push_back(line_no);
  }
  return out;
}

/// "# key=value key=value ..." header carrying the resolved configuration.
inline void write_config_header(
    std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  out << "#";
  for (const auto& [k, v] : kv) out << " " << k << "=" << v;
  out << "\n";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  return out;
}

}  // namespace mdix::csv

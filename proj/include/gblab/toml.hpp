#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gblab/common.hpp"

// Minimal TOML subset: [table] headers, key = value with integer, float,
// boolean, quoted string, or integer-array values, and # comments.  Every
// value remembers its source line so configuration errors can point at it.

namespace gblab::toml {

struct Value {
  enum class Type { integer, floating, boolean, string, int_array };
  Type type = Type::integer;
  i64 i = 0;
  double d = 0.0;
  bool b = false;
  std::string s;
  std::vector<i64> arr;
  int line = 0;

  i64 as_int(const std::string& key) const {
    if (type != Type::integer)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be an integer");
    return i;
  }
  u64 as_uint(const std::string& key) const {
    const i64 v = as_int(key);
    if (v < 0)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be non-negative");
    return static_cast<u64>(v);
  }
  double as_float(const std::string& key) const {
    if (type == Type::integer) return static_cast<double>(i);
    if (type != Type::floating)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be a number");
    return d;
  }
  bool as_bool(const std::string& key) const {
    if (type != Type::boolean)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be true or false");
    return b;
  }
  const std::string& as_string(const std::string& key) const {
    if (type != Type::string)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be a quoted string");
    return s;
  }
  const std::vector<i64>& as_int_array(const std::string& key) const {
    if (type != Type::int_array)
      reject("config: key '" + key + "' (line " + std::to_string(line) +
             ") must be an array of integers");
    return arr;
  }
};

struct Document {
  // table name "" is the root table
  std::map<std::string, std::map<std::string, Value>> tables;
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

inline bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      return false;
  }
  return true;
}

inline Value parse_scalar(const std::string& raw, int line) {
  Value v;
  v.line = line;
  if (raw == "true" || raw == "false") {
    v.type = Value::Type::boolean;
    v.b = raw == "true";
    return v;
  }
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    v.type = Value::Type::string;
    v.s = raw.substr(1, raw.size() - 2);
    return v;
  }
  const bool floaty = raw.find_first_of(".eE") != std::string::npos &&
                      raw.find('"') == std::string::npos;
  const char* begin = raw.c_str();
  char* end = nullptr;
  if (floaty) {
    v.type = Value::Type::floating;
    v.d = std::strtod(begin, &end);
  } else {
    v.type = Value::Type::integer;
    v.i = std::strtoll(begin, &end, 10);
  }
  if (end == begin || *end != '\0')
    reject("config: cannot parse value '" + raw + "' at line " +
           std::to_string(line));
  return v;
}

inline Value parse_value(const std::string& raw, int line) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']')
      reject("config: unterminated array at line " + std::to_string(line));
    Value v;
    v.type = Value::Type::int_array;
    v.line = line;
    std::string body = raw.substr(1, raw.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = strip(item);
      if (item.empty()) continue;
      Value e = parse_scalar(item, line);
      if (e.type != Value::Type::integer)
        reject("config: array at line " + std::to_string(line) +
               " must contain only integers");
      v.arr.push_back(e.i);
    }
    return v;
  }
  return parse_scalar(raw, line);
}

}  // namespace detail

inline Document parse(const std::string& text) {
  Document doc;
  std::string current;  // current table name
  std::istringstream in(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = detail::strip(detail::strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        reject("config: malformed table header at line " +
               std::to_string(line_no));
      current = detail::strip(line.substr(1, line.size() - 2));
      if (!detail::valid_key(current))
        reject("config: invalid table name '" + current + "' at line " +
               std::to_string(line_no));
      doc.tables[current];  // materialize even if empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      reject("config: expected 'key = value' at line " +
             std::to_string(line_no));
    const std::string key = detail::strip(line.substr(0, eq));
    const std::string val = detail::strip(line.substr(eq + 1));
    if (!detail::valid_key(key))
      reject("config: invalid key '" + key + "' at line " +
             std::to_string(line_no));
    auto& table = doc.tables[current];
    if (table.count(key))
      reject("config: duplicate key '" + key + "' at line " +
             std::to_string(line_no));
    table[key] = detail::parse_value(val, line_no);
  }
  return doc;
}

inline Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) reject("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace gblab::toml

#pragma once

// Flat key = value config files: '#' comments, blank lines ignored,
// comma-separated lists. Typed getters fail loudly on malformed values.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "genlab/error.hpp"

namespace genlab {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

class Config {
public:
  Config() = default;

  static Config parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = detail::trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ParseError("config line " + std::to_string(line_no) +
                         ": expected key = value");
      const std::string key = detail::trim(stripped.substr(0, eq));
      if (key.empty())
        throw ParseError("config line " + std::to_string(line_no) +
                         ": empty key");
      cfg.values_[key] = detail::trim(stripped.substr(eq + 1));
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
  }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ContractError("config: missing required key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_int(key, it->second);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_u64(key, it->second);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("config: key '" + key + "' expects a boolean, got '" +
                     v + "'");
  }

  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const std::string& piece : split(it->second))
      out.push_back(parse_double(key, piece));
    return out;
  }

  std::vector<std::uint64_t> get_u64_list(
      const std::string& key, std::vector<std::uint64_t> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> out;
    for (const std::string& piece : split(it->second))
      out.push_back(parse_u64(key, piece));
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  static std::vector<std::string> split(const std::string& value) {
    std::vector<std::string> out;
    std::size_t at = 0;
    while (at <= value.size()) {
      const std::size_t comma = value.find(',', at);
      const std::size_t end = comma == std::string::npos ? value.size() : comma;
      const std::string piece = detail::trim(
          std::string_view(value).substr(at, end - at));
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
    return out;
  }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double parsed = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return parsed;
    } catch (const std::exception&) {
      throw ParseError("config: key '" + key + "' expects a number, got '" +
                       v + "'");
    }
  }

  static std::int64_t parse_int(const std::string& key, const std::string& v) {
    std::int64_t out = 0;
    const auto [ptr, ec] =
        std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ParseError("config: key '" + key + "' expects an integer, got '" +
                       v + "'");
    return out;
  }

  static std::uint64_t parse_u64(const std::string& key,
                                 const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] =
        std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ParseError("config: key '" + key +
                       "' expects a nonnegative integer, got '" + v + "'");
    return out;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace genlab

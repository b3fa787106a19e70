#pragma once

// RFC-4180 CSV emission with locale-free, shortest-round-trip number
// formatting so identical runs produce identical bytes.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "genlab/error.hpp"

namespace genlab {

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc{}, "format_double: conversion failed");
  return std::string(buf, ptr);
}

inline std::string format_u64(std::uint64_t v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  require(ec == std::errc{}, "format_u64: conversion failed");
  return std::string(buf, ptr);
}

inline std::string csv_field(const std::string& value) {
  const bool needs_quotes =
      value.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return value;
  std::string out = "\"";
  for (const char c : value) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << csv_line(header);
  for (const auto& row : rows) out << csv_line(row);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace genlab

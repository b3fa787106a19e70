#pragma once

// Flat text serialization for two-layer nets.
//
//   two-layer v1 n=<n> W=<W> act=<relu|sinepi> c=<c>
//   <a> <b> <w_1> ... <w_n>        (one line per unit, W lines)
//
// All numbers are C hex-float literals so round trips are bit-faithful
// for finite doubles. Replicated units are written out in full, one line
// per copy; a cap refuses nets too wide to expand into text.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "genlab/error.hpp"
#include "genlab/net.hpp"

namespace genlab {

inline constexpr std::uint64_t kMaxSerializedUnits = 2'000'000;

namespace detail {

inline std::string hex_double(double v) {
  require(std::isfinite(v), "serialize: non-finite parameter");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double parse_double(const std::string& token, const char* what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(std::string("net file: malformed number in ") + what +
                     ": '" + token + "'");
  if (!std::isfinite(v))
    throw ParseError(std::string("net file: non-finite value in ") + what);
  return v;
}

}  // namespace detail

inline std::string net_to_string(const TwoLayerNet& net) {
  require(net.act == Activation::kRelu || net.act == Activation::kSinePi,
          "serialize: only relu and sinepi nets have a wire format");
  const std::uint64_t width = net.width();
  require(width <= kMaxSerializedUnits,
          "serialize: net too wide to expand into one line per unit");
  std::ostringstream out;
  out << "two-layer v1 n=" << net.input_dim() << " W=" << width
      << " act=" << activation_name(net.act)
      << " c=" << detail::hex_double(net.outer_bias) << "\n";
  for (Eigen::Index r = 0; r < net.stored_rows(); ++r) {
    std::ostringstream line;
    line << detail::hex_double(net.outer[r]) << ' '
         << detail::hex_double(net.biases[r]);
    for (Eigen::Index j = 0; j < net.input_dim(); ++j)
      line << ' ' << detail::hex_double(net.weights(r, j));
    line << '\n';
    for (std::uint64_t k = 0; k < net.counts[static_cast<std::size_t>(r)]; ++k)
      out << line.str();
  }
  return out.str();
}

inline TwoLayerNet net_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header))
    throw ParseError("net file: missing header line");

  std::istringstream head(header);
  std::string tag, version, n_field, w_field, act_field, c_field;
  head >> tag >> version >> n_field >> w_field >> act_field >> c_field;
  if (tag != "two-layer" || version != "v1")
    throw ParseError("net file: expected 'two-layer v1' header");
  std::string trailing;
  if (head >> trailing)
    throw ParseError("net file: unexpected trailing header field");

  auto field_value = [](const std::string& field, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (field.rfind(prefix, 0) != 0)
      throw ParseError("net file: expected header field " + prefix + "...");
    return field.substr(prefix.size());
  };

  const long n = std::strtol(field_value(n_field, "n").c_str(), nullptr, 10);
  const long long w = std::strtoll(field_value(w_field, "W").c_str(), nullptr, 10);
  if (n < 1) throw ParseError("net file: dimension must be positive");
  if (w < 0) throw ParseError("net file: negative width");
  if (static_cast<std::uint64_t>(w) > kMaxSerializedUnits)
    throw ParseError("net file: width exceeds the serialization cap");

  const std::string act_name = field_value(act_field, "act");
  Activation act;
  if (act_name == "relu") {
    act = Activation::kRelu;
  } else if (act_name == "sinepi") {
    act = Activation::kSinePi;
  } else {
    throw ParseError("net file: unknown activation '" + act_name + "'");
  }

  TwoLayerNet net(n, static_cast<Eigen::Index>(w), act);
  net.outer_bias = detail::parse_double(field_value(c_field, "c"), "header c");

  std::string line;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= static_cast<Eigen::Index>(w))
      throw ParseError("net file: more unit lines than the declared width");
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    std::string token;
    while (ls >> token) tokens.push_back(token);
    if (tokens.size() != static_cast<std::size_t>(n) + 2)
      throw ParseError("net file: unit line has wrong field count");
    net.outer[row] = detail::parse_double(tokens[0], "outer weight");
    net.biases[row] = detail::parse_double(tokens[1], "bias");
    for (long j = 0; j < n; ++j)
      net.weights(row, j) =
          detail::parse_double(tokens[static_cast<std::size_t>(j) + 2], "weight");
    ++row;
  }
  if (row != static_cast<Eigen::Index>(w))
    throw ParseError("net file: fewer unit lines than the declared width");
  return net;
}

inline void save_net(const TwoLayerNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << net_to_string(net);
  if (!out) throw IoError("write failure: " + path);
}

inline TwoLayerNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failure: " + path);
  return net_from_string(buffer.str());
}

}  // namespace genlab

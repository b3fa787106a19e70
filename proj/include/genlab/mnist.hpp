#pragma once

// IDX file ingestion for MNIST-style data. Big-endian headers, raw byte
// payloads, pixels scaled to [0,1].

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "genlab/data.hpp"
#include "genlab/error.hpp"

namespace genlab {

class IdxMagicError : public ParseError {
public:
  explicit IdxMagicError(const std::string& msg) : ParseError(msg) {}
};

class IdxTruncatedError : public ParseError {
public:
  explicit IdxTruncatedError(const std::string& msg) : ParseError(msg) {}
};

class IdxCountMismatchError : public ParseError {
public:
  explicit IdxCountMismatchError(const std::string& msg) : ParseError(msg) {}
};

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on file: " + path);
  return bytes;
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& bytes,
                               std::size_t offset, const std::string& path) {
  if (offset + 4 > bytes.size())
    throw IdxTruncatedError("truncated IDX header in " + path);
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace detail

struct IdxImages {
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  Eigen::MatrixXd pixels;  // count x (rows*cols), scaled to [0,1]
};

inline IdxImages read_idx_images(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != 0x00000803u)
    throw IdxMagicError("bad image magic number in " + path);
  IdxImages out;
  out.count = detail::read_be32(bytes, 4, path);
  out.rows = detail::read_be32(bytes, 8, path);
  out.cols = detail::read_be32(bytes, 12, path);
  if (out.count == 0 || out.rows == 0 || out.cols == 0)
    throw ParseError("empty IDX image dimensions in " + path);
  const std::size_t pixel_count =
      static_cast<std::size_t>(out.count) * out.rows * out.cols;
  if (bytes.size() < 16 + pixel_count)
    throw IdxTruncatedError("truncated image payload in " + path);
  const std::size_t per_image = static_cast<std::size_t>(out.rows) * out.cols;
  out.pixels.resize(out.count, static_cast<Eigen::Index>(per_image));
  for (std::size_t i = 0; i < pixel_count; ++i)
    out.pixels(static_cast<Eigen::Index>(i / per_image),
               static_cast<Eigen::Index>(i % per_image)) = bytes[16 + i] / 255.0;
  return out;
}

inline std::vector<int> read_idx_labels(const std::string& path) {
  const auto bytes = detail::read_file_bytes(path);
  const std::uint32_t magic = detail::read_be32(bytes, 0, path);
  if (magic != 0x00000801u)
    throw IdxMagicError("bad label magic number in " + path);
  const std::uint32_t count = detail::read_be32(bytes, 4, path);
  if (bytes.size() < 8 + static_cast<std::size_t>(count))
    throw IdxTruncatedError("truncated label payload in " + path);
  std::vector<int> labels(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const int digit = bytes[8 + i];
    if (digit < 0 || digit > 9)
      throw ParseError("label byte out of range 0-9 in " + path);
    labels[i] = digit;
  }
  return labels;
}

// Digit mapping: +1, -1, or 0 to drop the digit entirely.
using LabelRule = std::array<int, 10>;

inline LabelRule even_odd_rule() {
  LabelRule rule{};
  for (int d = 0; d < 10; ++d) rule[static_cast<std::size_t>(d)] = (d % 2 == 0) ? -1 : 1;
  return rule;
}

inline LabeledDataset mnist_load(const std::string& images_path,
                                 const std::string& labels_path,
                                 const LabelRule& rule = even_odd_rule()) {
  const IdxImages images = read_idx_images(images_path);
  const std::vector<int> digits = read_idx_labels(labels_path);
  if (digits.size() != images.count)
    throw IdxCountMismatchError("image/label count mismatch: " + images_path +
                                " vs " + labels_path);
  std::vector<Eigen::Index> keep;
  keep.reserve(digits.size());
  for (std::size_t i = 0; i < digits.size(); ++i)
    if (rule[static_cast<std::size_t>(digits[i])] != 0)
      keep.push_back(static_cast<Eigen::Index>(i));
  require(!keep.empty(), "mnist_load: label rule dropped every sample");
  LabeledDataset ds = make_dataset(static_cast<Eigen::Index>(keep.size()),
                                   images.pixels.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    ds.X.row(static_cast<Eigen::Index>(i)) = images.pixels.row(keep[i]);
    ds.y[static_cast<Eigen::Index>(i)] =
        rule[static_cast<std::size_t>(digits[static_cast<std::size_t>(keep[i])])];
  }
  return ds;
}

}  // namespace genlab

#pragma once

// Binary 8-bit PGM (P5) reading and writing.

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

#include "salsa/image.hpp"

namespace salsa {

/// Malformed or unsupported input; offset() is the byte position of the fault.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

/// Header comments are accepted. Only maxval <= 255 is supported; pixel values
/// are returned as-is (no rescaling to 255).
ImageBuffer decode_pgm(std::span<const unsigned char> bytes);

/// Canonical "P5\n<w> <h>\n255\n" header; pixels clamped to [0, 255] and
/// rounded to nearest.
std::string encode_pgm(const ImageBuffer& image);

ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const ImageBuffer& image, const std::filesystem::path& path);

}  // namespace salsa

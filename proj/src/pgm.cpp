#include "salsa/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

namespace salsa {

ParseError::ParseError(const std::string& message, std::size_t offset)
    : std::runtime_error("PGM parse error at byte " + std::to_string(offset) + ": " + message),
      offset_(offset),
      detail_(message) {}

namespace {

class HeaderReader {
 public:
  HeaderReader(std::span<const unsigned char> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const { return pos_; }

  void skip_whitespace_and_comments() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_number(const char* what) {
    skip_whitespace_and_comments();
    const std::size_t start = pos_;
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > std::numeric_limits<unsigned int>::max()) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("expected ") + what, pos_);
    }
    return value;
  }

  void expect_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ParseError("expected whitespace before the pixel data", pos_);
    }
    ++pos_;
  }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_;
};

}  // namespace

ImageBuffer decode_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw ParseError("missing 'P' magic", 0);
  if (bytes[1] != '5') throw ParseError("unsupported format: only binary P5 is accepted", 1);

  HeaderReader reader(bytes, 2);
  const auto width = reader.read_number("width");
  const auto height = reader.read_number("height");
  reader.skip_whitespace_and_comments();
  const std::size_t maxval_offset = reader.pos();
  const auto maxval = reader.read_number("maxval");
  if (width == 0 || height == 0) throw ParseError("image dimensions must be positive", 2);
  if (maxval == 0) throw ParseError("maxval must be positive", maxval_offset);
  if (maxval > 255) {
    throw ParseError("unsupported format: maxval " + std::to_string(maxval) + " (only 8-bit PGM is supported)",
                     maxval_offset);
  }
  reader.expect_single_whitespace();

  const std::size_t data_offset = reader.pos();
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - data_offset < count) {
    throw ParseError("truncated pixel data: expected " + std::to_string(count) + " bytes, found " +
                         std::to_string(bytes.size() - data_offset),
                     bytes.size());
  }
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char v = bytes[data_offset + i];
    if (v > maxval) throw ParseError("pixel value exceeds maxval", data_offset + i);
    data[i] = v;
  }
  return ImageBuffer(Shape{height, width}, std::move(data));
}

std::string encode_pgm(const ImageBuffer& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.values()) {
    const double clamped = std::isfinite(v) ? std::clamp(v, 0.0, 255.0) : 0.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped))));
  }
  return out;
}

ImageBuffer read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.offset());
  }
}

void write_image(const ImageBuffer& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_pgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace salsa

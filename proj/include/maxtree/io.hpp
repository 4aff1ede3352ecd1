#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "image.hpp"

namespace maxtree {

// File-format error carrying the offset of the offending byte.
struct ParseError : std::runtime_error {
  std::size_t byte_offset;
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
};

namespace detail {

struct Cursor {
  const std::string& data;
  std::size_t pos = 0;

  bool eof() const { return pos >= data.size(); }
  unsigned char peek() const { return static_cast<unsigned char>(data[pos]); }

  // Whitespace and '#' comments separate PGM header tokens.
  void skip_separators() {
    while (!eof()) {
      unsigned char ch = peek();
      if (ch == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' ||
                 ch == '\f' || ch == '\v') {
        ++pos;
      } else {
        break;
      }
    }
  }

  std::uint64_t read_uint(const char* what, std::uint64_t max_value) {
    skip_separators();
    if (eof()) throw ParseError(std::string("missing ") + what, pos);
    if (peek() < '0' || peek() > '9')
      throw ParseError(std::string("expected digit for ") + what, pos);
    std::uint64_t value = 0;
    while (!eof() && peek() >= '0' && peek() <= '9') {
      value = value * 10 + (peek() - '0');
      if (value > max_value)
        throw ParseError(std::string(what) + " out of range", pos);
      ++pos;
    }
    return value;
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace detail

// PGM (P2 ascii / P5 binary), maxval up to 65535. Loaded bit depth is 8 when
// maxval fits a byte, 16 otherwise. P5 samples above 255 are two bytes,
// big-endian, per the format.
inline Image2D parse_pgm(const std::string& data) {
  detail::Cursor cur{data};
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
    throw ParseError("not a P2/P5 PGM header", 0);
  const bool binary = data[1] == '5';
  cur.pos = 2;
  const auto width = static_cast<std::uint32_t>(cur.read_uint("width", 1u << 30));
  const auto height = static_cast<std::uint32_t>(cur.read_uint("height", 1u << 30));
  const auto maxval = static_cast<std::uint32_t>(cur.read_uint("maxval", 65535));
  if (maxval == 0) throw ParseError("maxval must be positive", cur.pos);
  if (width == 0 || height == 0)
    throw ParseError("zero image dimension", cur.pos);

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<pixel_value> values(count);
  if (binary) {
    // Exactly one separator byte between maxval and the raster.
    if (cur.eof()) throw ParseError("missing raster", cur.pos);
    ++cur.pos;
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    if (data.size() - cur.pos < count * bytes_per)
      throw ParseError("truncated raster", data.size());
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t v = static_cast<unsigned char>(data[cur.pos++]);
      if (bytes_per == 2)
        v = (v << 8) | static_cast<unsigned char>(data[cur.pos++]);
      if (v > maxval)
        throw ParseError("sample exceeds maxval", cur.pos - bytes_per);
      values[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      values[i] = static_cast<std::uint32_t>(cur.read_uint("sample", maxval));
  }
  return Image2D{width, height, maxval > 255 ? 16u : 8u, std::move(values)};
}

inline Image2D load_pgm(const std::string& path) {
  return parse_pgm(detail::read_file(path));
}

inline std::string format_pgm(const Image2D& img, bool binary = true) {
  if (img.bit_depth > 16)
    throw std::invalid_argument("PGM holds at most 16-bit samples; use the raw "
                                "dump format for deeper images");
  const std::uint32_t maxval =
      (std::uint32_t{1} << img.bit_depth) - 1;
  std::ostringstream out;
  out << (binary ? "P5" : "P2") << '\n'
      << img.width << ' ' << img.height << '\n'
      << maxval << '\n';
  if (binary) {
    std::string raster;
    raster.reserve(img.size() * (maxval > 255 ? 2 : 1));
    for (pixel_value v : img.values) {
      if (maxval > 255) raster.push_back(static_cast<char>((v >> 8) & 0xff));
      raster.push_back(static_cast<char>(v & 0xff));
    }
    out << raster;
  } else {
    for (std::size_t i = 0; i < img.size(); ++i)
      out << img.values[i] << (((i + 1) % img.width) == 0 ? '\n' : ' ');
  }
  return out.str();
}

inline void save_pgm(const Image2D& img, const std::string& path,
                     bool binary = true) {
  detail::write_file(path, format_pgm(img, binary));
}

// Raw dump: width, height, bit_depth, then all values, as little-endian u32.
// Round-trips any bit depth exactly.
inline std::string format_raw(const Image2D& img) {
  std::string out;
  out.reserve((3 + img.size()) * 4);
  auto put = [&out](std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
  };
  put(img.width);
  put(img.height);
  put(img.bit_depth);
  for (pixel_value v : img.values) put(v);
  return out;
}

inline Image2D parse_raw(const std::string& data) {
  auto get = [&data](std::size_t word) -> std::uint32_t {
    const std::size_t at = word * 4;
    if (at + 4 > data.size()) throw ParseError("truncated raw dump", data.size());
    return static_cast<std::uint32_t>(static_cast<unsigned char>(data[at])) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + 1])) << 8) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + 2])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + 3])) << 24);
  };
  const std::uint32_t width = get(0);
  const std::uint32_t height = get(1);
  const std::uint32_t bit_depth = get(2);
  if (bit_depth < 1 || bit_depth > kMaxBitDepth)
    throw ParseError("bit depth out of range", 8);
  if (width == 0 || height == 0) throw ParseError("zero image dimension", 0);
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (data.size() != (3 + count) * 4)
    throw ParseError("raw dump size does not match header", data.size());
  std::vector<pixel_value> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = get(3 + i);
    if (bit_depth < kMaxBitDepth &&
        values[i] >= (pixel_value{1} << bit_depth))
      throw ParseError("value exceeds declared bit depth", (3 + i) * 4);
  }
  return Image2D{width, height, bit_depth, std::move(values)};
}

inline Image2D load_raw(const std::string& path) {
  return parse_raw(detail::read_file(path));
}

// Loads by extension: .pgm as PGM, anything else as the raw dump format.
inline Image2D load_image_any(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0)
    return load_pgm(path);
  return load_raw(path);
}

inline void save_raw(const Image2D& img, const std::string& path) {
  detail::write_file(path, format_raw(img));
}

// Saves by extension, mirroring load_image_any.
inline void save_image_any(const Image2D& img, const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0)
    save_pgm(img, path);
  else
    save_raw(img, path);
}

} // namespace maxtree

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace maxtree {

// 2D grid connectivity: C4 = edge-adjacent, C8 = edge- or corner-adjacent.
enum class Connectivity { C4, C8 };

inline const char* to_string(Connectivity c) {
  return c == Connectivity::C4 ? "c4" : "c8";
}

// Flat row-major grayscale image. Values are unsigned and must fit in
// bit_depth bits (1..32).
struct Image2D {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t bit_depth = 8;
  std::vector<pixel_value> values;

  std::size_t size() const { return values.size(); }
  pixel_value operator[](pixel_index p) const { return values[p]; }
  pixel_value& operator[](pixel_index p) { return values[p]; }
  pixel_value at(std::uint32_t row, std::uint32_t col) const {
    return values[static_cast<std::size_t>(row) * width + col];
  }
  pixel_index index_of(std::uint32_t row, std::uint32_t col) const {
    return static_cast<pixel_index>(row * width + col);
  }

  bool operator==(const Image2D&) const = default;
};

inline Image2D make_image(std::uint32_t width, std::uint32_t height,
                          std::vector<pixel_value> values,
                          std::uint32_t bit_depth) {
  if (bit_depth < 1 || bit_depth > kMaxBitDepth)
    throw std::invalid_argument("bit_depth must be in [1, 32], got " +
                                std::to_string(bit_depth));
  if (values.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("value count does not match width*height");
  if (bit_depth < kMaxBitDepth) {
    const pixel_value limit = pixel_value{1} << bit_depth;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] >= limit)
        throw std::invalid_argument("value " + std::to_string(values[i]) +
                                    " at pixel " + std::to_string(i) +
                                    " exceeds bit depth " +
                                    std::to_string(bit_depth));
  }
  return Image2D{width, height, bit_depth, std::move(values)};
}

// Neighbor indices of one pixel, bounds-clipped, in a fixed scan order:
// C4 yields north, west, east, south; C8 yields the row-major order of the
// 3x3 window minus the center. Iteration order is part of the contract —
// the flooding builders visit neighbors in exactly this order.
struct NeighborBuffer {
  std::array<pixel_index, 8> idx;
  std::uint32_t count = 0;

  const pixel_index* begin() const { return idx.data(); }
  const pixel_index* end() const { return idx.data() + count; }
  std::uint32_t size() const { return count; }
  pixel_index operator[](std::uint32_t i) const { return idx[i]; }
};

// Neighborhood restricted to rows [row_begin, row_end) — the whole image by
// default; the parallel builder narrows it to one horizontal band.
inline NeighborBuffer neighbors_in_rows(const Image2D& img, pixel_index p,
                                        Connectivity conn,
                                        std::uint32_t row_begin,
                                        std::uint32_t row_end) {
  NeighborBuffer out;
  const std::uint32_t w = img.width;
  const std::uint32_t r = p / w;
  const std::uint32_t c = p % w;
  const bool up = r > row_begin;
  const bool down = r + 1 < row_end;
  const bool left = c > 0;
  const bool right = c + 1 < w;
  if (conn == Connectivity::C4) {
    if (up) out.idx[out.count++] = p - w;
    if (left) out.idx[out.count++] = p - 1;
    if (right) out.idx[out.count++] = p + 1;
    if (down) out.idx[out.count++] = p + w;
  } else {
    if (up && left) out.idx[out.count++] = p - w - 1;
    if (up) out.idx[out.count++] = p - w;
    if (up && right) out.idx[out.count++] = p - w + 1;
    if (left) out.idx[out.count++] = p - 1;
    if (right) out.idx[out.count++] = p + 1;
    if (down && left) out.idx[out.count++] = p + w - 1;
    if (down) out.idx[out.count++] = p + w;
    if (down && right) out.idx[out.count++] = p + w + 1;
  }
  return out;
}

inline NeighborBuffer neighbors(const Image2D& img, pixel_index p,
                                Connectivity conn = Connectivity::C4) {
  if (p >= img.size())
    throw std::domain_error("pixel index " + std::to_string(p) +
                            " out of range for an image of " +
                            std::to_string(img.size()) + " pixels");
  return neighbors_in_rows(img, p, conn, 0, img.height);
}

} // namespace maxtree

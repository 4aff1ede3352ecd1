#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "image.hpp"

namespace maxtree {

// Resize by wrapping coordinates: out(r, c) = in(r mod h, c mod w). Growing
// tiles the source periodically; shrinking is a plain top-left crop.
inline Image2D resize_by_tiling(const Image2D& img, std::uint32_t new_width,
                                std::uint32_t new_height) {
  if (new_width == 0 || new_height == 0)
    throw std::invalid_argument("tiled size must be positive");
  Image2D out{new_width, new_height, img.bit_depth, {}};
  out.values.resize(static_cast<std::size_t>(new_width) * new_height);
  std::size_t at = 0;
  for (std::uint32_t r = 0; r < new_height; ++r) {
    const std::size_t src_row =
        static_cast<std::size_t>(r % img.height) * img.width;
    for (std::uint32_t c = 0; c < new_width; ++c)
      out.values[at++] = img.values[src_row + c % img.width];
  }
  return out;
}

// Change bit depth. Downward shifts values right; upward shifts left and
// fills the new low bits with seeded uniform noise, which keeps the strict
// order of any two differing input values. Deterministic for a given seed.
inline Image2D requantize(const Image2D& img, std::uint32_t target_bits,
                          std::uint64_t seed) {
  if (target_bits < 1 || target_bits > kMaxBitDepth)
    throw std::invalid_argument("target bit depth must be in [1, 32]");
  Image2D out{img.width, img.height, target_bits, img.values};
  if (target_bits < img.bit_depth) {
    const std::uint32_t shift = img.bit_depth - target_bits;
    for (pixel_value& v : out.values) v >>= shift;
  } else if (target_bits > img.bit_depth) {
    const std::uint32_t shift = target_bits - img.bit_depth;
    const std::uint64_t mask = (std::uint64_t{1} << shift) - 1;
    std::mt19937_64 rng(seed);
    for (pixel_value& v : out.values)
      v = static_cast<pixel_value>(
          (static_cast<std::uint64_t>(v) << shift) | (rng() & mask));
  }
  return out;
}

} // namespace maxtree

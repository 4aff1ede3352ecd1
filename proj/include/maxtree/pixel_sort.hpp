#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "image.hpp"

namespace maxtree {

// Stable orderings of pixel indices by increasing gray value; equal values
// keep index order. Counting sort allocates 2^bits buckets and is therefore
// reserved for depths below kBucketQueueBitLimit; radix sort covers any depth
// with ceil(bits/16) stable passes over 16-bit digits, least-significant
// first.

namespace detail {

// One stable counting pass on digit (v >> shift) & mask; `counts` must have
// mask+1 entries. Sorted result lands back in `order`.
inline void counting_pass(const Image2D& img, std::vector<pixel_index>& order,
                          std::vector<pixel_index>& scratch,
                          std::vector<std::uint32_t>& counts,
                          std::uint32_t shift, std::uint32_t mask) {
  counts.assign(counts.size(), 0);
  for (pixel_index p : order) ++counts[(img[p] >> shift) & mask];
  std::uint32_t running = 0;
  for (std::uint32_t& c : counts) {
    const std::uint32_t count = c;
    c = running;
    running += count;
  }
  scratch.resize(order.size());
  for (pixel_index p : order) scratch[counts[(img[p] >> shift) & mask]++] = p;
  order.swap(scratch);
}

// Sorts `order` (any subset of pixels, pre-filled in index order) stably by
// value, picking the bucketed or radix strategy from the image depth.
inline void stable_value_sort(const Image2D& img,
                              std::vector<pixel_index>& order,
                              std::uint32_t bucket_bit_limit) {
  std::vector<pixel_index> scratch;
  std::vector<std::uint32_t> counts;
  if (img.bit_depth < bucket_bit_limit && img.bit_depth < kBucketQueueBitLimit) {
    counts.resize(std::size_t{1} << img.bit_depth);
    counting_pass(img, order, scratch, counts,/*shift=*/0,
                  static_cast<std::uint32_t>(counts.size() - 1));
  } else {
    counts.resize(std::size_t{1} << 16);
    const std::uint32_t passes = (img.bit_depth + 15) / 16;
    for (std::uint32_t pass = 0; pass < passes; ++pass)
      counting_pass(img, order, scratch, counts, pass * 16, 0xffff);
  }
}

// Pixels of rows [row_begin, row_end), global indices, sorted by value.
inline std::vector<pixel_index> sort_rows(const Image2D& img,
                                          std::uint32_t row_begin,
                                          std::uint32_t row_end) {
  std::vector<pixel_index> order(
      static_cast<std::size_t>(row_end - row_begin) * img.width);
  std::iota(order.begin(), order.end(),
            static_cast<pixel_index>(row_begin * img.width));
  stable_value_sort(img, order, kBucketQueueBitLimit);
  return order;
}

} // namespace detail

inline std::vector<pixel_index> counting_sort(const Image2D& img,
                                              std::uint32_t bits) {
  if (bits >= kBucketQueueBitLimit)
    throw std::invalid_argument(
        "counting sort is limited to bit depths below " +
        std::to_string(kBucketQueueBitLimit) + "; use radix_sort");
  const std::size_t n = img.size();
  std::vector<pixel_index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<pixel_index> scratch;
  std::vector<std::uint32_t> counts(std::size_t{1} << bits);
  detail::counting_pass(img, order, scratch, counts, 0,
                        static_cast<std::uint32_t>(counts.size() - 1));
  return order;
}

inline std::vector<pixel_index> counting_sort(const Image2D& img) {
  return counting_sort(img, img.bit_depth);
}

inline std::vector<pixel_index> radix_sort(const Image2D& img,
                                           std::uint32_t bits) {
  const std::size_t n = img.size();
  std::vector<pixel_index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<pixel_index> scratch;
  std::vector<std::uint32_t> counts(std::size_t{1} << 16);
  const std::uint32_t passes = (bits + 15) / 16;
  for (std::uint32_t pass = 0; pass < passes; ++pass)
    detail::counting_pass(img, order, scratch, counts, pass * 16, 0xffff);
  return order;
}

inline std::vector<pixel_index> radix_sort(const Image2D& img) {
  return radix_sort(img, img.bit_depth);
}

inline std::vector<pixel_index> sort_pixels(
    const Image2D& img, std::uint32_t bucket_bit_limit = kBucketQueueBitLimit) {
  return img.bit_depth < bucket_bit_limit ? counting_sort(img)
                                          : radix_sort(img);
}

} // namespace maxtree

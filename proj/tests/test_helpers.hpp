#pragma once

#include <maxtree/maxtree.hpp>

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace testutil {

using namespace maxtree;

inline constexpr std::uint32_t kCorpusDepths[] = {1, 2, 4, 8, 12, 16, 20, 32};

// Deterministic fuzz corpus: 26 images per bit depth (208 total) covering
// degenerate shapes, few-level and full-range value distributions, constants
// and gradients, up to 64x64.
inline const std::vector<Image2D>& fuzz_corpus() {
  static const std::vector<Image2D> corpus = [] {
    std::vector<Image2D> out;
    std::mt19937_64 rng(0xC0FFEE);
    const auto add = [&](std::uint32_t w, std::uint32_t h, std::uint32_t bits,
                         std::uint64_t levels) {
      const std::uint64_t mask =
          bits >= 32 ? 0xFFFFFFFFull : ((std::uint64_t{1} << bits) - 1);
      std::vector<pixel_value> v(std::size_t{w} * h);
      for (auto& x : v) x = static_cast<pixel_value>((rng() % levels) & mask);
      out.push_back(make_image(w, h, std::move(v), bits));
    };
    const std::pair<std::uint32_t, std::uint32_t> shapes[] = {
        {1, 1},   {1, 2},   {2, 1},  {1, 7},   {9, 1},   {1, 64},
        {64, 1},  {2, 2},   {2, 3},  {3, 2},   {3, 3},   {4, 3},
        {4, 4},   {5, 4},   {5, 5},  {6, 9},   {7, 5},   {8, 8},
        {9, 9},   {12, 12}, {13, 11}, {16, 16}, {24, 17}, {32, 32},
        {48, 31}, {64, 64}};
    for (const std::uint32_t bits : kCorpusDepths) {
      const std::uint64_t full =
          bits >= 32 ? 0x100000000ull : (std::uint64_t{1} << bits);
      std::size_t i = 0;
      for (const auto& [w, h] : shapes) {
        // Cycle value distributions: full range, binary-ish, few levels.
        const std::uint64_t levels =
            i % 3 == 0 ? full
                       : (i % 3 == 1 ? std::min<std::uint64_t>(full, 2)
                                     : std::min<std::uint64_t>(full, 5));
        add(w, h, bits, levels);
        ++i;
      }
      // Constant and gradient extremes at a fixed small size.
      const std::uint64_t mask = full - 1;
      std::vector<pixel_value> flat(
          25, static_cast<pixel_value>(rng() & mask));
      out.push_back(make_image(5, 5, std::move(flat), bits));
      std::vector<pixel_value> ramp(30);
      for (std::size_t j = 0; j < ramp.size(); ++j)
        ramp[j] = static_cast<pixel_value>(j & mask);
      out.push_back(make_image(6, 5, std::move(ramp), bits));
    }
    return out;
  }();
  return corpus;
}

// A smaller slice for quadratic-cost checks.
inline std::vector<const Image2D*> small_corpus(std::size_t max_pixels = 256) {
  std::vector<const Image2D*> out;
  for (const Image2D& img : fuzz_corpus())
    if (img.size() <= max_pixels) out.push_back(&img);
  return out;
}

struct NamedTree {
  std::string name;
  MaxTree tree;
};

// Every sequential builder applicable to the image's bit depth.
inline std::vector<NamedTree> sequential_trees(const Image2D& img,
                                               Connectivity conn) {
  std::vector<NamedTree> out;
  out.push_back({"uf", maxtree_uf(img, conn)});
  out.push_back({"uf_rank", maxtree_uf_rank(img, conn)});
  out.push_back({"uf_levelcomp", maxtree_uf_levelcomp(img, conn)});
  if (img.bit_depth < kBucketQueueBitLimit)
    out.push_back({"salembier", maxtree_salembier(img, conn)});
  out.push_back({"nonrec", maxtree_nonrec(img, conn)});
  return out;
}

} // namespace testutil

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "image.hpp"
#include "pixel_sort.hpp"
#include "tree.hpp"

namespace maxtree {

// Immersion builders: pixels are processed by decreasing gray value and
// merged with their already-processed neighbors through an auxiliary
// disjoint-set forest (zpar), building the parent image as they go. kUnset in
// parent marks not-yet-processed pixels. All three variants finish with the
// downward canonization sweep.

// Scratch arrays shared by the union-find family. zpar is the auxiliary
// forest; rank and repr exist for the union-by-rank variant only (repr maps a
// zpar root to the canonical pixel of its partial node in parent).
struct UfScratch {
  std::vector<pixel_index> zpar;
  std::vector<pixel_index> repr;
  std::vector<std::uint32_t> rank;
};

// Current zpar root of p, relinking every pixel on the walked path directly
// to it. Two passes instead of recursion: flat chains can span the image.
inline pixel_index find_root(std::vector<pixel_index>& zpar, pixel_index p) {
  pixel_index root = p;
  while (zpar[root] != root) root = zpar[root];
  while (zpar[p] != root) {
    const pixel_index next = zpar[p];
    zpar[p] = root;
    p = next;
  }
  return root;
}

namespace detail {

// Plain variant: each neighbor component root is attached under the current
// pixel. `sorted` holds the band's pixels by increasing value; parent entries
// for them must be kUnset on entry. No S, no canonization here.
inline void uf_build_parent(const Image2D& img, Connectivity conn,
                            std::uint32_t row_begin, std::uint32_t row_end,
                            const std::vector<pixel_index>& sorted,
                            std::vector<pixel_index>& parent,
                            UfScratch& scratch) {
  auto& zpar = scratch.zpar;
  for (std::size_t i = sorted.size(); i-- > 0;) {
    const pixel_index p = sorted[i];
    parent[p] = p;
    zpar[p] = p;
    for (pixel_index n : neighbors_in_rows(img, p, conn, row_begin, row_end)) {
      if (parent[n] == kUnset) continue;
      const pixel_index r = find_root(zpar, n);
      if (r != p) {
        zpar[r] = p;
        parent[r] = p;
      }
    }
  }
}

// Union-by-rank variant: zpar merges keep the higher-rank root, so find paths
// stay short, and repr tracks which parent-tree pixel each zpar root stands
// for: the component being grown always gets the current pixel as its new
// node root via parent(repr(z_n)) <- p.
inline void uf_rank_build_parent(const Image2D& img, Connectivity conn,
                                 std::uint32_t row_begin, std::uint32_t row_end,
                                 const std::vector<pixel_index>& sorted,
                                 std::vector<pixel_index>& parent,
                                 UfScratch& scratch) {
  auto& zpar = scratch.zpar;
  auto& repr = scratch.repr;
  auto& rank = scratch.rank;
  for (std::size_t i = sorted.size(); i-- > 0;) {
    const pixel_index p = sorted[i];
    parent[p] = p;
    zpar[p] = p;
    repr[p] = p;
    rank[p] = 0;
    pixel_index zp = p;
    for (pixel_index n : neighbors_in_rows(img, p, conn, row_begin, row_end)) {
      if (parent[n] == kUnset) continue;
      pixel_index zn = find_root(zpar, n);
      if (zn == zp) continue;
      parent[repr[zn]] = p;
      if (rank[zp] < rank[zn]) std::swap(zp, zn);
      zpar[zn] = zp;
      repr[zp] = p;
      if (rank[zp] == rank[zn]) ++rank[zp];
    }
  }
}

// Level-compression variant: zpar roots double as parent-tree roots, and when
// two roots sit at the same level the existing flat-zone root survives
// (z_p/z_n swapped) so flat zones do not degenerate into pixel chains.
// `rebuilt_S`, when given, is refilled from the back as pixels get attached;
// the caller finishes it with S[0] = parent(S[0]).
inline void uf_levelcomp_build_parent(const Image2D& img, Connectivity conn,
                                      std::uint32_t row_begin,
                                      std::uint32_t row_end,
                                      const std::vector<pixel_index>& sorted,
                                      std::vector<pixel_index>& parent,
                                      UfScratch& scratch,
                                      std::vector<pixel_index>* rebuilt_S) {
  auto& zpar = scratch.zpar;
  std::size_t j = sorted.size();
  --j;  // slot 0 is filled by the caller's final S[0] = parent(S[0]) step
  for (std::size_t i = sorted.size(); i-- > 0;) {
    const pixel_index p = sorted[i];
    parent[p] = p;
    zpar[p] = p;
    pixel_index zp = p;
    for (pixel_index n : neighbors_in_rows(img, p, conn, row_begin, row_end)) {
      if (parent[n] == kUnset) continue;
      pixel_index zn = find_root(zpar, n);
      if (zp == zn) continue;
      if (img[zp] == img[zn]) std::swap(zp, zn);
      zpar[zn] = zp;
      parent[zn] = zp;
      if (rebuilt_S) (*rebuilt_S)[j--] = zn;
    }
  }
}

} // namespace detail

inline MaxTree maxtree_uf(const Image2D& img,
                          Connectivity conn = Connectivity::C4) {
  const std::size_t n = img.size();
  MaxTree t{std::vector<pixel_index>(n, kUnset), sort_pixels(img)};
  UfScratch scratch{std::vector<pixel_index>(n), {}, {}};
  detail::uf_build_parent(img, conn, 0, img.height, t.S, t.parent, scratch);
  canonize(t, img);
  return t;
}

inline MaxTree maxtree_uf_rank(const Image2D& img,
                               Connectivity conn = Connectivity::C4) {
  const std::size_t n = img.size();
  MaxTree t{std::vector<pixel_index>(n, kUnset), sort_pixels(img)};
  UfScratch scratch{std::vector<pixel_index>(n), std::vector<pixel_index>(n),
                    std::vector<std::uint32_t>(n)};
  detail::uf_rank_build_parent(img, conn, 0, img.height, t.S, t.parent,
                               scratch);
  canonize(t, img);
  return t;
}

// Whether the equal-level merge policy is active. Auto turns it off at and
// above kBucketQueueBitLimit, where flat zones are too rare to pay for the
// extra level tests; On/Off override that for benchmarking.
enum class LevelCompression { Auto, On, Off };

inline MaxTree maxtree_uf_levelcomp(
    const Image2D& img, Connectivity conn = Connectivity::C4,
    LevelCompression mode = LevelCompression::Auto) {
  const bool enabled =
      mode == LevelCompression::On ||
      (mode == LevelCompression::Auto && img.bit_depth < kBucketQueueBitLimit);
  if (!enabled) return maxtree_uf(img, conn);

  const std::size_t n = img.size();
  const std::vector<pixel_index> sorted = sort_pixels(img);
  MaxTree t{std::vector<pixel_index>(n, kUnset), sorted};
  if (n == 0) return t;
  UfScratch scratch{std::vector<pixel_index>(n), {}, {}};
  detail::uf_levelcomp_build_parent(img, conn, 0, img.height, sorted, t.parent,
                                    scratch, &t.S);
  t.S[0] = t.parent[t.S[0]];
  canonize(t, img);
  return t;
}

} // namespace maxtree

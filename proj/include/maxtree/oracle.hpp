#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "image.hpp"
#include "tree.hpp"

namespace maxtree {

// Brute-force reference built straight from the definition: for every
// distinct level, flood the upper level set [ima >= level] and read the
// hierarchy off component containment. Deliberately shares nothing with the
// production builders (it even enumerates adjacency on its own), so agreement
// with them is meaningful. Cost is O(levels * n); meant for small inputs.

namespace detail {

struct BruteNodes {
  std::vector<std::uint32_t> node_of;      // per pixel, creation-order ids
  std::vector<pixel_value> level;          // per node
  std::vector<std::uint32_t> parent;       // per node; parent id < own id
  std::vector<std::uint64_t> area;         // per node, upper-component size
};

// Connected components of [ima >= level] for every distinct level, ascending.
// A component becomes a node when it holds a pixel at exactly that level;
// its parent is the deepest node created before it that contains it.
inline BruteNodes brute_nodes(const Image2D& img, Connectivity conn) {
  const std::size_t n = img.size();
  const int w = static_cast<int>(img.width);
  const int h = static_cast<int>(img.height);
  std::vector<pixel_value> levels(img.values);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  BruteNodes out;
  out.node_of.assign(n, kUnset);
  std::vector<std::uint32_t> visit_stamp(n, 0);
  std::vector<pixel_index> queue;
  std::vector<pixel_index> members;
  queue.reserve(n);
  members.reserve(n);

  const int dr4[] = {-1, 0, 0, 1};
  const int dc4[] = {0, -1, 1, 0};
  const int dr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const int nn = conn == Connectivity::C4 ? 4 : 8;
  const int* dr = conn == Connectivity::C4 ? dr4 : dr8;
  const int* dc = conn == Connectivity::C4 ? dc4 : dc8;

  for (std::uint32_t li = 0; li < levels.size(); ++li) {
    const pixel_value lambda = levels[li];
    const std::uint32_t stamp = li + 1;
    for (pixel_index seed = 0; seed < n; ++seed) {
      if (img[seed] < lambda || visit_stamp[seed] == stamp) continue;
      members.clear();
      bool has_level_pixel = false;
      visit_stamp[seed] = stamp;
      queue.assign(1, seed);
      while (!queue.empty()) {
        const pixel_index p = queue.back();
        queue.pop_back();
        members.push_back(p);
        if (img[p] == lambda) has_level_pixel = true;
        const int pr = static_cast<int>(p) / w;
        const int pc = static_cast<int>(p) % w;
        for (int k = 0; k < nn; ++k) {
          const int r = pr + dr[k];
          const int c = pc + dc[k];
          if (r < 0 || r >= h || c < 0 || c >= w) continue;
          const pixel_index q = static_cast<pixel_index>(r * w + c);
          if (img[q] < lambda || visit_stamp[q] == stamp) continue;
          visit_stamp[q] = stamp;
          queue.push_back(q);
        }
      }
      if (!has_level_pixel) continue;  // same set as a deeper node-to-be
      const auto id = static_cast<std::uint32_t>(out.level.size());
      out.level.push_back(lambda);
      out.area.push_back(members.size());
      // All members share the same deepest enclosing node (their components
      // coincide at every lower level), so any member's current id works.
      out.parent.push_back(out.node_of[members.front()] == kUnset
                               ? id
                               : out.node_of[members.front()]);
      for (pixel_index p : members) out.node_of[p] = id;
    }
  }
  return out;
}

// Renumber creation-order ids by first occurrence in pixel order, matching
// the convention of normalize().
inline NormalizedTree to_normalized(const Image2D& img, const BruteNodes& nodes,
                                    std::vector<std::uint64_t>* areas_out) {
  const std::size_t n = img.size();
  NormalizedTree out;
  out.node_of.resize(n);
  std::vector<std::uint32_t> remap(nodes.level.size(), kUnset);
  std::vector<std::uint32_t> old_of_new;
  old_of_new.reserve(nodes.level.size());
  for (pixel_index p = 0; p < n; ++p) {
    const std::uint32_t old_id = nodes.node_of[p];
    if (remap[old_id] == kUnset) {
      remap[old_id] = out.node_count++;
      old_of_new.push_back(old_id);
      out.node_rep.push_back(p);
      out.node_level.push_back(nodes.level[old_id]);
    }
    out.node_of[p] = remap[old_id];
  }
  out.node_parent.resize(out.node_count);
  if (areas_out) areas_out->resize(out.node_count);
  for (std::uint32_t id = 0; id < out.node_count; ++id) {
    const std::uint32_t old_id = old_of_new[id];
    out.node_parent[id] = remap[nodes.parent[old_id]];
    if (areas_out) (*areas_out)[id] = nodes.area[old_id];
  }
  return out;
}

} // namespace detail

inline NormalizedTree brute_maxtree(const Image2D& img,
                                    Connectivity conn = Connectivity::C4) {
  return detail::to_normalized(img, detail::brute_nodes(img, conn), nullptr);
}

// Normalized tree plus the cardinality of each node's upper component.
inline NormalizedTree brute_maxtree_with_areas(
    const Image2D& img, Connectivity conn, std::vector<std::uint64_t>& areas) {
  return detail::to_normalized(img, detail::brute_nodes(img, conn), &areas);
}

// Area opening by definition: out(p) is the highest level whose upper
// component around p still covers at least `threshold` pixels, or 0 when
// even the full image is too small.
inline Image2D brute_area_opening(const Image2D& img, Connectivity conn,
                                  std::uint64_t threshold) {
  const detail::BruteNodes nodes = detail::brute_nodes(img, conn);
  // Highest qualifying level among each node's ancestors-or-self; parents
  // precede children in creation order, so one forward pass settles it.
  constexpr pixel_value kNone = std::numeric_limits<pixel_value>::max();
  std::vector<pixel_value> best(nodes.level.size());
  for (std::uint32_t id = 0; id < nodes.level.size(); ++id) {
    if (nodes.area[id] >= threshold)
      best[id] = nodes.level[id];
    else
      best[id] = nodes.parent[id] == id ? kNone : best[nodes.parent[id]];
  }
  Image2D out{img.width, img.height, img.bit_depth, {}};
  out.values.resize(img.size());
  for (pixel_index p = 0; p < img.size(); ++p) {
    const pixel_value b = best[nodes.node_of[p]];
    out.values[p] = b == kNone ? 0 : b;
  }
  return out;
}

} // namespace maxtree

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "image.hpp"
#include "tree.hpp"

namespace maxtree {

// An attribute definition supplies a value type, the per-pixel seed value,
// and an associative combine. Accumulated values are meaningful at canonical
// pixels only; elsewhere they stay at the seed.

// Pixel count of the node's peak component.
struct AreaAttribute {
  using value_type = std::uint64_t;
  static value_type at(pixel_index, pixel_value) { return 1; }
  static value_type merge(value_type a, value_type b) { return a + b; }
};

// Leaves-toward-root fold: seed every pixel, then walk S backward (root
// excluded) folding each pixel into its parent. The S ordering guarantees a
// node is complete before its own fold into the parent happens.
template <class Attr>
std::vector<typename Attr::value_type> compute_attribute(const MaxTree& t,
                                                         const Image2D& img) {
  if (ValidationReport report = validate(t, img); !report.ok())
    throw std::invalid_argument(
        "cannot compute attributes on an invalid tree: " +
        report.issues.front().to_string());
  std::vector<typename Attr::value_type> attr(t.parent.size());
  for (const pixel_index p : t.S) attr[p] = Attr::at(p, img[p]);
  for (std::size_t i = t.S.size(); i-- > 1;) {
    const pixel_index p = t.S[i];
    attr[t.parent[p]] = Attr::merge(attr[t.parent[p]], attr[p]);
  }
  return attr;
}

inline std::vector<std::uint64_t> compute_area(const MaxTree& t,
                                               const Image2D& img) {
  return compute_attribute<AreaAttribute>(t, img);
}

// Direct filtering: nodes whose attribute fails the threshold are lowered to
// their nearest passing ancestor's level; a failing root zeroes the image.
// `attr` must come from compute_attribute on this same tree.
template <class V>
Image2D direct_filter(const MaxTree& t, const Image2D& img,
                      const std::vector<V>& attr, V threshold) {
  Image2D out{img.width, img.height, img.bit_depth,
              std::vector<pixel_value>(img.size())};
  if (t.S.empty()) return out;
  const pixel_index root = t.S[0];
  out.values[root] = attr[root] < threshold ? 0 : img[root];
  for (std::size_t i = 1; i < t.S.size(); ++i) {
    const pixel_index p = t.S[i];
    const pixel_index q = t.parent[p];
    if (img[q] == img[p])
      out.values[p] = out.values[q];  // non-canonical: copy the node's output
    else if (attr[p] < threshold)
      out.values[p] = out.values[q];  // node removed: lower to parent output
    else
      out.values[p] = img[p];
  }
  return out;
}

// Area opening of the image the tree was built from.
inline Image2D area_opening(const MaxTree& t, const Image2D& img,
                            std::uint64_t threshold) {
  return direct_filter(t, img, compute_area(t, img), threshold);
}

} // namespace maxtree

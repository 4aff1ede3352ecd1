#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "image.hpp"

namespace maxtree {

// Component tree encoded as a parent image plus a top-down pixel order S:
// parents appear in S before their children and S[0] is the root. One pixel
// per flat zone is canonical (the root, or any p with ima(parent(p)) <
// ima(p)); the other pixels of the zone point at it.
struct MaxTree {
  std::vector<pixel_index> parent;
  std::vector<pixel_index> S;
};

inline bool is_canonical(const MaxTree& t, const Image2D& img, pixel_index p) {
  return t.parent[p] == p || img[t.parent[p]] < img[p];
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  enum class Kind {
    SizeMismatch,
    ParentOutOfRange,
    NoRoot,
    ExtraRoot,
    LevelInversion,      // ima(parent(p)) > ima(p)
    NonCanonicalParent,  // parent(p) is not a canonical pixel
    SNotPermutation,
    SRootNotFirst,
    SChildBeforeParent,  // p appears in S before parent(p)
  };
  Kind kind;
  pixel_index pixel;  // offending pixel (or S position for permutation issues)
  pixel_index other;  // second index when the issue relates two pixels

  std::string to_string() const {
    std::ostringstream out;
    switch (kind) {
      case Kind::SizeMismatch:
        out << "parent/S size does not match the image (" << pixel << " vs "
            << other << ")";
        break;
      case Kind::ParentOutOfRange:
        out << "parent(" << pixel << ") = " << other << " is out of range";
        break;
      case Kind::NoRoot:
        out << "no pixel satisfies parent(p) = p";
        break;
      case Kind::ExtraRoot:
        out << "second root at pixel " << pixel << " (first root " << other
            << ")";
        break;
      case Kind::LevelInversion:
        out << "ima(parent(" << pixel << ")) exceeds ima(" << pixel << ")";
        break;
      case Kind::NonCanonicalParent:
        out << "parent(" << pixel << ") = " << other << " is not canonical";
        break;
      case Kind::SNotPermutation:
        out << "S is not a permutation: problem at position " << pixel;
        break;
      case Kind::SRootNotFirst:
        out << "S[0] = " << pixel << " is not the root " << other;
        break;
      case Kind::SChildBeforeParent:
        out << "pixel " << pixel << " appears in S before its parent " << other;
        break;
    }
    return out.str();
  }
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  std::string to_string() const {
    std::string out;
    for (const auto& issue : issues) {
      out += issue.to_string();
      out += '\n';
    }
    return out;
  }
};

// Checks the full tree contract: a unique self-parent root, level-monotone
// and canonical parent pointers, and S a top-down permutation starting at the
// root. Safe on corrupt input (out-of-range indices are reported, not
// followed).
inline ValidationReport validate(const MaxTree& t, const Image2D& img) {
  ValidationReport report;
  const std::size_t n = img.size();
  auto add = [&report](ValidationIssue::Kind kind, pixel_index pixel,
                       pixel_index other = 0) {
    report.issues.push_back({kind, pixel, other});
  };

  if (t.parent.size() != n || t.S.size() != n) {
    add(ValidationIssue::Kind::SizeMismatch,
        static_cast<pixel_index>(t.parent.size()),
        static_cast<pixel_index>(t.S.size()));
    return report;
  }
  if (n == 0) return report;

  bool ranges_ok = true;
  for (pixel_index p = 0; p < n; ++p)
    if (t.parent[p] >= n) {
      add(ValidationIssue::Kind::ParentOutOfRange, p, t.parent[p]);
      ranges_ok = false;
    }
  if (!ranges_ok) return report;

  pixel_index root = kUnset;
  for (pixel_index p = 0; p < n; ++p) {
    if (t.parent[p] == p) {
      if (root == kUnset)
        root = p;
      else
        add(ValidationIssue::Kind::ExtraRoot, p, root);
    }
  }
  if (root == kUnset) add(ValidationIssue::Kind::NoRoot, 0);

  for (pixel_index p = 0; p < n; ++p) {
    if (img[t.parent[p]] > img[p])
      add(ValidationIssue::Kind::LevelInversion, p, t.parent[p]);
    if (!is_canonical(t, img, t.parent[p]))
      add(ValidationIssue::Kind::NonCanonicalParent, p, t.parent[p]);
  }

  std::vector<pixel_index> pos(n, kUnset);
  bool perm_ok = true;
  for (pixel_index i = 0; i < n; ++i) {
    const pixel_index p = t.S[i];
    if (p >= n || pos[p] != kUnset) {
      add(ValidationIssue::Kind::SNotPermutation, i);
      perm_ok = false;
      continue;
    }
    pos[p] = i;
  }
  if (perm_ok && root != kUnset) {
    if (t.S[0] != root)
      add(ValidationIssue::Kind::SRootNotFirst, t.S[0], root);
    for (pixel_index p = 0; p < n; ++p)
      if (pos[t.parent[p]] > pos[p])
        add(ValidationIssue::Kind::SChildBeforeParent, p, t.parent[p]);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Canonization

// One top-down sweep making every parent pointer land on a canonical pixel.
// Requires S ordered parents-first; idempotent.
inline void canonize(MaxTree& t, const Image2D& img) {
  for (pixel_index p : t.S) {
    const pixel_index q = t.parent[p];
    if (img[q] == img[t.parent[q]]) t.parent[p] = t.parent[q];
  }
}

struct CycleError : std::runtime_error {
  pixel_index pixel;
  explicit CycleError(pixel_index p)
      : std::runtime_error("parent image contains a cycle through pixel " +
                           std::to_string(p)),
        pixel(p) {}
};

// Canonizes a bare parent image (no S required, e.g. fresh out of a merge)
// and derives S in one pass. Walks each pixel's ancestor path into an
// explicit buffer, then processes the path top-down; every pixel is visited
// once. A parent cycle is reported instead of looping.
inline MaxTree canonize_rebuild_S(const Image2D& img,
                                  std::vector<pixel_index> parent) {
  const std::size_t n = img.size();
  MaxTree t{std::move(parent), {}};
  t.S.reserve(n);
  std::vector<bool> dejavu(n, false);
  std::vector<pixel_index> path;
  for (pixel_index p = 0; p < n; ++p) {
    if (dejavu[p]) continue;
    path.clear();
    pixel_index cur = p;
    while (!dejavu[cur]) {
      path.push_back(cur);
      if (path.size() > n) throw CycleError(cur);
      if (t.parent[cur] == cur) break;  // reached the root
      cur = t.parent[cur];
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const pixel_index q = *it;
      dejavu[q] = true;
      const pixel_index a = t.parent[q];
      if (img[a] == img[t.parent[a]]) t.parent[q] = t.parent[a];
      t.S.push_back(q);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Normalized form

// Algorithm-independent encoding used to compare trees: nodes are numbered
// by the first image-order pixel belonging to them, so two valid trees of
// the same image compare equal exactly when they encode the same hierarchy.
struct NormalizedTree {
  std::uint32_t node_count = 0;
  std::vector<std::uint32_t> node_of;      // per pixel
  std::vector<pixel_value> node_level;     // per node
  std::vector<std::uint32_t> node_parent;  // per node
  std::vector<pixel_index> node_rep;       // smallest pixel of each node

  bool operator==(const NormalizedTree&) const = default;
};

inline NormalizedTree normalize(const MaxTree& t, const Image2D& img) {
  if (ValidationReport report = validate(t, img); !report.ok())
    throw std::invalid_argument("cannot normalize an invalid tree: " +
                                report.issues.front().to_string());
  const std::size_t n = img.size();
  NormalizedTree out;
  out.node_of.resize(n);
  std::vector<std::uint32_t> id_of_canonical(n, kUnset);
  std::vector<pixel_index> canonical_of_id;
  for (pixel_index p = 0; p < n; ++p) {
    const pixel_index rep = is_canonical(t, img, p) ? p : t.parent[p];
    if (id_of_canonical[rep] == kUnset) {
      id_of_canonical[rep] = out.node_count++;
      canonical_of_id.push_back(rep);
      out.node_rep.push_back(p);
      out.node_level.push_back(img[rep]);
    }
    out.node_of[p] = id_of_canonical[rep];
  }
  out.node_parent.resize(out.node_count);
  for (std::uint32_t id = 0; id < out.node_count; ++id) {
    const pixel_index c = canonical_of_id[id];
    out.node_parent[id] =
        t.parent[c] == c ? id : id_of_canonical[t.parent[c]];
  }
  return out;
}

// Human-readable first difference between two normalized trees, for
// mismatch reporting. Empty string when equal.
inline std::string describe_divergence(const NormalizedTree& a,
                                       const NormalizedTree& b) {
  std::ostringstream out;
  if (a.node_of.size() != b.node_of.size()) {
    out << "pixel counts differ: " << a.node_of.size() << " vs "
        << b.node_of.size();
    return out.str();
  }
  if (a.node_count != b.node_count) {
    out << "node counts differ: " << a.node_count << " vs " << b.node_count;
    return out.str();
  }
  for (std::size_t p = 0; p < a.node_of.size(); ++p)
    if (a.node_of[p] != b.node_of[p]) {
      out << "pixel " << p << " belongs to node " << a.node_of[p]
          << " vs node " << b.node_of[p];
      return out.str();
    }
  for (std::uint32_t id = 0; id < a.node_count; ++id) {
    if (a.node_level[id] != b.node_level[id]) {
      out << "node " << id << " (pixel " << a.node_rep[id] << ") has level "
          << a.node_level[id] << " vs " << b.node_level[id];
      return out.str();
    }
    if (a.node_parent[id] != b.node_parent[id]) {
      out << "node " << id << " (pixel " << a.node_rep[id] << ") has parent "
          << a.node_parent[id] << " vs " << b.node_parent[id];
      return out.str();
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// Text dump: one line per pixel, "p parent(p) ima(p)", in S order.

inline std::string format_tree_dump(const MaxTree& t, const Image2D& img) {
  std::ostringstream out;
  for (pixel_index p : t.S)
    out << p << ' ' << t.parent[p] << ' ' << img[p] << '\n';
  return out.str();
}

struct TreeDump {
  MaxTree tree;
  std::vector<pixel_value> levels;  // third column, in pixel order
};

inline TreeDump parse_tree_dump(const std::string& data);

namespace detail {
inline std::uint64_t dump_field(const std::string& data, std::size_t& pos,
                                std::size_t line_start) {
  while (pos < data.size() && (data[pos] == ' ' || data[pos] == '\t')) ++pos;
  if (pos >= data.size() || data[pos] < '0' || data[pos] > '9')
    throw std::runtime_error("malformed tree dump near byte " +
                             std::to_string(line_start));
  std::uint64_t v = 0;
  while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9')
    v = v * 10 + (data[pos++] - '0');
  return v;
}
} // namespace detail

inline TreeDump parse_tree_dump(const std::string& data) {
  std::vector<std::array<std::uint64_t, 3>> rows;
  std::size_t pos = 0;
  while (pos < data.size()) {
    while (pos < data.size() && (data[pos] == '\n' || data[pos] == '\r')) ++pos;
    if (pos >= data.size()) break;
    const std::size_t line_start = pos;
    std::array<std::uint64_t, 3> row{};
    for (int f = 0; f < 3; ++f)
      row[f] = detail::dump_field(data, pos, line_start);
    rows.push_back(row);
  }
  const std::size_t n = rows.size();
  TreeDump out;
  out.tree.parent.assign(n, kUnset);
  out.tree.S.reserve(n);
  out.levels.assign(n, 0);
  for (const auto& row : rows) {
    if (row[0] >= n || row[1] >= n)
      throw std::runtime_error("tree dump pixel index " +
                               std::to_string(row[0] >= n ? row[0] : row[1]) +
                               " out of range for " + std::to_string(n) +
                               " lines");
    const auto p = static_cast<pixel_index>(row[0]);
    out.tree.S.push_back(p);
    out.tree.parent[p] = static_cast<pixel_index>(row[1]);
    out.levels[p] = static_cast<pixel_value>(row[2]);
  }
  return out;
}

} // namespace maxtree

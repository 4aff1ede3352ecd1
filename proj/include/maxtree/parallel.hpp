#pragma once

#include <atomic>
#include <cassert>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flooding.hpp"
#include "image.hpp"
#include "pixel_sort.hpp"
#include "tree.hpp"
#include "union_find.hpp"

namespace maxtree {

// Row-band decomposition of the image domain. Bands are contiguous in memory
// (row-major layout), nonempty, ordered, and cover [0, height) exactly.
struct RowBand {
  std::uint32_t row_begin;
  std::uint32_t row_end;
};

struct DomainSplit {
  std::vector<RowBand> bands;
};

// Near-equal split into at most num_bands bands; requests beyond the row
// count are clamped (callers can compare bands.size() against the request to
// report it).
inline DomainSplit make_domain_split(std::uint32_t height,
                                     std::uint32_t num_bands) {
  DomainSplit split;
  if (height == 0) return split;
  if (num_bands < 1) num_bands = 1;
  if (num_bands > height) num_bands = height;
  const std::uint32_t base = height / num_bands;
  const std::uint32_t extra = height % num_bands;
  std::uint32_t row = 0;
  for (std::uint32_t b = 0; b < num_bands; ++b) {
    const std::uint32_t len = base + (b < extra ? 1 : 0);
    split.bands.push_back({row, row + len});
    row += len;
  }
  return split;
}

// Balanced binary reduction over the bands, flattened into rounds. Every
// step joins two already-merged neighbor regions along one junction (the
// first row of the lower region); steps in the same round touch disjoint row
// ranges, so a round can run fully in parallel, and rounds run in order.
struct MergeStep {
  std::uint32_t junction_row;
};

struct MergePlan {
  std::vector<std::vector<MergeStep>> rounds;
};

namespace detail {

// Returns the reduction height of bands [lo, hi); emits this region's final
// merge into rounds[height - 1].
inline std::size_t plan_merges(const DomainSplit& split, std::size_t lo,
                               std::size_t hi,
                               std::vector<std::vector<MergeStep>>& rounds) {
  if (hi - lo <= 1) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  const std::size_t left = plan_merges(split, lo, mid, rounds);
  const std::size_t right = plan_merges(split, mid, hi, rounds);
  const std::size_t round = left > right ? left : right;
  if (rounds.size() <= round) rounds.resize(round + 1);
  rounds[round].push_back({split.bands[mid].row_begin});
  return round + 1;
}

} // namespace detail

inline MergePlan make_merge_plan(const DomainSplit& split) {
  MergePlan plan;
  if (!split.bands.empty())
    detail::plan_merges(split, 0, split.bands.size(), plan.rounds);
  return plan;
}

// Level root of p: first ancestor that is a root or whose parent sits at a
// strictly lower level. Compresses the flat path it walked. Works on the
// non-canonical parents produced by merged band builds.
inline pixel_index findrepr(std::vector<pixel_index>& parent,
                            const Image2D& img, pixel_index p) {
  pixel_index r = p;
  while (parent[r] != r && img[parent[r]] == img[r]) r = parent[r];
  while (p != r) {
    const pixel_index next = parent[p];
    parent[p] = r;
    p = next;
  }
  return r;
}

// Joins the trees containing junction neighbors p and q by interleaving
// their root paths in decreasing level order; x is kept the higher of the
// working pair and climbs via findrepr until the branches share an ancestor.
inline void connect(std::vector<pixel_index>& parent, const Image2D& img,
                    pixel_index p, pixel_index q) {
  pixel_index x = findrepr(parent, img, p);
  pixel_index y = findrepr(parent, img, q);
  if (img[x] < img[y]) std::swap(x, y);
  while (x != y) {
    parent[x] = findrepr(parent, img, parent[x]);
    const pixel_index z = parent[x];
    if (x == z) {  // x is the root of its sub-tree
      parent[x] = y;
      y = x;
    } else if (img[z] >= img[y]) {
      x = z;
    } else {
      parent[x] = y;
      x = y;
      y = z;
    }
  }
}

// Connects every neighbor pair straddling the junction above `junction_row`
// and returns how many pairs were visited.
inline std::size_t merge_band_junction(const Image2D& img, Connectivity conn,
                                       std::uint32_t junction_row,
                                       std::vector<pixel_index>& parent) {
  assert(junction_row > 0 && junction_row < img.height);
  const std::uint32_t up_row = junction_row - 1;
  std::size_t count = 0;
  for (std::uint32_t c = 0; c < img.width; ++c) {
    const pixel_index up = img.index_of(up_row, c);
    connect(parent, img, up, img.index_of(junction_row, c));
    ++count;
    if (conn == Connectivity::C8) {
      if (c > 0) {
        connect(parent, img, up, img.index_of(junction_row, c - 1));
        ++count;
      }
      if (c + 1 < img.width) {
        connect(parent, img, up, img.index_of(junction_row, c + 1));
        ++count;
      }
    }
  }
  return count;
}

namespace detail {

// Runs fn(0..tasks-1) on up to max_workers threads pulling from a shared
// atomic counter. The first exception wins and is rethrown after join.
template <class F>
inline void run_tasks(std::size_t tasks, unsigned max_workers, F&& fn) {
  if (tasks == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(max_workers < 1 ? 1 : max_workers, tasks);
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// One band build writing into the shared parent image. Scratch vectors are
// full-size but each band touches only its own pixels' entries.
inline void build_band(const Image2D& img, Connectivity conn,
                       Algorithm base_algo, const RowBand& band,
                       std::vector<pixel_index>& parent, UfScratch& scratch) {
  switch (base_algo) {
    case Algorithm::Uf: {
      const auto sorted = sort_rows(img, band.row_begin, band.row_end);
      uf_build_parent(img, conn, band.row_begin, band.row_end, sorted, parent,
                      scratch);
      break;
    }
    case Algorithm::UfRank: {
      const auto sorted = sort_rows(img, band.row_begin, band.row_end);
      uf_rank_build_parent(img, conn, band.row_begin, band.row_end, sorted,
                           parent, scratch);
      break;
    }
    case Algorithm::UfLevelComp: {
      const auto sorted = sort_rows(img, band.row_begin, band.row_end);
      uf_levelcomp_build_parent(img, conn, band.row_begin, band.row_end,
                                sorted, parent, scratch, nullptr);
      break;
    }
    case Algorithm::Salembier:
      salembier_build(img, conn, band.row_begin, band.row_end, parent,
                      nullptr, nullptr);
      break;
    case Algorithm::Nonrec:
      nonrec_build_parent(img, conn, band.row_begin, band.row_end, parent,
                          nullptr, nullptr);
      break;
  }
}

} // namespace detail

// Map-reduce builder: band-local sub-trees (S and canonization suppressed)
// are merged along junctions per the plan, then the whole parent image is
// canonized and S rebuilt. Deterministic for any worker count because merges
// only run in their plan round.
inline MaxTree maxtree_parallel(const Image2D& img, Connectivity conn,
                                Algorithm base_algo, std::uint32_t num_bands,
                                unsigned max_workers = 1) {
  if (base_algo == Algorithm::Salembier &&
      img.bit_depth >= kBucketQueueBitLimit)
    throw std::invalid_argument(
        "maxtree_parallel: salembier bands support bit depths below " +
        std::to_string(kBucketQueueBitLimit) +
        " only; pick another base algorithm for deeper images");
  const std::size_t n = img.size();
  if (n == 0) return MaxTree{};

  const DomainSplit split = make_domain_split(img.height, num_bands);
  const MergePlan plan = make_merge_plan(split);
  std::vector<pixel_index> parent(n, kUnset);
  UfScratch scratch;
  switch (base_algo) {
    case Algorithm::UfRank:
      scratch.repr.resize(n);
      scratch.rank.resize(n);
      [[fallthrough]];
    case Algorithm::Uf:
    case Algorithm::UfLevelComp:
      scratch.zpar.resize(n);
      break;
    default:
      break;
  }

  detail::run_tasks(split.bands.size(), max_workers, [&](std::size_t b) {
    detail::build_band(img, conn, base_algo, split.bands[b], parent, scratch);
  });
  for (const auto& round : plan.rounds) {
    detail::run_tasks(round.size(), max_workers, [&](std::size_t s) {
      merge_band_junction(img, conn, round[s].junction_row, parent);
    });
  }
  return canonize_rebuild_S(img, parent);
}

} // namespace maxtree

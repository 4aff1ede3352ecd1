#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "image.hpp"
#include "tree.hpp"

namespace maxtree {

// Hierarchical bitmap over gray levels answering "highest marked level at or
// below x" in a few word operations; backs the per-level bookkeeping of the
// flooding builders.
class LevelOccupancy {
 public:
  explicit LevelOccupancy(std::size_t count) {
    std::size_t words = (count + 63) / 64;
    for (;;) {
      layers_.emplace_back(words, 0);
      if (words == 1) break;
      words = (words + 63) / 64;
    }
  }

  void set(std::uint32_t i) {
    for (auto& layer : layers_) {
      layer[i >> 6] |= std::uint64_t{1} << (i & 63);
      i >>= 6;
    }
  }

  void clear(std::uint32_t i) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l][i >> 6] &= ~(std::uint64_t{1} << (i & 63));
      if (layers_[l][i >> 6] != 0) break;  // summaries above stay set
      i >>= 6;
    }
  }

  bool test(std::uint32_t i) const {
    return (layers_[0][i >> 6] >> (i & 63)) & 1;
  }

  // Highest marked index <= i, or -1 when none.
  std::int64_t highest_at_or_below(std::uint32_t i) const {
    std::size_t level = 0;
    std::uint32_t pos = i;
    bool inclusive = true;
    for (;;) {
      const std::uint32_t word = pos >> 6;
      const std::uint32_t bit = pos & 63;
      // After ascending, bits at or above `bit` summarize words already ruled
      // out, so only strictly lower bits qualify.
      const std::uint64_t mask =
          inclusive ? (~std::uint64_t{0} >> (63 - bit))
                    : (bit == 0 ? 0 : (~std::uint64_t{0} >> (64 - bit)));
      const std::uint64_t w = layers_[level][word] & mask;
      if (w != 0) {
        std::uint32_t idx = (word << 6) + (63 - std::countl_zero(w));
        while (level > 0) {
          --level;
          const std::uint64_t w2 = layers_[level][idx];
          idx = (idx << 6) + (63 - std::countl_zero(w2));
        }
        return idx;
      }
      if (level + 1 == layers_.size()) return -1;
      pos = word;
      ++level;
      inclusive = false;
    }
  }

 private:
  std::vector<std::vector<std::uint64_t>> layers_;
};

// Bucketed FIFO priority queue over gray levels. Bucket capacities are
// pre-allocated from the histogram of the covered rows, so pushes and pops
// are single array writes; an occupancy bitmap answers highest-level queries.
// Each pixel may enter at most once (capacity equals the histogram count).
class HierarchicalQueue {
 public:
  HierarchicalQueue(const Image2D& img, std::uint32_t row_begin,
                    std::uint32_t row_end)
      : occupancy_(std::size_t{1} << img.bit_depth) {
    const std::size_t k = std::size_t{1} << img.bit_depth;
    std::vector<std::uint32_t> histogram(k, 0);
    const std::size_t from = static_cast<std::size_t>(row_begin) * img.width;
    const std::size_t to = static_cast<std::size_t>(row_end) * img.width;
    for (std::size_t i = from; i < to; ++i) ++histogram[img.values[i]];
    head_.resize(k);
    tail_.resize(k);
    std::uint32_t offset = 0;
    for (std::size_t l = 0; l < k; ++l) {
      head_[l] = tail_[l] = offset;
      offset += histogram[l];
    }
    slots_.resize(to - from);
  }

  void push(pixel_value level, pixel_index p) {
    slots_[tail_[level]++] = p;
    occupancy_.set(level);
    ++size_;
  }

  bool empty(pixel_value level) const { return head_[level] == tail_[level]; }
  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }

  pixel_index front(pixel_value level) const { return slots_[head_[level]]; }

  pixel_index pop(pixel_value level) {
    const pixel_index p = slots_[head_[level]++];
    --size_;
    if (head_[level] == tail_[level]) occupancy_.clear(level);
    return p;
  }

  // Highest level currently holding pixels; queue must be nonempty.
  pixel_value top_level() const {
    return static_cast<pixel_value>(
        occupancy_.highest_at_or_below(static_cast<std::uint32_t>(
            head_.size() - 1)));
  }

 private:
  std::vector<pixel_index> slots_;
  std::vector<std::uint32_t> head_, tail_;
  LevelOccupancy occupancy_;
  std::size_t size_ = 0;
};

namespace detail {

// Salembier's flood transcribed with an explicit frame stack: native
// recursion depth would be O(levels). A frame is one flood(lambda, r)
// activation; `p`/`nbh` persist the neighbor scan across nested floods so the
// scan resumes exactly where the recursion interrupted it.
struct FloodFrame {
  pixel_value lambda;
  pixel_index r;
  pixel_index p;
  std::uint32_t nbh;
  enum : std::uint8_t { Drain, Scan, Await } state;
};

// Builds parent over rows [row_begin, row_end). When S is given it is filled
// by front-insertion through the cursor *s_front (pre-set one past the band's
// S range); each flood's level root is inserted after its pixels, so roots
// land first in the final order.
inline void salembier_build(const Image2D& img, Connectivity conn,
                            std::uint32_t row_begin, std::uint32_t row_end,
                            std::vector<pixel_index>& parent,
                            std::vector<pixel_index>* S,
                            std::size_t* s_front) {
  const std::size_t from = static_cast<std::size_t>(row_begin) * img.width;
  const std::size_t to = static_cast<std::size_t>(row_end) * img.width;
  if (from == to) return;

  HierarchicalQueue hqueue(img, row_begin, row_end);
  std::vector<pixel_index> levroot(std::size_t{1} << img.bit_depth, kUnset);
  LevelOccupancy active(levroot.size());

  pixel_index p_min = static_cast<pixel_index>(from);
  for (std::size_t i = from; i < to; ++i)
    if (img.values[i] < img.values[p_min]) p_min = static_cast<pixel_index>(i);
  const pixel_value l_min = img[p_min];
  hqueue.push(l_min, p_min);
  levroot[l_min] = p_min;
  active.set(l_min);
  parent[p_min] = kInQueue;

  std::vector<FloodFrame> stack;
  stack.push_back({l_min, p_min, 0, 0, FloodFrame::Drain});
  std::int64_t child_ret = -1;
  while (!stack.empty()) {
    FloodFrame& f = stack.back();
    if (f.state == FloodFrame::Await) {
      if (child_ret > static_cast<std::int64_t>(f.lambda)) {
        const auto l = static_cast<pixel_value>(child_ret);
        stack.push_back({l, levroot[l], 0, 0, FloodFrame::Drain});
        continue;
      }
      f.state = FloodFrame::Scan;
    }
    if (f.state == FloodFrame::Scan) {
      const NeighborBuffer nb =
          neighbors_in_rows(img, f.p, conn, row_begin, row_end);
      bool suspended = false;
      for (std::uint32_t i = f.nbh; i < nb.count; ++i) {
        const pixel_index n = nb[i];
        if (parent[n] != kUnset) continue;
        const pixel_value l = img[n];
        if (levroot[l] == kUnset) {
          levroot[l] = n;
          active.set(l);
        }
        hqueue.push(l, n);
        parent[n] = kInQueue;
        if (l > f.lambda) {
          f.nbh = i + 1;
          f.state = FloodFrame::Await;
          stack.push_back({l, levroot[l], 0, 0, FloodFrame::Drain});
          suspended = true;
          break;
        }
      }
      if (suspended) continue;
      f.state = FloodFrame::Drain;
    }
    if (!hqueue.empty(f.lambda)) {
      const pixel_index p = hqueue.pop(f.lambda);
      parent[p] = f.r;
      if (S && p != f.r) (*S)[--*s_front] = p;
      f.p = p;
      f.nbh = 0;
      f.state = FloodFrame::Scan;
      continue;
    }
    // Level drained: detach it and hang r under the next active level below.
    levroot[f.lambda] = kUnset;
    active.clear(f.lambda);
    const std::int64_t lpar =
        f.lambda == 0 ? -1 : active.highest_at_or_below(f.lambda - 1);
    if (lpar >= 0) parent[f.r] = levroot[lpar];
    if (S) (*S)[--*s_front] = f.r;
    child_ret = lpar;
    stack.pop_back();
  }
}

// Non-recursive flooding: the priority queue supplies the highest pending
// pixel, the level-root stack carries the open nodes (levels strictly
// increasing toward the top), and ProcessStack closes levels when the queue
// level drops.
template <class Queue>
inline void nonrec_build(const Image2D& img, Connectivity conn,
                         std::uint32_t row_begin, std::uint32_t row_end,
                         std::vector<pixel_index>& parent, Queue& pqueue,
                         std::vector<pixel_index>* S, std::size_t* s_front) {
  if (row_begin == row_end) return;
  std::vector<pixel_index> stack;
  const auto p_start =
      static_cast<pixel_index>(static_cast<std::size_t>(row_begin) * img.width);
  pqueue.push(img[p_start], p_start);
  stack.push_back(p_start);
  parent[p_start] = kInQueue;
  for (;;) {
    const pixel_index p = pqueue.top();
    pixel_index r = stack.back();
    const NeighborBuffer nb = neighbors_in_rows(img, p, conn, row_begin, row_end);
    bool restarted = false;
    for (pixel_index n : nb) {
      if (parent[n] != kUnset) continue;
      pqueue.push(img[n], n);
      parent[n] = kInQueue;
      if (img[p] < img[n]) {
        assert(img[stack.back()] < img[n]);
        stack.push_back(n);
        restarted = true;
        break;
      }
    }
    if (restarted) continue;  // re-read the new top of the queue
    pqueue.pop();
    parent[p] = r;
    if (S && p != r) (*S)[--*s_front] = p;
    if (pqueue.empty()) break;
    const pixel_index q = pqueue.top();
    if (img[q] != img[r]) {
      // ProcessStack: close every open level above ima(q), chaining their
      // roots downward, then reopen at ima(q) if needed.
      const pixel_value lambda = img[q];
      stack.pop_back();
      while (!stack.empty() && lambda < img[stack.back()]) {
        if (S) (*S)[--*s_front] = r;
        parent[r] = stack.back();
        r = stack.back();
        stack.pop_back();
      }
      if (stack.empty() || img[stack.back()] != lambda) stack.push_back(q);
      parent[r] = stack.back();
      if (S) (*S)[--*s_front] = r;
    }
  }
  while (!stack.empty()) {
    if (S) (*S)[--*s_front] = stack.back();
    stack.pop_back();
  }
}

// Max-priority view over the bucketed hierarchical queue.
class BucketMaxQueue {
 public:
  BucketMaxQueue(const Image2D& img, std::uint32_t row_begin,
                 std::uint32_t row_end)
      : q_(img, row_begin, row_end) {}
  void push(pixel_value level, pixel_index p) { q_.push(level, p); }
  bool empty() const { return q_.empty(); }
  pixel_index top() const { return q_.front(q_.top_level()); }
  void pop() { q_.pop(q_.top_level()); }

 private:
  HierarchicalQueue q_;
};

// Comparison-heap backend for depths where 2^bits buckets are unreasonable.
// A push sequence number keeps ties within a level in FIFO order like the
// bucketed backend; the builder relies on that, since it peeks the top, then
// pushes same-level neighbors, then pops what it peeked.
class HeapMaxQueue {
 public:
  HeapMaxQueue(const Image2D&, std::uint32_t, std::uint32_t) {}
  void push(pixel_value level, pixel_index p) {
    const std::uint64_t key =
        (std::uint64_t{level} << 32) | (0xFFFFFFFFu - seq_++);
    heap_.emplace(key, p);
  }
  bool empty() const { return heap_.empty(); }
  pixel_index top() const { return heap_.top().second; }
  void pop() { heap_.pop(); }

 private:
  std::priority_queue<std::pair<std::uint64_t, pixel_index>> heap_;
  std::uint32_t seq_ = 0;
};

inline void nonrec_build_parent(const Image2D& img, Connectivity conn,
                                std::uint32_t row_begin, std::uint32_t row_end,
                                std::vector<pixel_index>& parent,
                                std::vector<pixel_index>* S,
                                std::size_t* s_front) {
  if (img.bit_depth < kBucketQueueBitLimit) {
    BucketMaxQueue q(img, row_begin, row_end);
    nonrec_build(img, conn, row_begin, row_end, parent, q, S, s_front);
  } else {
    HeapMaxQueue q(img, row_begin, row_end);
    nonrec_build(img, conn, row_begin, row_end, parent, q, S, s_front);
  }
}

} // namespace detail

// Recursive hierarchical-queue flooding. Produces a canonical tree directly
// (each pixel's parent is its level root), so no canonization pass follows.
inline MaxTree maxtree_salembier(const Image2D& img,
                                 Connectivity conn = Connectivity::C4) {
  if (img.bit_depth >= kBucketQueueBitLimit)
    throw std::invalid_argument(
        "maxtree_salembier allocates 2^bit_depth queue buckets and supports "
        "bit depths below " +
        std::to_string(kBucketQueueBitLimit) +
        " only; use maxtree_nonrec for deeper images");
  const std::size_t n = img.size();
  MaxTree t{std::vector<pixel_index>(n, kUnset),
            std::vector<pixel_index>(n)};
  if (n == 0) return t;
  std::size_t s_front = n;
  detail::salembier_build(img, conn, 0, img.height, t.parent, &t.S, &s_front);
  assert(s_front == 0);
  return t;
}

// Non-recursive flooding; works at any bit depth via the queue backend
// switch. Also yields a canonical tree directly.
inline MaxTree maxtree_nonrec(const Image2D& img,
                              Connectivity conn = Connectivity::C4) {
  const std::size_t n = img.size();
  MaxTree t{std::vector<pixel_index>(n, kUnset),
            std::vector<pixel_index>(n)};
  if (n == 0) return t;
  std::size_t s_front = n;
  detail::nonrec_build_parent(img, conn, 0, img.height, t.parent, &t.S,
                              &s_front);
  assert(s_front == 0);
  return t;
}

} // namespace maxtree

#pragma once

#include <cstdint>
#include <limits>

namespace maxtree {

using pixel_index = std::uint32_t;
using pixel_value = std::uint32_t;

// Reserved out-of-range indices. Flat images are limited to 2^32 - 2 pixels so
// both sentinels stay representable in a pixel_index.
inline constexpr pixel_index kUnset = std::numeric_limits<pixel_index>::max();
inline constexpr pixel_index kInQueue = std::numeric_limits<pixel_index>::max() - 1;

// Bucketed structures (counting sort, hierarchical queues, level-root arrays)
// allocate 2^bits cells, which stops paying off near this bit depth; above it
// radix sort and a comparison heap take over, and level compression is no
// longer worth its extra tests. Tunable so the crossover can be benchmarked.
inline constexpr std::uint32_t kBucketQueueBitLimit = 18;

inline constexpr std::uint32_t kMaxBitDepth = 32;

// Sequential builder identifiers; the parallel builder composes any of them
// per band. String forms live with the dispatch layer in algorithms.hpp.
enum class Algorithm { Uf, UfRank, UfLevelComp, Salembier, Nonrec };

} // namespace maxtree

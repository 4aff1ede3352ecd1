#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

#include "algorithms.hpp"
#include "io.hpp"
#include "transforms.hpp"

namespace maxtree {

// Peak resident set size of the process, or 0 when the platform offers none.
inline std::uint64_t peak_rss_bytes() {
#if defined(__unix__)
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) == 0)
    return static_cast<std::uint64_t>(usage.ru_maxrss) * 1024;  // KiB here
#elif defined(__APPLE__)
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) == 0)
    return static_cast<std::uint64_t>(usage.ru_maxrss);  // bytes there
#endif
  return 0;
}

// Smooth multi-frequency field plus seeded noise, quantized to the requested
// depth: stands in for a photograph when benchmarks run without one.
inline Image2D make_synthetic_image(std::uint32_t width, std::uint32_t height,
                                    std::uint32_t bit_depth,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  const double ph1 = phase(rng), ph2 = phase(rng), ph3 = phase(rng);
  const double maxval =
      static_cast<double>((std::uint64_t{1} << bit_depth) - 1);
  Image2D img{width, height, bit_depth,
              std::vector<pixel_value>(std::size_t{width} * height)};
  constexpr double tau = 6.283185307179586;
  for (std::uint32_t r = 0; r < height; ++r) {
    for (std::uint32_t c = 0; c < width; ++c) {
      double x = 0.5 + 0.22 * std::sin(tau * 3.0 * c / width + ph1) +
                 0.22 * std::sin(tau * 5.0 * r / height + ph2) +
                 0.08 * std::sin(tau * 13.0 * (r + c) / (width + height) + ph3) +
                 noise(rng);
      x = std::clamp(x, 0.0, 1.0);
      img.values[std::size_t{r} * width + c] =
          static_cast<pixel_value>(std::llround(x * maxval));
    }
  }
  return img;
}

struct BenchConfig {
  std::vector<std::string> algorithms;  // sequential ids and/or "parallel"
  std::string image_path;               // empty: synthetic base image
  std::vector<double> megapixels;
  std::vector<std::uint32_t> bit_depths;
  std::vector<std::uint32_t> bands;    // parallel cells only
  std::vector<unsigned> workers;       // parallel cells only
  std::uint32_t reps = 3;
  std::uint64_t seed = 1;
  bool phase_timing = true;
  Connectivity conn = Connectivity::C4;
  Algorithm parallel_base = Algorithm::Uf;
};

struct BenchRecord {
  std::string algo;
  std::uint64_t n = 0;
  std::uint32_t bits = 0;
  std::uint32_t bands = 1;
  unsigned workers = 1;
  std::string phase;
  double ms = 0;
  std::uint64_t mem_bytes = 0;  // 0 renders as an empty field
};

inline constexpr const char* kBenchCsvHeader =
    "algo,n,bits,bands,workers,phase,ms,mem_bytes";

inline std::string to_csv(const BenchRecord& rec) {
  char ms_text[32];
  std::snprintf(ms_text, sizeof ms_text, "%.3f", rec.ms);
  std::string out = rec.algo;
  out += ',';
  out += std::to_string(rec.n);
  out += ',';
  out += std::to_string(rec.bits);
  out += ',';
  out += std::to_string(rec.bands);
  out += ',';
  out += std::to_string(rec.workers);
  out += ',';
  out += rec.phase;
  out += ',';
  out += ms_text;
  out += ',';
  if (rec.mem_bytes != 0) out += std::to_string(rec.mem_bytes);
  return out;
}

namespace detail {

// One instrumented pipeline run: named phase segments plus the end-to-end
// wall time of the same run, so the segments always sum to at most total.
struct PhaseSample {
  std::vector<std::pair<std::string, double>> phases;
  double total_ms = 0;
};

class PhaseTimer {
 public:
  using clock = std::chrono::steady_clock;
  PhaseTimer() : begin_(clock::now()), mark_(begin_) {}
  void lap(PhaseSample& sample, const char* name) {
    const auto now = clock::now();
    sample.phases.emplace_back(name, ms_between(mark_, now));
    mark_ = now;
  }
  // Drops the segment since the last mark (setup work outside named phases).
  void skip() { mark_ = clock::now(); }
  void finish(PhaseSample& sample) {
    sample.total_ms = ms_between(begin_, clock::now());
  }

 private:
  static double ms_between(clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  }
  clock::time_point begin_, mark_;
};

// Forbids the optimizer from discarding a benchmark result.
template <class T>
inline void keep_alive(const T& value) {
  asm volatile("" : : "g"(&value) : "memory");
}

inline PhaseSample run_phased(const Image2D& img, Connectivity conn,
                              const BuildSpec& spec) {
  PhaseSample sample;
  PhaseTimer timer;
  const std::size_t n = img.size();
  if (spec.parallel) {
    const DomainSplit split = make_domain_split(img.height, spec.bands);
    const MergePlan plan = make_merge_plan(split);
    std::vector<pixel_index> parent(n, kUnset);
    UfScratch scratch;
    if (spec.base == Algorithm::Uf || spec.base == Algorithm::UfRank ||
        spec.base == Algorithm::UfLevelComp)
      scratch.zpar.resize(n);
    if (spec.base == Algorithm::UfRank) {
      scratch.repr.resize(n);
      scratch.rank.resize(n);
    }
    timer.skip();  // allocation stays out of the named phases
    run_tasks(split.bands.size(), spec.workers, [&](std::size_t b) {
      build_band(img, conn, spec.base, split.bands[b], parent, scratch);
    });
    timer.lap(sample, "build");
    for (const auto& round : plan.rounds)
      run_tasks(round.size(), spec.workers, [&](std::size_t s) {
        merge_band_junction(img, conn, round[s].junction_row, parent);
      });
    timer.lap(sample, "merge");
    MaxTree t = canonize_rebuild_S(img, parent);
    timer.lap(sample, "canonize+S");
    keep_alive(t);
    timer.finish(sample);
    return sample;
  }
  switch (spec.base) {
    case Algorithm::Uf:
    case Algorithm::UfRank:
    case Algorithm::UfLevelComp: {
      MaxTree t{std::vector<pixel_index>(n, kUnset), {}};
      UfScratch scratch{std::vector<pixel_index>(n), {}, {}};
      if (spec.base == Algorithm::UfRank) {
        scratch.repr.resize(n);
        scratch.rank.resize(n);
      }
      timer.skip();
      t.S = sort_pixels(img);
      timer.lap(sample, "sort");
      const bool level_comp = spec.base == Algorithm::UfLevelComp &&
                              img.bit_depth < kBucketQueueBitLimit;
      if (spec.base == Algorithm::Uf ||
          (spec.base == Algorithm::UfLevelComp && !level_comp)) {
        uf_build_parent(img, conn, 0, img.height, t.S, t.parent, scratch);
      } else if (spec.base == Algorithm::UfRank) {
        uf_rank_build_parent(img, conn, 0, img.height, t.S, t.parent, scratch);
      } else {
        const std::vector<pixel_index> sorted = t.S;
        uf_levelcomp_build_parent(img, conn, 0, img.height, sorted, t.parent,
                                  scratch, &t.S);
        t.S[0] = t.parent[t.S[0]];
      }
      timer.lap(sample, "build");
      canonize(t, img);
      timer.lap(sample, "canonize+S");
      keep_alive(t);
      break;
    }
    case Algorithm::Salembier: {
      const MaxTree t = maxtree_salembier(img, conn);
      timer.lap(sample, "build");
      keep_alive(t);
      break;
    }
    case Algorithm::Nonrec: {
      const MaxTree t = maxtree_nonrec(img, conn);
      timer.lap(sample, "build");
      keep_alive(t);
      break;
    }
  }
  timer.finish(sample);
  return sample;
}

} // namespace detail

// Runs one cell: `reps` instrumented runs, then reports the run with the
// median total so phase rows and the total row describe the same execution.
inline std::vector<BenchRecord> bench_cell(const Image2D& img,
                                           Connectivity conn,
                                           const BuildSpec& spec,
                                           const std::string& algo_label,
                                           std::uint32_t reps,
                                           bool phase_timing) {
  std::vector<detail::PhaseSample> samples;
  samples.reserve(reps);
  for (std::uint32_t i = 0; i < reps; ++i)
    samples.push_back(detail::run_phased(img, conn, spec));
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].total_ms < samples[b].total_ms;
  });
  const detail::PhaseSample& median = samples[order[order.size() / 2]];

  std::vector<BenchRecord> records;
  BenchRecord base{algo_label,   img.size(),   img.bit_depth,
                   spec.bands,   spec.workers, "",
                   0.0,          0};
  if (phase_timing) {
    for (const auto& [name, ms] : median.phases) {
      BenchRecord rec = base;
      rec.phase = name;
      rec.ms = ms;
      records.push_back(std::move(rec));
    }
  }
  BenchRecord total = base;
  total.phase = "total";
  total.ms = median.total_ms;
  total.mem_bytes = peak_rss_bytes();
  records.push_back(std::move(total));
  return records;
}

// Tiles the base image to roughly `megapixels` and requantizes to `bits`.
// Returns nothing (with a reason) when the target is unreachable.
inline std::optional<Image2D> prepare_bench_image(const Image2D& base,
                                                 double megapixels,
                                                 std::uint32_t bits,
                                                 std::uint64_t seed,
                                                 std::string* why_skipped) {
  const auto target_n = static_cast<std::uint64_t>(
      std::llround(megapixels * 1e6));
  if (base.size() == 0 || target_n == 0) {
    if (why_skipped) *why_skipped = "empty base image or zero-pixel target";
    return std::nullopt;
  }
  const double factor =
      std::sqrt(static_cast<double>(target_n) / static_cast<double>(base.size()));
  const auto w = static_cast<std::uint64_t>(std::max<long long>(
      1, std::llround(base.width * factor)));
  const auto h = static_cast<std::uint64_t>(std::max<long long>(
      1, std::llround(static_cast<double>(target_n) / static_cast<double>(w))));
  if (w * h >= kUnset - 1 || w > 0xFFFFFFFFull || h > 0xFFFFFFFFull) {
    if (why_skipped)
      *why_skipped = "target size exceeds the addressable pixel range";
    return std::nullopt;
  }
  Image2D img = resize_by_tiling(base, static_cast<std::uint32_t>(w),
                                 static_cast<std::uint32_t>(h));
  if (bits != img.bit_depth) img = requantize(img, bits, seed);
  return img;
}

// Full sweep: megapixels x bit depth x algorithm (x bands x workers for the
// parallel id). CSV rows to `out`; skip notices to `warn`.
inline void run_bench(const BenchConfig& config, std::ostream& out,
                      std::ostream& warn) {
  if (config.reps < 3)
    throw std::invalid_argument("bench: repetitions must be at least 3");
  if (config.algorithms.empty() || config.megapixels.empty() ||
      config.bit_depths.empty() || config.bands.empty() ||
      config.workers.empty())
    throw std::invalid_argument("bench: every sweep list must be nonempty");
  for (const std::string& id : config.algorithms)
    if (id != "parallel" && !algorithm_from_string(id))
      throw std::invalid_argument("bench: unknown algorithm id '" + id +
                                  "'; known ids: " + algorithm_id_list());

  const Image2D base = config.image_path.empty()
                           ? make_synthetic_image(1024, 1024, 8, config.seed)
                           : load_image_any(config.image_path);

  out << kBenchCsvHeader << '\n';
  for (const double mp : config.megapixels) {
    for (const std::uint32_t bits : config.bit_depths) {
      std::string why;
      const std::optional<Image2D> img =
          prepare_bench_image(base, mp, bits, config.seed, &why);
      if (!img) {
        warn << "bench: skipping " << mp << " MP at " << bits << " bits: "
             << why << '\n';
        continue;
      }
      for (const std::string& id : config.algorithms) {
        if (id == "parallel") {
          for (const std::uint32_t bands : config.bands) {
            for (const unsigned workers : config.workers) {
              BuildSpec spec{true, config.parallel_base, bands, workers};
              if (spec.base == Algorithm::Salembier &&
                  bits >= kBucketQueueBitLimit) {
                warn << "bench: skipping parallel/salembier at " << bits
                     << " bits (bucket queues top out below "
                     << kBucketQueueBitLimit << " bits)\n";
                continue;
              }
              const std::string label =
                  std::string("parallel_") + to_string(spec.base);
              for (const BenchRecord& rec :
                   bench_cell(*img, config.conn, spec, label, config.reps,
                              config.phase_timing))
                out << to_csv(rec) << '\n';
            }
          }
          continue;
        }
        const Algorithm algo = *algorithm_from_string(id);
        if (algo == Algorithm::Salembier && bits >= kBucketQueueBitLimit) {
          warn << "bench: skipping salembier at " << bits
               << " bits (bucket queues top out below " << kBucketQueueBitLimit
               << " bits)\n";
          continue;
        }
        const BuildSpec spec{false, algo, 1, 1};
        for (const BenchRecord& rec : bench_cell(
                 *img, config.conn, spec, id, config.reps, config.phase_timing))
          out << to_csv(rec) << '\n';
      }
    }
  }
}

} // namespace maxtree

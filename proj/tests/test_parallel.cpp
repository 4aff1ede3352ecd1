#include <catch2/catch_amalgamated.hpp>

#include <atomic>

#include <maxtree/maxtree.hpp>

#include "test_helpers.hpp"

using maxtree::Algorithm;
using maxtree::Connectivity;
using maxtree::Image2D;
using maxtree::MaxTree;
using maxtree::pixel_index;

namespace {

std::vector<std::vector<std::uint32_t>> junction_rows(
    const maxtree::MergePlan& plan) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const auto& round : plan.rounds) {
    out.emplace_back();
    for (const maxtree::MergeStep& step : round)
      out.back().push_back(step.junction_row);
  }
  return out;
}

} // namespace

TEST_CASE("domain split divides rows near-equally") {
  const maxtree::DomainSplit split = maxtree::make_domain_split(10, 3);
  REQUIRE(split.bands.size() == 3);
  CHECK(split.bands[0].row_begin == 0);
  CHECK(split.bands[0].row_end == 4);
  CHECK(split.bands[1].row_begin == 4);
  CHECK(split.bands[1].row_end == 7);
  CHECK(split.bands[2].row_begin == 7);
  CHECK(split.bands[2].row_end == 10);
}

TEST_CASE("domain split clamps edge requests") {
  CHECK(maxtree::make_domain_split(3, 7).bands.size() == 3);
  CHECK(maxtree::make_domain_split(5, 1).bands.size() == 1);
  CHECK(maxtree::make_domain_split(5, 0).bands.size() == 1);
  CHECK(maxtree::make_domain_split(0, 4).bands.empty());
}

TEST_CASE("domain split always covers the rows exactly") {
  for (std::uint32_t height = 1; height <= 40; ++height) {
    for (std::uint32_t req = 1; req <= 10; ++req) {
      const maxtree::DomainSplit split = maxtree::make_domain_split(height, req);
      REQUIRE(!split.bands.empty());
      CHECK(split.bands.size() == std::min(req, height));
      std::uint32_t row = 0;
      std::uint32_t min_len = height;
      std::uint32_t max_len = 0;
      for (const maxtree::RowBand& band : split.bands) {
        CHECK(band.row_begin == row);
        REQUIRE(band.row_end > band.row_begin);
        const std::uint32_t len = band.row_end - band.row_begin;
        min_len = std::min(min_len, len);
        max_len = std::max(max_len, len);
        row = band.row_end;
      }
      CHECK(row == height);
      CHECK(max_len - min_len <= 1);
    }
  }
}

TEST_CASE("merge plan is a balanced reduction") {
  SECTION("one band needs no merges") {
    const auto split = maxtree::make_domain_split(6, 1);
    CHECK(maxtree::make_merge_plan(split).rounds.empty());
  }
  SECTION("two bands merge in one step") {
    const auto split = maxtree::make_domain_split(6, 2);
    CHECK(junction_rows(maxtree::make_merge_plan(split)) ==
          std::vector<std::vector<std::uint32_t>>{{3}});
  }
  SECTION("four bands: two parallel merges, then the top join") {
    const auto split = maxtree::make_domain_split(8, 4);
    CHECK(junction_rows(maxtree::make_merge_plan(split)) ==
          std::vector<std::vector<std::uint32_t>>{{2, 6}, {4}});
  }
  SECTION("seven bands: six merges over three rounds") {
    const auto split = maxtree::make_domain_split(7, 7);
    CHECK(junction_rows(maxtree::make_merge_plan(split)) ==
          std::vector<std::vector<std::uint32_t>>{{2, 4, 6}, {1, 5}, {3}});
  }
  SECTION("every interior band boundary is merged exactly once") {
    for (std::uint32_t bands = 2; bands <= 12; ++bands) {
      const auto split = maxtree::make_domain_split(37, bands);
      std::vector<std::uint32_t> seen;
      for (const auto& round : junction_rows(maxtree::make_merge_plan(split)))
        seen.insert(seen.end(), round.begin(), round.end());
      std::vector<std::uint32_t> expect;
      for (std::size_t b = 1; b < split.bands.size(); ++b)
        expect.push_back(split.bands[b].row_begin);
      std::sort(seen.begin(), seen.end());
      CHECK(seen == expect);
    }
  }
}

TEST_CASE("findrepr walks flat runs and compresses the path") {
  const Image2D flat{3, 1, 8, {5, 5, 5}};
  std::vector<pixel_index> parent{0, 0, 1};
  CHECK(maxtree::findrepr(parent, flat, 2) == 0);
  CHECK(parent == std::vector<pixel_index>{0, 0, 0});

  const Image2D step{3, 1, 8, {1, 2, 2}};
  std::vector<pixel_index> parent2{0, 0, 1};
  CHECK(maxtree::findrepr(parent2, step, 2) == 1); // stops at the level change
  CHECK(maxtree::findrepr(parent2, step, 1) == 1);
  CHECK(maxtree::findrepr(parent2, step, 0) == 0);
}

TEST_CASE("merging two band trees reproduces the sequential tree") {
  // Band sub-trees of the 2x2 staircase, exactly as the band builder leaves
  // them: row 0 rooted at pixel 0, row 1 rooted at pixel 3.
  const Image2D img{2, 2, 8, {1, 2, 4, 3}};
  std::vector<pixel_index> parent{0, 0, 3, 3};

  const std::size_t pairs =
      maxtree::merge_band_junction(img, Connectivity::C4, 1, parent);
  CHECK(pairs == 2);
  CHECK(parent == std::vector<pixel_index>{0, 0, 3, 1});

  const MaxTree t = maxtree::canonize_rebuild_S(img, parent);
  CHECK(t.parent == std::vector<pixel_index>{0, 0, 3, 1});
  CHECK(t.S == std::vector<pixel_index>{0, 1, 3, 2});
  CHECK(maxtree::validate(t, img).ok());
}

TEST_CASE("junction visits one pair per column under C4 and three under C8") {
  const Image2D img{5, 2, 8, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1}};
  std::vector<pixel_index> parent{0, 0, 1, 2, 3, 5, 5, 6, 7, 8};
  CHECK(maxtree::merge_band_junction(img, Connectivity::C4, 1, parent) == 5);
  parent = {0, 0, 1, 2, 3, 5, 5, 6, 7, 8};
  CHECK(maxtree::merge_band_junction(img, Connectivity::C8, 1, parent) == 13);
}

TEST_CASE("single-band parallel build equals the sequential builder") {
  for (const Image2D* img : testutil::small_corpus(256)) {
    const MaxTree seq = maxtree::maxtree_uf(*img, Connectivity::C4);
    const MaxTree par =
        maxtree::maxtree_parallel(*img, Connectivity::C4, Algorithm::Uf, 1);
    CHECK(maxtree::validate(par, *img).ok());
    CHECK(maxtree::normalize(par, *img) == maxtree::normalize(seq, *img));
  }
}

TEST_CASE("parallel build matches the brute force for every base algorithm") {
  constexpr Algorithm bases[] = {Algorithm::Uf, Algorithm::UfRank,
                                 Algorithm::UfLevelComp, Algorithm::Salembier,
                                 Algorithm::Nonrec};
  for (const Image2D* img : testutil::small_corpus(144)) {
    for (auto conn : {Connectivity::C4, Connectivity::C8}) {
      const maxtree::NormalizedTree expect = maxtree::brute_maxtree(*img, conn);
      for (Algorithm base : bases) {
        if (base == Algorithm::Salembier &&
            img->bit_depth >= maxtree::kBucketQueueBitLimit)
          continue;
        for (std::uint32_t bands : {2u, 3u, 7u}) {
          INFO("base=" << static_cast<int>(base) << " bands=" << bands
                       << " size=" << img->width << "x" << img->height
                       << " bits=" << img->bit_depth);
          const MaxTree t =
              maxtree::maxtree_parallel(*img, conn, base, bands);
          REQUIRE(maxtree::validate(t, *img).ok());
          CHECK(maxtree::normalize(t, *img) == expect);
        }
      }
    }
  }
}

TEST_CASE("parallel build output does not depend on the worker count") {
  std::mt19937_64 rng(4242);
  std::vector<maxtree::pixel_value> values(32 * 32);
  for (auto& v : values) v = static_cast<maxtree::pixel_value>(rng() % 256);
  const Image2D img{32, 32, 8, values};

  const MaxTree base =
      maxtree::maxtree_parallel(img, Connectivity::C4, Algorithm::Uf, 4, 1);
  for (unsigned workers : {2u, 4u, 8u}) {
    const MaxTree t = maxtree::maxtree_parallel(img, Connectivity::C4,
                                                Algorithm::Uf, 4, workers);
    CHECK(t.parent == base.parent);
    CHECK(t.S == base.S);
  }
}

TEST_CASE("parallel refuses salembier bands on deep images") {
  const Image2D img{2, 2, 20, {0, 5, 1000000, 3}};
  CHECK_THROWS_AS(
      maxtree::maxtree_parallel(img, Connectivity::C4, Algorithm::Salembier, 2),
      std::invalid_argument);
  CHECK_NOTHROW(
      maxtree::maxtree_parallel(img, Connectivity::C4, Algorithm::Nonrec, 2));
}

TEST_CASE("parallel build of an empty image is empty") {
  const Image2D img{0, 0, 8, {}};
  const MaxTree t =
      maxtree::maxtree_parallel(img, Connectivity::C4, Algorithm::Uf, 4);
  CHECK(t.parent.empty());
  CHECK(t.S.empty());
}

TEST_CASE("task pool runs every task once and propagates failures") {
  std::vector<std::atomic<int>> hits(100);
  maxtree::detail::run_tasks(hits.size(), 4,
                             [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);

  CHECK_THROWS_WITH(maxtree::detail::run_tasks(
                        8, 4,
                        [](std::size_t i) {
                          if (i == 3) throw std::runtime_error("task 3 burst");
                        }),
                    Catch::Matchers::ContainsSubstring("task 3 burst"));
}

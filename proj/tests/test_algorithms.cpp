#include <catch2/catch_amalgamated.hpp>

#include <maxtree/maxtree.hpp>

#include "test_helpers.hpp"

using maxtree::Algorithm;
using maxtree::Connectivity;
using maxtree::Image2D;
using maxtree::MaxTree;

TEST_CASE("algorithm ids round-trip through strings") {
  for (const Algorithm a : maxtree::kAllAlgorithms) {
    const auto back = maxtree::algorithm_from_string(maxtree::to_string(a));
    REQUIRE(back.has_value());
    CHECK(*back == a);
  }
  CHECK(maxtree::algorithm_from_string("uf_rank") == Algorithm::UfRank);
  CHECK_FALSE(maxtree::algorithm_from_string("unionfind").has_value());
  CHECK_FALSE(maxtree::algorithm_from_string("").has_value());
}

TEST_CASE("the id list names every builder") {
  CHECK(maxtree::algorithm_id_list() ==
        "uf, uf_rank, uf_levelcomp, salembier, nonrec, parallel");
  CHECK(maxtree::algorithm_id_list(false) ==
        "uf, uf_rank, uf_levelcomp, salembier, nonrec");
}

TEST_CASE("build_maxtree dispatches to the right builder") {
  const Image2D img{3, 1, 8, {1, 3, 2}};
  for (const Algorithm a : maxtree::kAllAlgorithms) {
    const MaxTree t = maxtree::build_maxtree(img, Connectivity::C4, a);
    CHECK(t.parent == std::vector<maxtree::pixel_index>{0, 2, 0});
  }

  const maxtree::BuildSpec spec{true, Algorithm::UfRank, 2, 2};
  const MaxTree t = maxtree::build_maxtree(img, Connectivity::C4, spec);
  CHECK(maxtree::validate(t, img).ok());
  CHECK(maxtree::normalize(t, img) ==
        maxtree::normalize(maxtree::maxtree_uf(img), img));
}

TEST_CASE("recommendations cover the depth/parallel/memory matrix") {
  SECTION("sequential, low depth: flooding") {
    const maxtree::Recommendation r = maxtree::recommend(8, false, false);
    CHECK(r.algorithm == "salembier");
    CHECK_FALSE(r.spec.parallel);
    CHECK(r.spec.base == Algorithm::Salembier);
    CHECK(r.warning.empty());
    CHECK_FALSE(r.rationale.empty());
  }
  SECTION("sequential, deep: union-find by rank") {
    const maxtree::Recommendation r = maxtree::recommend(32, false, false);
    CHECK(r.algorithm == "uf_rank");
    CHECK(r.spec.base == Algorithm::UfRank);
    CHECK(r.warning.empty());
  }
  SECTION("sequential, deep, memory constrained: plain union-find") {
    const maxtree::Recommendation r = maxtree::recommend(32, false, true);
    CHECK(r.algorithm == "uf");
    CHECK(r.spec.base == Algorithm::Uf);
  }
  SECTION("parallel, low depth: banded level-compression build") {
    const maxtree::Recommendation r = maxtree::recommend(8, true, false);
    CHECK(r.algorithm == "parallel uf_levelcomp");
    CHECK(r.spec.parallel);
    CHECK(r.spec.base == Algorithm::UfLevelComp);
    CHECK(r.spec.bands >= 2);
    CHECK(r.spec.workers >= 2);
    CHECK(r.warning.empty());
  }
  SECTION("parallel, deep: falls back to sequential with a warning") {
    const maxtree::Recommendation r = maxtree::recommend(20, true, false);
    CHECK(r.algorithm == "uf_rank");
    CHECK_FALSE(r.spec.parallel);
    CHECK_FALSE(r.warning.empty());
    CHECK(r.warning.find("20 bits") != std::string::npos);
  }
  SECTION("the boundary depth behaves as deep") {
    CHECK(maxtree::recommend(maxtree::kBucketQueueBitLimit, false, false)
              .algorithm == "uf_rank");
    CHECK(maxtree::recommend(maxtree::kBucketQueueBitLimit - 1, false, false)
              .algorithm == "salembier");
  }
}

TEST_CASE("recommendation specs actually build valid trees") {
  const Image2D img8{4, 4, 8, {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3}};
  const Image2D img20{2, 2, 20, {0, 1000000, 17, 65536}};
  for (const bool parallel : {false, true}) {
    for (const bool memory : {false, true}) {
      for (const Image2D* img : {&img8, &img20}) {
        const maxtree::Recommendation r =
            maxtree::recommend(img->bit_depth, parallel, memory);
        const MaxTree t = maxtree::build_maxtree(*img, Connectivity::C4, r.spec);
        CHECK(maxtree::validate(t, *img).ok());
        CHECK(maxtree::normalize(t, *img) ==
              maxtree::brute_maxtree(*img, Connectivity::C4));
      }
    }
  }
}

TEST_CASE("recommend rejects impossible depths") {
  CHECK_THROWS_AS(maxtree::recommend(0, false, false), std::invalid_argument);
  CHECK_THROWS_AS(maxtree::recommend(33, false, false), std::invalid_argument);
}

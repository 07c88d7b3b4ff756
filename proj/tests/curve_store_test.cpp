#include "lcarena/curve_store.hpp"

#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "lcarena/error.hpp"
#include "lcarena/synth.hpp"
#include "test_support.hpp"

namespace lcarena {
namespace {

using testing::curve;

TEST(QueryCurve, LeftHoldBetweenAnchors) {
  const auto c = curve({{2, 0.4}, {5, 0.6}});
  EXPECT_EQ(query_curve(c, 3), 0.4);
  EXPECT_EQ(query_curve(c, 5), 0.6);
  EXPECT_EQ(query_curve(c, 1), 0.0);
  EXPECT_EQ(query_curve(c, 1, 0.25), 0.25);
  EXPECT_EQ(query_curve(c, 1e9), 0.6);
}

TEST(QueryCurve, PiecewiseConstantOnRandomCurves) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Anchor> anchors;
    double cost = u(rng);
    for (int k = 0; k < 8; ++k) {
      anchors.push_back({cost, u(rng)});
      cost += 0.01 + u(rng);
    }
    const LearningCurve c(anchors);
    for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
      const double lo = anchors[k].cost, hi = anchors[k + 1].cost;
      for (int s = 0; s < 5; ++s) {
        const double q = lo + (hi - lo) * u(rng);
        if (q >= hi) continue;
        ASSERT_EQ(query_curve(c, q), anchors[k].score);
      }
    }
  }
}

TEST(QueryCurve, MonotoneForMonotoneCurves) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Anchor> anchors;
    double cost = 0.0, score = 0.0;
    for (int k = 0; k < 10; ++k) {
      cost += 0.1 + u(rng);
      score = std::min(1.0, score + 0.1 * u(rng));
      anchors.push_back({cost, score});
    }
    const LearningCurve c(anchors);
    double prev = query_curve(c, 0.0);
    for (double q = 0.0; q < cost + 1.0; q += 0.05) {
      const double v = query_curve(c, q);
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(LearningCurve, RejectsInvalidAnchors) {
  EXPECT_THROW(LearningCurve({}), Error);
  EXPECT_THROW(curve({{1, 0.1}, {1, 0.2}}), Error);
  EXPECT_THROW(curve({{2, 0.1}, {1, 0.2}}), Error);
  EXPECT_THROW(curve({{-1, 0.1}}), Error);
}

TEST(FinalRank, DescendingWithIdTieBreak) {
  auto md = testing::uniform_md({{curve({{1, 0.1}, {2, 0.3}}), curve({{1, 0.2}, {2, 0.9}}), curve({{1, 0.5}})}}, 10);
  EXPECT_EQ(final_rank(md, 0), (std::vector<int>{3, 1, 2}));

  auto ties = testing::uniform_md({{curve({{1, 0.5}}), curve({{1, 0.5}}), curve({{1, 0.5}})}}, 10);
  EXPECT_EQ(final_rank(ties, 0), (std::vector<int>{1, 2, 3}));

  auto single = testing::uniform_md({{curve({{1, 0.5}})}}, 10);
  EXPECT_EQ(final_rank(single, 0), (std::vector<int>{1}));
}

TEST(MetaDataset, ValidatesSplitAndScores) {
  EXPECT_THROW(testing::uniform_md({{curve({{1, 0.5}})}, {curve({{1, 0.5}})}}, 10, {}, DataSplit{{0}, {0, 1}}), Error);
  EXPECT_THROW(testing::uniform_md({{curve({{1, 1.5}})}}, 10), Error);
}

TEST(Manifest, RoundTripIsExact) {
  GenSpec spec;
  spec.n_datasets = 2;
  spec.n_algorithms = 2;
  spec.seed = 3;
  const MetaDataset md = generate(spec);
  const auto dir = testing::temp_dir("roundtrip");
  save_metadataset(md, dir / "manifest.json");
  const MetaDataset loaded = load_metadataset(dir / "manifest.json");
  EXPECT_TRUE(loaded == md);
  // Bit-exact anchors.
  for (int d = 0; d < 2; ++d)
    for (int a = 0; a < 2; ++a)
      for (Split s : {Split::train, Split::valid, Split::test}) {
        const auto x = md.curve(d, a, s).anchors();
        const auto y = loaded.curve(d, a, s).anchors();
        ASSERT_EQ(x.size(), y.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
          ASSERT_EQ(std::bit_cast<std::uint64_t>(x[k].cost), std::bit_cast<std::uint64_t>(y[k].cost));
          ASSERT_EQ(std::bit_cast<std::uint64_t>(x[k].score), std::bit_cast<std::uint64_t>(y[k].score));
        }
      }
}

TEST(Manifest, SizeIndexedRoundTrip) {
  GenSpec spec;
  spec.n_datasets = 2;
  spec.n_algorithms = 3;
  spec.curve_kind = CurveKind::size_indexed;
  const MetaDataset md = generate(spec);
  const auto dir = testing::temp_dir("roundtrip_size");
  save_metadataset(md, dir / "manifest.json");
  EXPECT_TRUE(load_metadataset(dir / "manifest.json") == md);
}

TEST(Manifest, MissingCurveNamesTheKey) {
  GenSpec spec;
  spec.n_datasets = 2;
  spec.n_algorithms = 2;
  const auto dir = testing::temp_dir("missing");
  save_metadataset(generate(spec), dir / "manifest.json");
  std::filesystem::remove(dir / "curves" / "d0_a1_test.csv");
  try {
    load_metadataset(dir / "manifest.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "missing_curve");
    EXPECT_NE(std::string(e.what()).find("(d0, a1, test)"), std::string::npos) << e.what();
  }
}

TEST(Manifest, MalformedInputs) {
  const auto dir = testing::temp_dir("malformed");
  {
    std::ofstream(dir / "manifest.json") << "{ not json";
  }
  EXPECT_THROW(load_metadataset(dir / "manifest.json"), Error);
  {
    std::ofstream(dir / "manifest.json") << R"({"score_min":0})";
  }
  try {
    load_metadataset(dir / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "malformed_manifest");
  }
  EXPECT_THROW(load_metadataset(dir / "nope.json"), Error);
}

TEST(Manifest, UnsortedCurveFileIsRejected) {
  GenSpec spec;
  spec.n_datasets = 1;
  spec.n_algorithms = 1;
  const auto dir = testing::temp_dir("unsorted");
  save_metadataset(generate(spec), dir / "manifest.json");
  std::ofstream(dir / "curves" / "d0_a0_valid.csv") << "cost,score\n2,0.5\n1,0.6\n";
  try {
    load_metadataset(dir / "manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("(d0, a0, valid)"), std::string::npos) << e.what();
  }
}

TEST(FormatDouble, RoundTripsRandomValues) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::bit_cast<double>(rng() & 0x3fffffffffffffffULL);
    if (!std::isfinite(v)) continue;
    ASSERT_EQ(parse_double(format_double(v)), v);
  }
}

}  // namespace
}  // namespace lcarena

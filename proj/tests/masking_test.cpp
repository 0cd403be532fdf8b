#include "ctcbert/masking.hpp"

#include "ctcbert/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace ctcbert {
namespace {

TEST(SampleMaskTest, ZeroProbabilityIsEmpty) {
  Rng rng = make_rng({1});
  const MaskSpec spec = sample_mask(50, 0.0, 10, rng);
  EXPECT_TRUE(spec.empty());
  EXPECT_EQ(spec.total_frames(), 50);
}

TEST(SampleMaskTest, SingleSpanCoversWholeUtterance) {
  Rng rng = make_rng({2});
  const MaskSpec spec = sample_mask(10, 0.1, 10, rng);  // floor(0.1 * 10) = 1 start
  ASSERT_EQ(spec.intervals().size(), 1u);
  if (spec.intervals()[0].start == 0) {
    EXPECT_EQ(spec.intervals()[0], (Interval{0, 10}));
  }
  EXPECT_EQ(MaskSpec::from_spans(10, {{0, 10}}).intervals(), (std::vector<Interval>{{0, 10}}));
}

TEST(SampleMaskTest, DeterministicPerSeed) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a = make_rng({seed, 4, 9});
    Rng b = make_rng({seed, 4, 9});
    EXPECT_EQ(sample_mask(200, 0.08, 10, a).intervals(), sample_mask(200, 0.08, 10, b).intervals());
  }
}

TEST(SampleMaskTest, IntervalsSortedDisjointAndNonTouching) {
  Rng rng = make_rng({5});
  for (int trial = 0; trial < 500; ++trial) {
    const int frames = 1 + trial % 150;
    const MaskSpec spec = sample_mask(frames, 0.15, 1 + trial % 12, rng);
    for (size_t i = 0; i < spec.intervals().size(); ++i) {
      const Interval& cur = spec.intervals()[i];
      EXPECT_GE(cur.length(), 1);
      EXPECT_GE(cur.start, 0);
      EXPECT_LE(cur.end, frames);
      if (i > 0) EXPECT_LT(spec.intervals()[i - 1].end, cur.start);
    }
  }
}

TEST(SampleMaskTest, MergeNeitherLosesNorAddsFrames) {
  Rng rng = make_rng({6});
  std::uniform_int_distribution<int> start(-3, 60);
  std::uniform_int_distribution<int> len(1, 9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interval> spans;
    std::vector<bool> marked(60, false);
    for (int n = 0; n < 1 + trial % 7; ++n) {
      const int s = start(rng);
      const int e = s + len(rng);
      spans.push_back({s, e});
      for (int t = std::max(s, 0); t < std::min(e, 60); ++t) marked[t] = true;
    }
    EXPECT_EQ(MaskSpec::from_spans(60, spans).frame_mask(), marked);
  }
}

TEST(SampleMaskTest, AdjacentSpansMerge) {
  const MaskSpec spec = MaskSpec::from_spans(20, {{5, 8}, {0, 5}, {10, 12}});
  EXPECT_EQ(spec.intervals(), (std::vector<Interval>{{0, 8}, {10, 12}}));
  EXPECT_EQ(spec.masked_frames(), 10);
}

TEST(SampleMaskTest, StartCountIsFloorOfPT) {
  Rng rng = make_rng({7});
  // span 1 never merges distinct starts, so the masked count equals the start count.
  EXPECT_EQ(sample_mask(1000, 0.08, 1, rng).masked_frames(), 80);
  EXPECT_EQ(sample_mask(99, 0.08, 1, rng).masked_frames(), 7);
}

// Independent reference: rejection-sample distinct starts into a set.
double reference_masked_fraction(int frames, double p, int span, Rng& rng) {
  const int starts = static_cast<int>(std::floor(p * frames));
  std::set<int> chosen;
  std::uniform_int_distribution<int> pick(0, frames - 1);
  while (static_cast<int>(chosen.size()) < starts) chosen.insert(pick(rng));
  std::vector<bool> masked(frames, false);
  for (int s : chosen) {
    for (int t = s; t < std::min(s + span, frames); ++t) masked[t] = true;
  }
  return static_cast<double>(std::count(masked.begin(), masked.end(), true)) / frames;
}

// Exact expectation: frame t is unmasked iff none of the min(t, span-1)+1
// starts that would cover it is chosen among C(T, n) equally likely sets.
double exact_masked_fraction(int frames, double p, int span) {
  const int starts = static_cast<int>(std::floor(p * frames));
  double total = 0.0;
  for (int t = 0; t < frames; ++t) {
    const int covering = std::min(t, span - 1) + 1;
    double miss = 1.0;  // C(T - covering, n) / C(T, n)
    for (int i = 0; i < starts; ++i) {
      miss *= static_cast<double>(frames - covering - i) / (frames - i);
    }
    total += 1.0 - std::max(miss, 0.0);
  }
  return total / frames;
}

TEST(SampleMaskTest, MaskedFractionMatchesIndependentSamplers) {
  Rng rng = make_rng({8});
  Rng ref_rng = make_rng({9});
  const int trials = 10000;
  double ours = 0.0;
  double reference = 0.0;
  for (int i = 0; i < trials; ++i) {
    ours += static_cast<double>(sample_mask(1000, 0.08, 10, rng).masked_frames()) / 1000.0;
    reference += reference_masked_fraction(1000, 0.08, 10, ref_rng);
  }
  ours /= trials;
  reference /= trials;
  EXPECT_NEAR(ours, reference, 0.02);
  EXPECT_NEAR(ours, exact_masked_fraction(1000, 0.08, 10), 0.005);
}

TEST(SampleMaskTest, RejectsInvalidArguments) {
  Rng rng = make_rng({10});
  EXPECT_THROW(sample_mask(0, 0.1, 10, rng), Error);
  EXPECT_THROW(sample_mask(10, 1.5, 10, rng), Error);
  EXPECT_THROW(sample_mask(10, 0.1, 0, rng), Error);
}

TEST(ApplyMaskTest, EmptySpecIsIdentity) {
  const Matrix features = Matrix::Random(5, 3);
  const Matrix out = apply_mask(features, MaskSpec(5), Vector::Ones(3));
  EXPECT_EQ(out, features);
}

TEST(ApplyMaskTest, FullCoverReplacesEveryRow) {
  const Matrix features = Matrix::Random(4, 3);
  const Vector emb = Vector::Constant(3, 0.25);
  const Matrix out = apply_mask(features, MaskSpec::from_spans(4, {{0, 4}}), emb);
  for (int t = 0; t < 4; ++t) EXPECT_EQ(out.row(t), emb.transpose());
}

TEST(ApplyMaskTest, OnlyMaskedRowsChange) {
  const Matrix features = Matrix::Random(5, 2);
  const Vector emb = Vector::Constant(2, 7.0);
  const Matrix out = apply_mask(features, MaskSpec::from_spans(5, {{2, 4}}), emb);
  for (int t : {0, 1, 4}) EXPECT_EQ(out.row(t), features.row(t));
  for (int t : {2, 3}) EXPECT_EQ(out.row(t), emb.transpose());
}

TEST(ApplyMaskTest, DimensionMismatch) {
  try {
    apply_mask(Matrix::Zero(3, 4), MaskSpec(3), Vector::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

}  // namespace
}  // namespace ctcbert

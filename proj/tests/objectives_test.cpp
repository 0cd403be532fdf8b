#include "ctcbert/objectives.hpp"

#include "ctcbert/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ctcbert {
namespace {

using testing::flatten;
using testing::random_logits;
using testing::unflatten;

std::vector<int> random_ids(int frames, int vocab, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  std::bernoulli_distribution stay(0.6);
  std::vector<int> ids(frames);
  for (int t = 0; t < frames; ++t) ids[t] = (t > 0 && stay(rng)) ? ids[t - 1] : pick(rng);
  return ids;
}

MaskSpec random_spec(int frames, Rng& rng) {
  std::uniform_int_distribution<int> start(0, frames - 1);
  std::uniform_int_distribution<int> len(1, 4);
  std::vector<Interval> spans;
  for (int i = 0; i < 2; ++i) {
    const int s = start(rng);
    spans.push_back({s, s + len(rng)});
  }
  return MaskSpec::from_spans(frames, spans);
}

TEST(CeMaskedLossTest, UniformLatticeGivesLogClasses) {
  const auto lattice = LogProbLattice::from_logits(Matrix::Zero(8, 6));
  const std::vector<int> ids{0, 1, 2, 3, 4, 0, 1, 2};
  const auto r = ce_masked_loss(lattice, ids, MaskSpec::from_spans(8, {{1, 4}}));
  EXPECT_NEAR(r.loss, std::log(6.0), 1e-12);
  EXPECT_EQ(r.count, 3);
}

TEST(CeMaskedLossTest, EmptyMaskIsZero) {
  Rng rng = make_rng({30});
  const auto lattice = LogProbLattice::from_logits(random_logits(5, 4, rng));
  const auto r = ce_masked_loss(lattice, std::vector<int>{0, 1, 2, 0, 1}, MaskSpec(5));
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.count, 0);
  EXPECT_TRUE(r.grad.isZero());
}

TEST(CeMaskedLossTest, GradientVanishesOutsideMask) {
  Rng rng = make_rng({31});
  const auto lattice = LogProbLattice::from_logits(random_logits(10, 5, rng));
  const auto spec = MaskSpec::from_spans(10, {{2, 5}});
  const auto r = ce_masked_loss(lattice, random_ids(10, 4, rng), spec);
  const auto masked = spec.frame_mask();
  for (int t = 0; t < 10; ++t) {
    if (!masked[t]) EXPECT_TRUE(r.grad.row(t).isZero());
  }
}

TEST(CtcbertLossTest, ConstantRegionMatchesSixPathOracle) {
  // Region ids [k,k,k] give target [k]; six 3-frame paths collapse to it.
  Rng rng = make_rng({32});
  const Matrix logits = random_logits(3, 3, rng);
  const auto lattice = LogProbLattice::from_logits(logits);
  const int k = 1;
  const int b = 2;
  const int paths[6][3] = {{k, k, k}, {k, k, b}, {k, b, b}, {b, k, k}, {b, b, k}, {b, k, b}};
  double total = 0.0;
  for (const auto& path : paths) {
    double p = 1.0;
    for (int t = 0; t < 3; ++t) p *= std::exp(lattice(t, path[t]));
    total += p;
  }
  const auto r = ctcbert_loss(lattice, std::vector<int>{k, k, k}, MaskSpec::from_spans(3, {{0, 3}}));
  EXPECT_EQ(r.count, 1);
  EXPECT_NEAR(r.loss, -std::log(total), 1e-12);
}

TEST(CtcbertLossTest, SumOverRegionsNormalizedByTokens) {
  Rng rng = make_rng({33});
  const auto lattice = LogProbLattice::from_logits(random_logits(12, 5, rng));
  const std::vector<int> ids{0, 0, 1, 1, 2, 3, 3, 3, 1, 2, 2, 0};
  const auto spec = MaskSpec::from_spans(12, {{1, 5}, {7, 11}});
  const double first = ctc_loss(lattice.slice(1, 5), Labels{0, 1, 2});
  const double second = ctc_loss(lattice.slice(7, 11), Labels{3, 1, 2});
  const auto r = ctcbert_loss(lattice, ids, spec);
  EXPECT_EQ(r.count, 6);
  EXPECT_NEAR(r.loss, (first + second) / 6.0, 1e-12);
}

TEST(CtcbertLossTest, InvariantToRegionOrderingOfSpans) {
  Rng rng = make_rng({34});
  const auto lattice = LogProbLattice::from_logits(random_logits(15, 4, rng));
  const auto ids = random_ids(15, 3, rng);
  const auto a = ctcbert_loss(lattice, ids, MaskSpec::from_spans(15, {{0, 4}, {6, 9}, {11, 14}}));
  const auto b = ctcbert_loss(lattice, ids, MaskSpec::from_spans(15, {{11, 14}, {0, 4}, {6, 9}}));
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad, b.grad);
}

TEST(CtcbertLossTest, EmptyMaskIsZero) {
  Rng rng = make_rng({35});
  const auto lattice = LogProbLattice::from_logits(random_logits(4, 3, rng));
  const auto r = ctcbert_loss(lattice, std::vector<int>{0, 1, 1, 0}, MaskSpec(4));
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_TRUE(r.grad.isZero());
}

double loss_from_logits(std::span<const double> x, Eigen::Index frames, int classes,
                        const std::vector<int>& ids, const MaskSpec& spec, double alpha) {
  return joint_loss(LogProbLattice::from_logits(unflatten(x, frames, classes)), ids, spec, alpha)
      .combined;
}

class JointGradientTest : public ::testing::TestWithParam<double> {};

TEST_P(JointGradientTest, MatchesFiniteDifferences) {
  const double alpha = GetParam();
  Rng rng = make_rng({36, static_cast<std::uint64_t>(alpha * 10)});
  for (int trial = 0; trial < 100; ++trial) {
    const int frames = 4 + trial % 5;
    const int vocab = 2 + trial % 3;
    const Matrix logits = random_logits(frames, vocab + 1, rng);
    const auto ids = random_ids(frames, vocab, rng);
    const auto spec = random_spec(frames, rng);
    const auto breakdown = joint_loss(LogProbLattice::from_logits(logits), ids, spec, alpha);
    auto x = flatten(logits);
    const auto analytic = flatten(breakdown.grad);
    const double err = check_gradient(
        [&](std::span<const double> p) { return loss_from_logits(p, frames, vocab + 1, ids, spec, alpha); },
        x, analytic);
    EXPECT_LE(err, 1e-4) << "trial " << trial;
  }
}

INSTANTIATE_TEST_SUITE_P(Alphas, JointGradientTest, ::testing::Values(0.0, 0.3, 0.5, 1.0));

TEST(JointLossTest, EndpointsEqualComponentsExactly) {
  Rng rng = make_rng({37});
  for (int trial = 0; trial < 50; ++trial) {
    const auto lattice = LogProbLattice::from_logits(random_logits(10, 4, rng));
    const auto ids = random_ids(10, 3, rng);
    const auto spec = random_spec(10, rng);
    const auto ce = ce_masked_loss(lattice, ids, spec);
    const auto ctc = ctcbert_loss(lattice, ids, spec);
    const auto at0 = joint_loss(lattice, ids, spec, 0.0);
    const auto at1 = joint_loss(lattice, ids, spec, 1.0);
    EXPECT_EQ(at0.combined, ce.loss);
    EXPECT_EQ(at0.grad, ce.grad);
    EXPECT_EQ(at1.combined, ctc.loss);
    EXPECT_EQ(at1.grad, ctc.grad);
  }
}

TEST(JointLossTest, AffineInAlpha) {
  Rng rng = make_rng({38});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lattice = LogProbLattice::from_logits(random_logits(9, 5, rng));
    const auto ids = random_ids(9, 4, rng);
    const auto spec = random_spec(9, rng);
    const double l0 = joint_loss(lattice, ids, spec, 0.0).combined;
    const double l1 = joint_loss(lattice, ids, spec, 1.0).combined;
    const double a = unit(rng);
    EXPECT_NEAR(joint_loss(lattice, ids, spec, a).combined, a * l1 + (1 - a) * l0, 1e-12);
  }
}

TEST(JointLossTest, RejectsAlphaOutsideUnitInterval) {
  const auto lattice = LogProbLattice::from_logits(Matrix::Zero(3, 3));
  EXPECT_THROW(joint_loss(lattice, std::vector<int>{0, 1, 0}, MaskSpec(3), 1.5), Error);
  EXPECT_THROW(joint_loss(lattice, std::vector<int>{0, 1, 0}, MaskSpec(3), -0.1), Error);
}

TEST(EffectiveAlphaTest, WarmupSchedule) {
  const TrainingMode mode{.alpha = 1.0, .ce_warmup_steps = 200};
  EXPECT_EQ(effective_alpha(0, mode), 0.0);
  EXPECT_EQ(effective_alpha(199, mode), 0.0);
  EXPECT_EQ(effective_alpha(200, mode), 1.0);
  EXPECT_EQ(effective_alpha(5000, mode), 1.0);
  EXPECT_EQ(effective_alpha(0, TrainingMode{.alpha = 0.5}), 0.5);
}

}  // namespace
}  // namespace ctcbert

#include "ctcbert/finetune.hpp"

#include "ctcbert/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace ctcbert {
namespace {

Model pretrained() {
  ModelDims dims;
  dims.feature_dim = 3;
  dims.model_dim = 5;
  dims.embed_dim = 3;
  dims.vocab = 4;
  Rng rng = make_rng({80});
  return init_model(dims, rng);
}

Corpus labeled() {
  CorpusConfig c;
  c.utterances = 10;
  c.frames = 25;
  c.vocab = 4;
  c.feature_dim = 3;
  return gen_corpus(c);
}

std::vector<double> pack(const FinetuneModel& m) {
  std::vector<double> out;
  for (std::span<const double> b : blobs(m)) out.insert(out.end(), b.begin(), b.end());
  return out;
}

TEST(FinetuneTest, LoadedBlankDiffersOnlyInBlankRow) {
  const Model m = pretrained();
  const BlankParams blank = extract_blank_params(m.head);
  const FinetuneModel fresh = make_finetune_model(m, 4, std::nullopt, 9);
  const FinetuneModel loaded = make_finetune_model(m, 4, blank, 9);
  EXPECT_EQ(fresh.head.weight.topRows(4), loaded.head.weight.topRows(4));
  EXPECT_EQ(loaded.head.weight.row(4), blank.weight.transpose());
  EXPECT_EQ(loaded.head.bias[4], blank.bias);
  EXPECT_EQ(fresh.head.bias[4], 0.0);
}

TEST(FinetuneTest, LoadedBlankReproducesPretrainedBlankLogit) {
  const Model m = pretrained();
  const FinetuneModel f = make_finetune_model(m, 6, extract_blank_params(m.head), 2);
  Rng rng = make_rng({81});
  for (int i = 0; i < 10; ++i) {
    const Matrix x = testing::random_logits(4, 3, rng);
    const Matrix h = encoder_forward(x, m.encoder);
    const Matrix a = compute_logits(h, m.head);
    const Matrix b = compute_logits(h, f.head);
    EXPECT_TRUE(a.col(4).isApprox(b.col(6), 1e-10));
  }
}

TEST(FinetuneTest, GradientMatchesFiniteDifferences) {
  const Model m = pretrained();
  const Corpus corpus = labeled();
  for (int trial = 0; trial < 5; ++trial) {
    const FinetuneModel f = make_finetune_model(m, 4, std::nullopt, trial);
    const Utterance& u = corpus.utterances[trial];
    Matrix features = u.features.topRows(8);
    const Labels target = dedup(std::vector<int>(u.true_ids.begin(), u.true_ids.begin() + 8));
    FinetuneModel grad = zeros_like(f);
    finetune_loss_and_grad(f, features, target, &grad);
    FinetuneModel probe = f;
    auto x = pack(f);
    const double err = check_gradient(
        [&](std::span<const double> p) {
          size_t pos = 0;
          for (std::span<double> b : blobs(probe)) {
            std::copy(p.begin() + pos, p.begin() + pos + b.size(), b.begin());
            pos += b.size();
          }
          return finetune_loss_and_grad(probe, features, target, nullptr);
        },
        x, pack(grad));
    EXPECT_LE(err, 1e-3);
  }
}

TEST(FinetuneTest, FreezeEncoderKeepsEncoderFixed) {
  const Model m = pretrained();
  FinetuneConfig c;
  c.steps = 5;
  c.batch_size = 2;
  c.freeze_encoder = true;
  const FinetuneModel init = make_finetune_model(m, 4, std::nullopt, 1);
  const FinetuneResult r = finetune(labeled(), c, init);
  EXPECT_EQ(r.model.encoder.blocks[0].weight, init.encoder.blocks[0].weight);
  EXPECT_NE(r.model.head.weight, init.head.weight);
  for (const StepMetrics& s : r.log) {
    EXPECT_EQ(s.alpha, 1.0);
    EXPECT_EQ(s.ce, 0.0);
  }
}

TEST(FinetuneTest, SameVocabRunsAndIsDeterministic) {
  FinetuneConfig c;
  c.steps = 4;
  c.batch_size = 3;
  const FinetuneModel init = make_finetune_model(pretrained(), 4, std::nullopt, 1);
  const FinetuneResult a = finetune(labeled(), c, init);
  const FinetuneResult b = finetune(labeled(), c, init);
  EXPECT_EQ(a.model.head.weight, b.model.head.weight);
  EXPECT_EQ(a.log.back().combined, b.log.back().combined);
}

TEST(FinetuneTest, RejectsLabelsOutsideVocab) {
  FinetuneConfig c;
  c.steps = 1;
  const FinetuneModel small = make_finetune_model(pretrained(), 2, std::nullopt, 1);
  try {
    finetune(labeled(), c, small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
  }
}

}  // namespace
}  // namespace ctcbert

#pragma once

#include "ctcbert/model.hpp"
#include "ctcbert/synthesis.hpp"
#include "ctcbert/trainer.hpp"

#include <optional>

namespace ctcbert {

struct FinetuneConfig {
  std::int64_t steps = 200;
  int batch_size = 8;
  double lr_peak = 2e-3;
  std::int64_t lr_warmup_steps = 20;
  LrDecay decay = LrDecay::Linear;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double weight_decay = 0.01;
  double grad_clip = 0.0;
  int vocab = 0;  // V'; 0 means "same as the corpus"
  bool freeze_encoder = false;
  std::uint64_t seed = 1;
};

/// Pretrained encoder plus a fresh direct-affine head over V' + 1 classes.
/// With `blank`, the head's blank row and bias are (W_b, b_b).
FinetuneModel make_finetune_model(const Model& pretrained, int vocab,
                                  const std::optional<BlankParams>& blank, std::uint64_t seed);

/// Full-utterance CTC on dedup(true_ids), divided by the target length.
double finetune_loss_and_grad(const FinetuneModel& model, const Matrix& features,
                              std::span<const int> target, FinetuneModel* grad);

struct FinetuneResult {
  FinetuneModel model;
  std::vector<StepMetrics> log;  // ce = 0 and alpha = 1 on every row
};

FinetuneResult finetune(const Corpus& corpus, const FinetuneConfig& config, FinetuneModel model);

}  // namespace ctcbert

#pragma once

#include "ctcbert/model.hpp"
#include "ctcbert/objectives.hpp"
#include "ctcbert/optimizer.hpp"
#include "ctcbert/synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace ctcbert {

enum class LrDecay { Linear, Constant };

std::string_view to_string(LrDecay decay);
LrDecay parse_lr_decay(std::string_view name);

struct TrainConfig {
  std::int64_t steps = 2000;
  int batch_size = 8;
  double lr_peak = 5e-3;
  std::int64_t lr_warmup_steps = 200;
  LrDecay decay = LrDecay::Linear;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double weight_decay = 0.01;
  double grad_clip = 0.0;  // max global L2 norm; 0 disables
  double mask_prob = 0.08;
  int mask_span = 10;
  TrainingMode mode;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& config);

/// Linear ramp to lr_peak over lr_warmup_steps, then linear decay to zero at
/// `steps` (or held at the peak for LrDecay::Constant).
double learning_rate(std::int64_t step, const TrainConfig& config);

struct StepMetrics {
  std::int64_t step = 0;
  double ce = 0.0;
  double ctc = 0.0;
  double combined = 0.0;
  double alpha = 0.0;
};

/// One tab-separated line per step: step ce ctc combined alpha.
void write_metrics(std::ostream& out, const std::vector<StepMetrics>& log);
void write_metrics(const std::filesystem::path& path, const std::vector<StepMetrics>& log);
std::vector<StepMetrics> read_metrics(const std::filesystem::path& path);

/// Masked forward pass, joint objective and full backward pass for one
/// utterance. Gradients are added into `grad` when it is non-null.
LossBreakdown pretrain_loss_and_grad(const Model& model, const Matrix& features,
                                     std::span<const int> ids, const MaskSpec& spec,
                                     double alpha, Model* grad);

/// Mask of one utterance at one step; a pure function of (seed, utterance, step).
MaskSpec step_mask(const TrainConfig& config, int frames, std::size_t utterance,
                   std::int64_t step);

/// Utterance indices of a step's batch, sorted ascending.
std::vector<std::size_t> step_batch(std::uint64_t seed, std::int64_t step, int batch_size,
                                    std::size_t corpus_size);

struct TrainResult {
  Model model;
  std::vector<StepMetrics> log;
};

/// Mini-batch AdamW training on noisy_ids. Throws NonFiniteLoss naming the
/// offending step if a batch loss is not finite.
TrainResult train(const Corpus& corpus, const TrainConfig& config, Model model);

/// Global L2 norm clipping; returns the pre-clip norm.
double clip_gradients(std::span<const std::span<double>> grads, double max_norm);

/// Moving average of `combined` over `window` steps.
std::vector<double> smoothed_loss(const std::vector<StepMetrics>& log, std::size_t window);

}  // namespace ctcbert

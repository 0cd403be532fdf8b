#pragma once

#include "ctcbert/ctc.hpp"
#include "ctcbert/masking.hpp"
#include "ctcbert/targets.hpp"

#include <cstdint>

namespace ctcbert {

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;  // w.r.t. logits, T x (V+1)
  int count = 0;  // normalizer: masked frames (CE) or target tokens (CTC)
};

/// Frame-level cross-entropy over masked frames, averaged by masked-frame
/// count. The softmax spans all V+1 classes, blank included.
LossAndGrad ce_masked_loss(const LogProbLattice& lattice, std::span<const int> ids,
                           const MaskSpec& spec);

/// Sum over masked regions of ctc_loss(region rows, dedup(region ids)),
/// divided by the total number of dedup target tokens.
LossAndGrad ctcbert_loss(const LogProbLattice& lattice, std::span<const int> ids,
                         const MaskSpec& spec);

struct LossBreakdown {
  double ce = 0.0;
  double ctc = 0.0;
  double combined = 0.0;
  double alpha = 0.0;
  int masked_frames = 0;
  int target_tokens = 0;
  Matrix grad;
};

/// alpha * ctcbert + (1 - alpha) * ce, gradient combined the same way.
LossBreakdown joint_loss(const LogProbLattice& lattice, std::span<const int> ids,
                         const MaskSpec& spec, double alpha);

struct TrainingMode {
  double alpha = 0.5;
  std::int64_t ce_warmup_steps = 0;
};

/// 0 while step < ce_warmup_steps, mode.alpha from then on.
double effective_alpha(std::int64_t step, const TrainingMode& mode);

}  // namespace ctcbert

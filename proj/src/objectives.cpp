#include "ctcbert/objectives.hpp"

#include "ctcbert/error.hpp"

namespace ctcbert {

namespace {

void check_inputs(const LogProbLattice& lattice, std::span<const int> ids, const MaskSpec& spec) {
  require(static_cast<Eigen::Index>(ids.size()) == lattice.frames(),
          ErrorKind::DimensionMismatch, "id sequence length differs from lattice frames");
  require(spec.total_frames() == lattice.frames(), ErrorKind::DimensionMismatch,
          "mask frame count differs from lattice frames");
  for (int id : ids) {
    require(0 <= id && id < lattice.vocab(), ErrorKind::DimensionMismatch,
            "id outside [0, V)");
  }
}

}  // namespace

LossAndGrad ce_masked_loss(const LogProbLattice& lattice, std::span<const int> ids,
                           const MaskSpec& spec) {
  check_inputs(lattice, ids, spec);
  LossAndGrad out;
  out.grad = Matrix::Zero(lattice.frames(), lattice.vocab() + 1);
  out.count = spec.masked_frames();
  if (out.count == 0) return out;

  const double scale = 1.0 / out.count;
  for (const Interval& region : spec.intervals()) {
    for (int t = region.start; t < region.end; ++t) {
      out.loss -= lattice(t, ids[t]);
      out.grad.row(t) = lattice.values().row(t).array().exp() * scale;
      out.grad(t, ids[t]) -= scale;
    }
  }
  out.loss *= scale;
  return out;
}

LossAndGrad ctcbert_loss(const LogProbLattice& lattice, std::span<const int> ids,
                         const MaskSpec& spec) {
  check_inputs(lattice, ids, spec);
  LossAndGrad out;
  out.grad = Matrix::Zero(lattice.frames(), lattice.vocab() + 1);
  const std::vector<Labels> targets = segment_targets(ids, spec);
  for (const Labels& target : targets) out.count += static_cast<int>(target.size());
  if (out.count == 0) return out;

  const double scale = 1.0 / out.count;
  for (size_t m = 0; m < targets.size(); ++m) {
    const Interval& region = spec.intervals()[m];
    const CtcResult segment =
        ctc_forward_backward(lattice.slice(region.start, region.end), targets[m]);
    out.loss += segment.loss;
    out.grad.middleRows(region.start, region.length()) = segment.grad * scale;
  }
  out.loss *= scale;
  return out;
}

LossBreakdown joint_loss(const LogProbLattice& lattice, std::span<const int> ids,
                         const MaskSpec& spec, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, ErrorKind::ConfigInvalid, "alpha must lie in [0, 1]");
  const LossAndGrad ce = ce_masked_loss(lattice, ids, spec);
  const LossAndGrad ctc = ctcbert_loss(lattice, ids, spec);
  LossBreakdown out;
  out.ce = ce.loss;
  out.ctc = ctc.loss;
  out.alpha = alpha;
  out.masked_frames = ce.count;
  out.target_tokens = ctc.count;
  out.combined = alpha * ctc.loss + (1.0 - alpha) * ce.loss;
  out.grad = alpha * ctc.grad + (1.0 - alpha) * ce.grad;
  return out;
}

double effective_alpha(std::int64_t step, const TrainingMode& mode) {
  return step < mode.ce_warmup_steps ? 0.0 : mode.alpha;
}

}  // namespace ctcbert

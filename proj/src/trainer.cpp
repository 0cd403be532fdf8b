#include "ctcbert/trainer.hpp"

#include "ctcbert/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

namespace ctcbert {

namespace {
constexpr std::uint64_t kBatchStream = 0x62617463;
}

std::string_view to_string(LrDecay decay) {
  return decay == LrDecay::Linear ? "linear" : "constant";
}

LrDecay parse_lr_decay(std::string_view name) {
  if (name == "linear") return LrDecay::Linear;
  if (name == "constant") return LrDecay::Constant;
  throw Error(ErrorKind::ConfigInvalid, "unknown lr decay '" + std::string(name) + "'");
}

void validate(const TrainConfig& c) {
  require(c.steps >= 0, ErrorKind::ConfigInvalid, "steps must be >= 0");
  require(c.batch_size >= 1, ErrorKind::ConfigInvalid, "batch_size must be >= 1");
  require(c.lr_peak > 0.0, ErrorKind::ConfigInvalid, "lr must be > 0");
  require(c.lr_warmup_steps >= 0, ErrorKind::ConfigInvalid, "lr_warmup must be >= 0");
  require(c.beta1 >= 0.0 && c.beta1 < 1.0 && c.beta2 >= 0.0 && c.beta2 < 1.0,
          ErrorKind::ConfigInvalid, "adam betas must lie in [0, 1)");
  require(c.weight_decay >= 0.0, ErrorKind::ConfigInvalid, "weight_decay must be >= 0");
  require(c.grad_clip >= 0.0, ErrorKind::ConfigInvalid, "grad_clip must be >= 0");
  require(c.mask_prob >= 0.0 && c.mask_prob <= 1.0, ErrorKind::ConfigInvalid,
          "mask_p must lie in [0, 1]");
  require(c.mask_span >= 1, ErrorKind::ConfigInvalid, "mask_l must be >= 1");
  require(c.mode.alpha >= 0.0 && c.mode.alpha <= 1.0, ErrorKind::ConfigInvalid,
          "alpha must lie in [0, 1]");
  require(c.mode.ce_warmup_steps >= 0, ErrorKind::ConfigInvalid, "ce_warmup must be >= 0");
}

double learning_rate(std::int64_t step, const TrainConfig& config) {
  if (step < config.lr_warmup_steps) {
    return config.lr_peak * static_cast<double>(step + 1) /
           static_cast<double>(config.lr_warmup_steps);
  }
  if (config.decay == LrDecay::Constant) return config.lr_peak;
  const std::int64_t decay_steps = config.steps - config.lr_warmup_steps;
  if (decay_steps <= 0) return config.lr_peak;
  const double remaining = static_cast<double>(config.steps - step) / decay_steps;
  return config.lr_peak * std::clamp(remaining, 0.0, 1.0);
}

void write_metrics(std::ostream& out, const std::vector<StepMetrics>& log) {
  out << std::setprecision(17);
  for (const StepMetrics& m : log) {
    out << m.step << '\t' << m.ce << '\t' << m.ctc << '\t' << m.combined << '\t' << m.alpha
        << '\n';
  }
}

void write_metrics(const std::filesystem::path& path, const std::vector<StepMetrics>& log) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  write_metrics(out, log);
  require(out.good(), ErrorKind::Io, "write to '" + path.string() + "' failed");
}

std::vector<StepMetrics> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::vector<StepMetrics> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    StepMetrics m;
    row >> m.step >> m.ce >> m.ctc >> m.combined >> m.alpha;
    require(!row.fail(), ErrorKind::Io, "malformed metrics line in '" + path.string() + "'");
    log.push_back(m);
  }
  return log;
}

LossBreakdown pretrain_loss_and_grad(const Model& model, const Matrix& features,
                                     std::span<const int> ids, const MaskSpec& spec,
                                     double alpha, Model* grad) {
  const Matrix masked = apply_mask(features, spec, model.encoder.mask_embedding);
  const EncoderTrace trace = encoder_forward_traced(masked, model.encoder);
  const Matrix logits = compute_logits(trace.hidden, model.head);
  LossBreakdown out = joint_loss(LogProbLattice::from_logits(logits), ids, spec, alpha);
  if (grad != nullptr) {
    const Matrix d_hidden = head_backward(trace.hidden, model.head, out.grad, grad->head);
    const Matrix d_input = encoder_backward(trace, model.encoder, d_hidden, grad->encoder);
    for (const Interval& region : spec.intervals()) {
      grad->encoder.mask_embedding +=
          d_input.middleRows(region.start, region.length()).colwise().sum().transpose();
    }
  }
  return out;
}

MaskSpec step_mask(const TrainConfig& config, int frames, std::size_t utterance,
                   std::int64_t step) {
  Rng rng = make_rng({config.seed, static_cast<std::uint64_t>(utterance),
                      static_cast<std::uint64_t>(step)});
  return sample_mask(frames, config.mask_prob, config.mask_span, rng);
}

std::vector<std::size_t> step_batch(std::uint64_t seed, std::int64_t step, int batch_size,
                                    std::size_t corpus_size) {
  Rng rng = make_rng({seed, static_cast<std::uint64_t>(step), kBatchStream});
  std::vector<std::size_t> batch;
  if (static_cast<std::size_t>(batch_size) >= corpus_size) {
    batch.resize(corpus_size);
    std::iota(batch.begin(), batch.end(), 0);
    return batch;
  }
  std::vector<std::size_t> pool(corpus_size);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, corpus_size - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  batch.assign(pool.begin(), pool.begin() + batch_size);
  std::sort(batch.begin(), batch.end());
  return batch;
}

double clip_gradients(std::span<const std::span<double>> grads, double max_norm) {
  double sq = 0.0;
  for (std::span<double> g : grads) {
    for (double v : g) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (std::span<double> g : grads) {
      for (double& v : g) v *= scale;
    }
  }
  return norm;
}

TrainResult train(const Corpus& corpus, const TrainConfig& config, Model model) {
  validate(config);
  require(!corpus.utterances.empty(), ErrorKind::EmptyDataset, "training corpus is empty");
  require(corpus.vocab == model.dims.vocab && corpus.feature_dim == model.dims.feature_dim,
          ErrorKind::DimensionMismatch, "corpus dimensions differ from the model");

  TrainResult result;
  AdamState state;
  AdamHyper hyper{.lr = config.lr_peak,
                  .beta1 = config.beta1,
                  .beta2 = config.beta2,
                  .eps = 1e-8,
                  .weight_decay = config.weight_decay};
  result.log.reserve(static_cast<size_t>(config.steps));

  for (std::int64_t step = 0; step < config.steps; ++step) {
    const double alpha = effective_alpha(step, config.mode);
    const std::vector<std::size_t> batch =
        step_batch(config.seed, step, config.batch_size, corpus.utterances.size());

    Model grad = zeros_like(model);
    StepMetrics metrics{.step = step, .alpha = alpha};
    for (std::size_t index : batch) {
      const Utterance& utt = corpus.utterances[index];
      const MaskSpec spec =
          step_mask(config, static_cast<int>(utt.noisy_ids.size()), index, step);
      const LossBreakdown loss =
          pretrain_loss_and_grad(model, utt.features, utt.noisy_ids, spec, alpha, &grad);
      metrics.ce += loss.ce;
      metrics.ctc += loss.ctc;
      metrics.combined += loss.combined;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    metrics.ce *= inv;
    metrics.ctc *= inv;
    metrics.combined *= inv;
    require(std::isfinite(metrics.combined), ErrorKind::NonFiniteLoss,
            "non-finite loss at step " + std::to_string(step));

    std::vector<std::span<double>> grad_blobs = blobs(grad);
    for (std::span<double> g : grad_blobs) {
      for (double& v : g) v *= inv;
    }
    clip_gradients(grad_blobs, config.grad_clip);
    hyper.lr = learning_rate(step, config);
    const std::vector<std::span<const double>> const_grads(grad_blobs.begin(), grad_blobs.end());
    adam_step(blobs(model), const_grads, state, hyper);
    result.log.push_back(metrics);
  }
  result.model = std::move(model);
  return result;
}

std::vector<double> smoothed_loss(const std::vector<StepMetrics>& log, std::size_t window) {
  std::vector<double> out;
  if (window == 0 || log.size() < window) return out;
  double sum = 0.0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    sum += log[i].combined;
    if (i >= window) sum -= log[i - window].combined;
    if (i + 1 >= window) out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

}  // namespace ctcbert

#include "ctcbert/finetune.hpp"

#include "ctcbert/error.hpp"
#include "ctcbert/targets.hpp"

#include <cmath>
#include <string>

namespace ctcbert {

namespace {
constexpr std::uint64_t kHeadStream = 0x68656164;
}

FinetuneModel make_finetune_model(const Model& pretrained, int vocab,
                                  const std::optional<BlankParams>& blank, std::uint64_t seed) {
  FinetuneModel model;
  model.dims = pretrained.dims;
  model.dims.vocab = vocab;
  model.dims.embed_dim = 0;
  model.encoder = pretrained.encoder;
  Rng rng = make_rng({seed, kHeadStream});
  model.head = init_finetune_head(vocab, pretrained.dims.model_dim, blank, rng);
  return model;
}

double finetune_loss_and_grad(const FinetuneModel& model, const Matrix& features,
                              std::span<const int> target, FinetuneModel* grad) {
  const EncoderTrace trace = encoder_forward_traced(features, model.encoder);
  const Matrix logits = compute_logits(trace.hidden, model.head);
  const LogProbLattice lattice = LogProbLattice::from_logits(logits);
  const CtcResult r = ctc_forward_backward(lattice, target);
  // An all-blank utterance has no tokens to normalize by.
  const double scale = target.empty() ? 1.0 : 1.0 / static_cast<double>(target.size());
  if (grad != nullptr) {
    const Matrix d_hidden = head_backward(trace.hidden, model.head, r.grad * scale, grad->head);
    encoder_backward(trace, model.encoder, d_hidden, grad->encoder);
  }
  return r.loss * scale;
}

FinetuneResult finetune(const Corpus& corpus, const FinetuneConfig& config, FinetuneModel model) {
  require(!corpus.utterances.empty(), ErrorKind::EmptyDataset, "finetune corpus is empty");
  require(config.steps >= 0 && config.batch_size >= 1 && config.lr_peak > 0.0,
          ErrorKind::ConfigInvalid, "finetune steps, batch size and lr must be positive");
  require(corpus.feature_dim == model.dims.feature_dim, ErrorKind::DimensionMismatch,
          "corpus feature dimension differs from the model");

  std::vector<Labels> targets;
  targets.reserve(corpus.utterances.size());
  for (const Utterance& u : corpus.utterances) {
    for (int id : u.true_ids) {
      require(id < model.dims.vocab, ErrorKind::ConfigInvalid,
              "label " + std::to_string(id) + " does not fit finetune vocab " +
                  std::to_string(model.dims.vocab));
    }
    targets.push_back(dedup(u.true_ids));
  }

  TrainConfig schedule;
  schedule.steps = config.steps;
  schedule.lr_peak = config.lr_peak;
  schedule.lr_warmup_steps = config.lr_warmup_steps;
  schedule.decay = config.decay;

  FinetuneResult result;
  AdamState state;
  AdamHyper hyper{.lr = config.lr_peak,
                  .beta1 = config.beta1,
                  .beta2 = config.beta2,
                  .eps = 1e-8,
                  .weight_decay = config.weight_decay};
  const size_t encoder_blobs = blobs(model.encoder).size();

  for (std::int64_t step = 0; step < config.steps; ++step) {
    const std::vector<std::size_t> batch =
        step_batch(config.seed, step, config.batch_size, corpus.utterances.size());
    FinetuneModel grad = zeros_like(model);
    double loss = 0.0;
    for (std::size_t index : batch) {
      loss += finetune_loss_and_grad(model, corpus.utterances[index].features, targets[index],
                                     &grad);
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    loss *= inv;
    require(std::isfinite(loss), ErrorKind::NonFiniteLoss,
            "non-finite finetune loss at step " + std::to_string(step));

    std::vector<std::span<double>> params = blobs(model);
    std::vector<std::span<double>> grads = blobs(grad);
    for (std::span<double> g : grads) {
      for (double& v : g) v *= inv;
    }
    if (config.freeze_encoder) {
      params.erase(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(encoder_blobs));
      grads.erase(grads.begin(), grads.begin() + static_cast<std::ptrdiff_t>(encoder_blobs));
    }
    clip_gradients(grads, config.grad_clip);
    hyper.lr = learning_rate(step, schedule);
    const std::vector<std::span<const double>> const_grads(grads.begin(), grads.end());
    adam_step(params, const_grads, state, hyper);
    result.log.push_back({.step = step, .ce = 0.0, .ctc = loss, .combined = loss, .alpha = 1.0});
  }
  result.model = std::move(model);
  return result;
}

}  // namespace ctcbert

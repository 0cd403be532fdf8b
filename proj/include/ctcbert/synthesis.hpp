#pragma once

#include "ctcbert/numerics.hpp"
#include "ctcbert/targets.hpp"

#include <cstdint>
#include <vector>

namespace ctcbert {

struct CorpusConfig {
  int utterances = 200;
  int frames = 100;
  int vocab = 20;
  int feature_dim = 16;
  double self_loop = 0.9;
  double sigma = 0.5;
  int jitter_max = 2;        // k: boundary offsets drawn from [-k, k]
  double jitter_prob = 0.5;  // q: per-boundary shift probability
  double corrupt_prob = 0.05;  // r: per-run relabel probability
  std::uint64_t seed = 1;
};

void validate(const CorpusConfig& config);

struct Utterance {
  Matrix features;      // T x d
  IdSequence true_ids;  // ground-truth alignment
  IdSequence noisy_ids; // training targets: jittered boundaries, some relabeled runs
};

struct Corpus {
  int vocab = 0;
  int feature_dim = 0;
  std::vector<Utterance> utterances;

  std::int64_t total_frames() const;
};

/// Splits share class means; within a split, label sequences and features
/// depend only on (seed, split, utterance), never on jitter/corruption knobs.
enum class Split : std::uint64_t { Train = 0, Eval = 1 };

/// V unit-norm Gaussian directions in R^d, one per class.
Matrix class_means(const CorpusConfig& config);

Corpus gen_corpus(const CorpusConfig& config, Split split = Split::Train);

/// Shifts each run boundary of `ids` by U[-k, k] with probability q, keeping
/// it strictly between its neighbors (rejected shifts leave it in place),
/// then relabels each run with probability r.
IdSequence corrupt_alignment(std::span<const int> ids, int vocab, int jitter_max,
                             double jitter_prob, double corrupt_prob, Rng& rng);

}  // namespace ctcbert

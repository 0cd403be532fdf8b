#include "ctcbert/synthesis.hpp"

#include "ctcbert/error.hpp"

namespace ctcbert {

namespace {

constexpr std::uint64_t kMeansStream = 0x6d65616e;
constexpr std::uint64_t kLabelStream = 0x6c61626c;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kCorruptStream = 0x636f7272;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

IdSequence markov_labels(int frames, int vocab, double self_loop, Rng& rng) {
  std::uniform_int_distribution<int> any(0, vocab - 1);
  std::uniform_int_distribution<int> other(0, vocab - 2);
  std::bernoulli_distribution stay(self_loop);
  IdSequence ids(frames);
  ids[0] = any(rng);
  for (int t = 1; t < frames; ++t) {
    if (stay(rng)) {
      ids[t] = ids[t - 1];
    } else {
      const int pick = other(rng);
      ids[t] = pick >= ids[t - 1] ? pick + 1 : pick;
    }
  }
  return ids;
}

}  // namespace

void validate(const CorpusConfig& c) {
  require(c.utterances >= 1 && c.frames >= 1 && c.feature_dim >= 1, ErrorKind::ConfigInvalid,
          "corpus counts must be positive");
  require(c.vocab >= 2, ErrorKind::ConfigInvalid, "corpus vocab must be >= 2");
  require(is_probability(c.self_loop) && is_probability(c.jitter_prob) &&
              is_probability(c.corrupt_prob),
          ErrorKind::ConfigInvalid, "corpus probabilities must lie in [0, 1]");
  require(c.jitter_max >= 0, ErrorKind::ConfigInvalid, "jitter_max must be >= 0");
  require(c.sigma >= 0.0, ErrorKind::ConfigInvalid, "sigma must be >= 0");
}

std::int64_t Corpus::total_frames() const {
  std::int64_t n = 0;
  for (const Utterance& u : utterances) n += static_cast<std::int64_t>(u.true_ids.size());
  return n;
}

Matrix class_means(const CorpusConfig& config) {
  Rng rng = make_rng({config.seed, kMeansStream});
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix means(config.vocab, config.feature_dim);
  for (Eigen::Index k = 0; k < means.rows(); ++k) {
    do {
      for (Eigen::Index j = 0; j < means.cols(); ++j) means(k, j) = gauss(rng);
    } while (means.row(k).norm() == 0.0);
    means.row(k).normalize();
  }
  return means;
}

IdSequence corrupt_alignment(std::span<const int> ids, int vocab, int jitter_max,
                             double jitter_prob, double corrupt_prob, Rng& rng) {
  const int frames = static_cast<int>(ids.size());
  std::vector<int> starts;
  std::vector<int> labels;
  for (int t = 0; t < frames; ++t) {
    if (t == 0 || ids[t] != ids[t - 1]) {
      starts.push_back(t);
      labels.push_back(ids[t]);
    }
  }
  const size_t runs = starts.size();

  std::bernoulli_distribution shift(jitter_prob);
  std::uniform_int_distribution<int> offset(-jitter_max, jitter_max);
  std::vector<int> moved = starts;
  for (size_t i = 1; i < runs; ++i) {
    if (!shift(rng)) continue;
    const int candidate = starts[i] + offset(rng);
    const int next = i + 1 < runs ? starts[i + 1] : frames;
    if (moved[i - 1] < candidate && candidate < next) moved[i] = candidate;
  }

  std::bernoulli_distribution relabel(corrupt_prob);
  std::uniform_int_distribution<int> other(0, vocab - 2);
  for (int& label : labels) {
    if (relabel(rng)) {
      const int pick = other(rng);
      label = pick >= label ? pick + 1 : pick;
    }
  }

  IdSequence out(frames);
  for (size_t i = 0; i < runs; ++i) {
    const int end = i + 1 < runs ? moved[i + 1] : frames;
    std::fill(out.begin() + moved[i], out.begin() + end, labels[i]);
  }
  return out;
}

Corpus gen_corpus(const CorpusConfig& config, Split split) {
  validate(config);
  const Matrix means = class_means(config);
  const auto split_key = static_cast<std::uint64_t>(split);

  Corpus corpus;
  corpus.vocab = config.vocab;
  corpus.feature_dim = config.feature_dim;
  corpus.utterances.reserve(config.utterances);
  for (int u = 0; u < config.utterances; ++u) {
    const auto index = static_cast<std::uint64_t>(u);
    Rng label_rng = make_rng({config.seed, split_key, index, kLabelStream});
    Rng noise_rng = make_rng({config.seed, split_key, index, kNoiseStream});
    Rng corrupt_rng = make_rng({config.seed, split_key, index, kCorruptStream});

    Utterance utt;
    utt.true_ids = markov_labels(config.frames, config.vocab, config.self_loop, label_rng);
    std::normal_distribution<double> gauss(0.0, 1.0);
    utt.features.resize(config.frames, config.feature_dim);
    for (int t = 0; t < config.frames; ++t) {
      utt.features.row(t) = means.row(utt.true_ids[t]);
      for (int j = 0; j < config.feature_dim; ++j) {
        utt.features(t, j) += config.sigma * gauss(noise_rng);
        // Stored as float32 on disk; keep memory and file bit-identical.
        utt.features(t, j) = static_cast<float>(utt.features(t, j));
      }
    }
    utt.noisy_ids = corrupt_alignment(utt.true_ids, config.vocab, config.jitter_max,
                                      config.jitter_prob, config.corrupt_prob, corrupt_rng);
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

}  // namespace ctcbert

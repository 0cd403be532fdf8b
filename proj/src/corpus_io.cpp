#include "ctcbert/corpus_io.hpp"

#include "binary_io.hpp"

#include <string>

namespace ctcbert {

namespace {
constexpr std::string_view kCorpusMagic = "CBCP";
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  detail::BinaryWriter w(path);
  w.magic(kCorpusMagic);
  w.u32(kCorpusVersion);
  w.u32(static_cast<std::uint32_t>(corpus.utterances.size()));
  w.u32(static_cast<std::uint32_t>(corpus.vocab));
  w.u32(static_cast<std::uint32_t>(corpus.feature_dim));
  for (const Utterance& u : corpus.utterances) {
    const auto frames = static_cast<Eigen::Index>(u.true_ids.size());
    require(u.features.rows() == frames && u.features.cols() == corpus.feature_dim &&
                static_cast<Eigen::Index>(u.noisy_ids.size()) == frames,
            ErrorKind::LengthMismatch, "utterance arrays disagree on shape");
    w.u32(static_cast<std::uint32_t>(frames));
    for (Eigen::Index i = 0; i < u.features.size(); ++i) {
      w.f32(static_cast<float>(u.features.data()[i]));
    }
    for (int id : u.true_ids) w.i32(id);
    for (int id : u.noisy_ids) w.i32(id);
  }
  w.finish();
}

Corpus read_corpus(const std::filesystem::path& path) {
  detail::BinaryReader r(path);
  r.expect_magic(kCorpusMagic);
  const std::uint32_t version = r.u32();
  require(version == kCorpusVersion, ErrorKind::VersionMismatch,
          "corpus version " + std::to_string(version) + " unsupported");
  Corpus corpus;
  const std::uint32_t count = r.u32();
  corpus.vocab = static_cast<int>(r.u32());
  corpus.feature_dim = static_cast<int>(r.u32());
  require(corpus.vocab >= 1 && corpus.feature_dim >= 1, ErrorKind::VersionMismatch,
          "corpus header has zero dimensions");
  corpus.utterances.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    Utterance u;
    const std::uint32_t frames = r.u32();
    u.features.resize(frames, corpus.feature_dim);
    for (Eigen::Index i = 0; i < u.features.size(); ++i) u.features.data()[i] = r.f32();
    u.true_ids.resize(frames);
    u.noisy_ids.resize(frames);
    for (int& id : u.true_ids) id = r.i32();
    for (int& id : u.noisy_ids) id = r.i32();
    for (size_t t = 0; t < frames; ++t) {
      require(0 <= u.true_ids[t] && u.true_ids[t] < corpus.vocab && 0 <= u.noisy_ids[t] &&
                  u.noisy_ids[t] < corpus.vocab,
              ErrorKind::Io, "corpus id outside [0, V) in utterance " + std::to_string(n));
    }
    corpus.utterances.push_back(std::move(u));
  }
  r.expect_end();
  return corpus;
}

}  // namespace ctcbert

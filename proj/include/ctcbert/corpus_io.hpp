#pragma once

#include "ctcbert/synthesis.hpp"

#include <filesystem>

namespace ctcbert {

inline constexpr std::uint32_t kCorpusVersion = 1;

/// Header (magic "CBCP", version, utterances, V, d), then per utterance its
/// frame count, float32 features row-major, int32 true ids, int32 noisy ids.
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace ctcbert

#pragma once

#include "ctcbert/model.hpp"

#include <filesystem>
#include <variant>

namespace ctcbert {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint32_t kBlankFileVersion = 1;

enum class HeadKind : std::uint32_t { EmbeddingSimilarity = 0, DirectAffine = 1 };

using Checkpoint = std::variant<Model, FinetuneModel>;

/// Parameters are stored as little-endian float32, so a write/read cycle
/// rounds every value to single precision. See docs/file_formats.md.
void write_checkpoint(const std::filesystem::path& path, const Model& model);
void write_checkpoint(const std::filesystem::path& path, const FinetuneModel& model);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Reads a checkpoint and requires the embedding-similarity (pretraining) head.
Model read_pretrained(const std::filesystem::path& path);

/// Rounds every parameter through float32, matching a checkpoint round trip.
template <class M>
void round_to_float(M& model) {
  for (std::span<double> b : blobs(model)) {
    for (double& v : b) v = static_cast<double>(static_cast<float>(v));
  }
}

void write_blank_params(const std::filesystem::path& path, const BlankParams& blank);
BlankParams read_blank_params(const std::filesystem::path& path);

}  // namespace ctcbert

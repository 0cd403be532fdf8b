#pragma once

#include "ctcbert/finetune.hpp"
#include "ctcbert/model.hpp"
#include "ctcbert/synthesis.hpp"
#include "ctcbert/trainer.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctcbert {

/// Everything an experiment needs, set from a flat `key = value` file.
/// `seed`, `vocab` and `feature_dim` are shared by the corpus, model and
/// training sections; `sync()` propagates them.
struct ExperimentConfig {
  CorpusConfig corpus;
  int eval_utterances = 50;
  ModelDims model;
  TrainConfig train;
  FinetuneConfig finetune;
  std::uint64_t seed = 1;

  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  void sync();
  void validate() const;

  /// Every schema key and its value, one `key = value` line each, in schema order.
  std::string to_text() const;

  static const std::vector<std::string>& keys();
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys,
/// duplicate keys and malformed values throw ConfigInvalid naming the line.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace ctcbert

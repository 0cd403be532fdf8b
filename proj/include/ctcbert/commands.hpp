#pragma once

#include "ctcbert/analysis.hpp"
#include "ctcbert/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ctcbert {

namespace fs = std::filesystem;

/// File names written into output directories.
inline constexpr const char* kTrainCorpus = "train.corpus";
inline constexpr const char* kEvalCleanCorpus = "eval_clean.corpus";
inline constexpr const char* kEvalJitteredCorpus = "eval_jittered.corpus";
inline constexpr const char* kModelCheckpoint = "model.ckpt";
inline constexpr const char* kFinetuneCheckpoint = "finetune.ckpt";
inline constexpr const char* kMetricsLog = "metrics.tsv";
inline constexpr const char* kReport = "report.txt";
inline constexpr const char* kSummary = "summary.tsv";
inline constexpr const char* kEffectiveConfig = "effective_config.txt";

/// train with the configured noise; eval_clean with q = r = 0; eval_jittered
/// with the same utterances as eval_clean and boundary jitter only (r = 0).
void cmd_gen_data(const ExperimentConfig& config, const fs::path& out_dir);

/// Pretrains from a seeded initialization; writes model.ckpt and metrics.tsv.
TrainResult cmd_pretrain(const ExperimentConfig& config, const fs::path& corpus_path,
                         const fs::path& out_dir);

ModelComparison cmd_analyze(const ExperimentConfig& config, const fs::path& ce_checkpoint,
                            const fs::path& ctc_checkpoint, const fs::path& eval_clean,
                            const fs::path& eval_jittered, const fs::path& out_dir,
                            std::ostream& console);

BlankParams cmd_export_blank(const fs::path& checkpoint, const fs::path& out_path);

FinetuneResult cmd_finetune(const ExperimentConfig& config, const fs::path& checkpoint,
                            const fs::path& corpus_path,
                            const std::optional<fs::path>& blank_path, const fs::path& out_dir);

/// The initialization used by cmd_pretrain for a given config.
Model initial_model(const ExperimentConfig& config);

}  // namespace ctcbert

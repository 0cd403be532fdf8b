#include "ctcbert/commands.hpp"

#include "ctcbert/checkpoint.hpp"
#include "ctcbert/corpus_io.hpp"
#include "ctcbert/error.hpp"

#include <fstream>
#include <ostream>

namespace ctcbert {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;

void require_dir(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::Io,
          "output directory '" + dir.string() + "' does not exist");
}

void echo_config(const ExperimentConfig& config, const fs::path& dir) {
  std::ofstream out(dir / kEffectiveConfig);
  require(out.good(), ErrorKind::Io, "cannot write '" + (dir / kEffectiveConfig).string() + "'");
  out << config.to_text();
}

}  // namespace

Model initial_model(const ExperimentConfig& config) {
  Rng rng = make_rng({config.seed, kInitStream});
  return init_model(config.model, rng);
}

void cmd_gen_data(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  require_dir(out_dir);

  write_corpus(out_dir / kTrainCorpus, gen_corpus(config.corpus, Split::Train));

  CorpusConfig eval = config.corpus;
  eval.utterances = config.eval_utterances;
  CorpusConfig clean = eval;
  clean.jitter_prob = 0.0;
  clean.corrupt_prob = 0.0;
  CorpusConfig jittered = eval;
  jittered.corrupt_prob = 0.0;
  write_corpus(out_dir / kEvalCleanCorpus, gen_corpus(clean, Split::Eval));
  write_corpus(out_dir / kEvalJitteredCorpus, gen_corpus(jittered, Split::Eval));
  echo_config(config, out_dir);
}

TrainResult cmd_pretrain(const ExperimentConfig& config, const fs::path& corpus_path,
                         const fs::path& out_dir) {
  config.validate();
  require_dir(out_dir);
  const Corpus corpus = read_corpus(corpus_path);
  require(corpus.vocab == config.model.vocab && corpus.feature_dim == config.model.feature_dim,
          ErrorKind::ConfigInvalid,
          "corpus '" + corpus_path.string() + "' has V=" + std::to_string(corpus.vocab) +
              ", d=" + std::to_string(corpus.feature_dim) + " but the config says V=" +
              std::to_string(config.model.vocab) + ", d=" +
              std::to_string(config.model.feature_dim));
  TrainResult result = train(corpus, config.train, initial_model(config));
  write_checkpoint(out_dir / kModelCheckpoint, result.model);
  write_metrics(out_dir / kMetricsLog, result.log);
  echo_config(config, out_dir);
  return result;
}

ModelComparison cmd_analyze(const ExperimentConfig& config, const fs::path& ce_checkpoint,
                            const fs::path& ctc_checkpoint, const fs::path& eval_clean,
                            const fs::path& eval_jittered, const fs::path& out_dir,
                            std::ostream& console) {
  require_dir(out_dir);
  const ModelComparison comparison =
      compare_models(read_pretrained(ce_checkpoint), read_pretrained(ctc_checkpoint),
                     read_corpus(eval_clean), read_corpus(eval_jittered));
  write_report(console, comparison);
  std::ofstream report(out_dir / kReport);
  std::ofstream summary(out_dir / kSummary);
  require(report.good() && summary.good(), ErrorKind::Io,
          "cannot write reports into '" + out_dir.string() + "'");
  write_report(report, comparison);
  write_summary_tsv(summary, comparison);
  echo_config(config, out_dir);
  return comparison;
}

BlankParams cmd_export_blank(const fs::path& checkpoint, const fs::path& out_path) {
  BlankParams blank = extract_blank_params(read_pretrained(checkpoint).head);
  write_blank_params(out_path, blank);
  return blank;
}

FinetuneResult cmd_finetune(const ExperimentConfig& config, const fs::path& checkpoint,
                            const fs::path& corpus_path,
                            const std::optional<fs::path>& blank_path, const fs::path& out_dir) {
  config.validate();
  require_dir(out_dir);
  const Model pretrained = read_pretrained(checkpoint);
  const Corpus corpus = read_corpus(corpus_path);
  std::optional<BlankParams> blank;
  if (blank_path) blank = read_blank_params(*blank_path);

  FinetuneConfig ft = config.finetune;
  const int vocab = ft.vocab > 0 ? ft.vocab : corpus.vocab;
  FinetuneResult result =
      finetune(corpus, ft, make_finetune_model(pretrained, vocab, blank, config.seed));
  write_checkpoint(out_dir / kFinetuneCheckpoint, result.model);
  write_metrics(out_dir / kMetricsLog, result.log);
  echo_config(config, out_dir);
  return result;
}

}  // namespace ctcbert

// ctcbert: generate synthetic corpora, pretrain with CE / CTC / joint
// objectives, finetune with optional blank-parameter transfer, and compare
// posterior degradation between two pretrained models.

#include "ctcbert/commands.hpp"
#include "ctcbert/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<std::int64_t> ce_warmup;
  std::optional<double> mask_p;
  std::optional<int> mask_l;
  std::optional<std::int64_t> steps;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "flat key = value config file");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--set", o.sets, "override any config key (key=value), repeatable");
}

void add_training(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--alpha", o.alpha, "CTC task ratio in [0, 1]");
  cmd->add_option("--ce-warmup", o.ce_warmup, "steps trained with CE only");
  cmd->add_option("--mask-p", o.mask_p, "mask start probability");
  cmd->add_option("--mask-l", o.mask_l, "mask span length");
  cmd->add_option("--steps", o.steps, "training steps");
}

// Config file first, then --set, then the dedicated flags (flags win).
ctcbert::ExperimentConfig build_config(const Overrides& o, bool finetune) {
  ctcbert::ExperimentConfig config =
      o.config_path.empty() ? ctcbert::parse_config("") : ctcbert::load_config(o.config_path);
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    ctcbert::require(eq != std::string::npos, ctcbert::ErrorKind::ConfigInvalid,
                     "--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) config.set("seed", std::to_string(*o.seed));
  if (o.alpha) config.train.mode.alpha = *o.alpha;
  if (o.ce_warmup) config.train.mode.ce_warmup_steps = *o.ce_warmup;
  if (o.mask_p) config.train.mask_prob = *o.mask_p;
  if (o.mask_l) config.train.mask_span = *o.mask_l;
  if (o.steps) {
    if (finetune) {
      config.finetune.steps = *o.steps;
    } else {
      config.train.steps = *o.steps;
    }
  }
  config.sync();
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CTC-over-masked-regions pretraining toolkit"};
  app.require_subcommand(1);

  Overrides o;
  std::string out;
  std::string corpus, checkpoint, ce_ckpt, ctc_ckpt, clean, jittered, blank_path;
  bool freeze_encoder = false;
  std::optional<int> finetune_vocab;

  auto* gen = app.add_subcommand("gen-data", "write train / eval_clean / eval_jittered corpora");
  add_common(gen, o);
  gen->add_option("--out", out, "existing output directory")->required();

  auto* pre = app.add_subcommand("pretrain", "masked pretraining with the joint CE/CTC objective");
  add_common(pre, o);
  add_training(pre, o);
  pre->add_option("corpus", corpus, "training corpus file")->required();
  pre->add_option("--out", out, "existing output directory")->required();

  auto* ft = app.add_subcommand("finetune", "full-utterance CTC finetuning on true ids");
  add_common(ft, o);
  ft->add_option("--steps", o.steps, "finetune steps");
  ft->add_option("checkpoint", checkpoint, "pretrained checkpoint")->required();
  ft->add_option("corpus", corpus, "labeled corpus file")->required();
  ft->add_option("--load-blank", blank_path, "blank parameter file from export-blank");
  ft->add_flag("--freeze-encoder", freeze_encoder, "update only the output head");
  ft->add_option("--vocab", finetune_vocab, "finetune label vocabulary V'");
  ft->add_option("--out", out, "existing output directory")->required();

  auto* an = app.add_subcommand("analyze", "posterior degradation of a CE vs a CTC model");
  add_common(an, o);
  an->add_option("ce_checkpoint", ce_ckpt)->required();
  an->add_option("ctc_checkpoint", ctc_ckpt)->required();
  an->add_option("eval_clean", clean)->required();
  an->add_option("eval_jittered", jittered)->required();
  an->add_option("--out", out, "existing output directory")->required();

  auto* ex = app.add_subcommand("export-blank", "extract blank-related parameters");
  ex->add_option("checkpoint", checkpoint)->required();
  ex->add_option("--out", out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ctcbert::cmd_gen_data(build_config(o, false), out);
    } else if (pre->parsed()) {
      const auto result = ctcbert::cmd_pretrain(build_config(o, false), corpus, out);
      if (!result.log.empty()) {
        std::cout << "final combined loss: " << result.log.back().combined << '\n';
      }
    } else if (ft->parsed()) {
      ctcbert::ExperimentConfig config = build_config(o, true);
      if (freeze_encoder) config.finetune.freeze_encoder = true;
      if (finetune_vocab) config.set("finetune_vocab", std::to_string(*finetune_vocab));
      std::optional<std::filesystem::path> blank;
      if (!blank_path.empty()) blank = blank_path;
      const auto result = ctcbert::cmd_finetune(config, checkpoint, corpus, blank, out);
      if (!result.log.empty()) {
        std::cout << "final finetune loss: " << result.log.back().combined << '\n';
      }
    } else if (an->parsed()) {
      ctcbert::cmd_analyze(build_config(o, false), ce_ckpt, ctc_ckpt, clean, jittered, out,
                           std::cout);
    } else if (ex->parsed()) {
      ctcbert::cmd_export_blank(checkpoint, out);
    }
  } catch (const ctcbert::Error& e) {
    std::cerr << "error[" << ctcbert::to_string(e.kind()) << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

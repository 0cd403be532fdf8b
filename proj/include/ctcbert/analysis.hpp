#pragma once

#include "ctcbert/model.hpp"
#include "ctcbert/synthesis.hpp"

#include <iosfwd>

namespace ctcbert {

enum class Reference { Noisy, True };

/// Frame-weighted mean, over every frame of every utterance, of the softmax
/// probability the unmasked model assigns to the reference id. The blank is
/// part of the normalization but never a reference.
double avg_posterior(const Model& model, const Corpus& dataset,
                     Reference reference = Reference::Noisy);
double avg_posterior(const FinetuneModel& model, const Corpus& dataset,
                     Reference reference = Reference::Noisy);

struct PosteriorReport {
  double clean_prob = 0.0;
  double degraded_prob = 0.0;
  double relative_degradation = 0.0;
};

/// (clean - degraded) / clean. Throws DivisionByZero when clean == 0.
PosteriorReport degradation_report(double clean_prob, double degraded_prob);

struct ModelComparison {
  PosteriorReport ce;
  PosteriorReport ctc;
  bool ctc_more_tolerant = false;  // ctc.relative_degradation < ce.relative_degradation
};

ModelComparison compare_reports(const PosteriorReport& ce, const PosteriorReport& ctc);

/// Both models are scored against noisy_ids of `clean` and of `jittered`.
ModelComparison compare_models(const Model& ce_model, const Model& ctc_model,
                               const Corpus& clean, const Corpus& jittered);

/// "key: value" lines, one report per model.
void write_report(std::ostream& out, const ModelComparison& comparison);
/// Header plus one tab-separated row per model.
void write_summary_tsv(std::ostream& out, const ModelComparison& comparison);

}  // namespace ctcbert

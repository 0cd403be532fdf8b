#include "ctcbert/analysis.hpp"

#include "ctcbert/ctc.hpp"
#include "ctcbert/error.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace ctcbert {

namespace {

template <class M>
double average_reference_prob(const M& model, const Corpus& dataset, Reference reference) {
  require(!dataset.utterances.empty(), ErrorKind::EmptyDataset, "evaluation set is empty");
  require(dataset.feature_dim == model.dims.feature_dim, ErrorKind::DimensionMismatch,
          "evaluation features do not match the model");
  double total = 0.0;
  std::int64_t frames = 0;
  for (const Utterance& utt : dataset.utterances) {
    const IdSequence& ids = reference == Reference::Noisy ? utt.noisy_ids : utt.true_ids;
    const Matrix hidden = encoder_forward(utt.features, model.encoder);
    const Matrix log_probs = log_softmax_rows(compute_logits(hidden, model.head));
    for (size_t t = 0; t < ids.size(); ++t) {
      require(ids[t] < log_probs.cols() - 1, ErrorKind::DimensionMismatch,
              "reference id outside the model vocabulary");
      total += std::exp(log_probs(static_cast<Eigen::Index>(t), ids[t]));
    }
    frames += static_cast<std::int64_t>(ids.size());
  }
  require(frames > 0, ErrorKind::EmptyDataset, "evaluation set has no frames");
  return total / static_cast<double>(frames);
}

void write_one(std::ostream& out, const char* name, const PosteriorReport& r) {
  out << name << ".clean_prob: " << r.clean_prob << '\n'
      << name << ".degraded_prob: " << r.degraded_prob << '\n'
      << name << ".relative_degradation: " << r.relative_degradation << '\n';
}

}  // namespace

double avg_posterior(const Model& model, const Corpus& dataset, Reference reference) {
  return average_reference_prob(model, dataset, reference);
}

double avg_posterior(const FinetuneModel& model, const Corpus& dataset, Reference reference) {
  return average_reference_prob(model, dataset, reference);
}

PosteriorReport degradation_report(double clean_prob, double degraded_prob) {
  require(clean_prob != 0.0, ErrorKind::DivisionByZero,
          "clean posterior is zero; relative degradation undefined");
  return {clean_prob, degraded_prob, (clean_prob - degraded_prob) / clean_prob};
}

ModelComparison compare_reports(const PosteriorReport& ce, const PosteriorReport& ctc) {
  return {ce, ctc, ctc.relative_degradation < ce.relative_degradation};
}

ModelComparison compare_models(const Model& ce_model, const Model& ctc_model,
                               const Corpus& clean, const Corpus& jittered) {
  require(ce_model.dims == ctc_model.dims, ErrorKind::DimensionMismatch,
          "CE and CTC checkpoints have different dimensions");
  const PosteriorReport ce =
      degradation_report(avg_posterior(ce_model, clean), avg_posterior(ce_model, jittered));
  const PosteriorReport ctc =
      degradation_report(avg_posterior(ctc_model, clean), avg_posterior(ctc_model, jittered));
  return compare_reports(ce, ctc);
}

void write_report(std::ostream& out, const ModelComparison& c) {
  out << std::setprecision(10);
  out << "averaging: frame-weighted\n";
  out << "reference: noisy_ids of each evaluation set; blank excluded from references\n";
  write_one(out, "ce", c.ce);
  write_one(out, "ctc", c.ctc);
  out << "verdict.ctc_more_tolerant: " << (c.ctc_more_tolerant ? "true" : "false") << '\n';
}

void write_summary_tsv(std::ostream& out, const ModelComparison& c) {
  out << std::setprecision(10);
  out << "model\tclean_prob\tdegraded_prob\trelative_degradation\n";
  out << "ce\t" << c.ce.clean_prob << '\t' << c.ce.degraded_prob << '\t'
      << c.ce.relative_degradation << '\n';
  out << "ctc\t" << c.ctc.clean_prob << '\t' << c.ctc.degraded_prob << '\t'
      << c.ctc.relative_degradation << '\n';
}

}  // namespace ctcbert

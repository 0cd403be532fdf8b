#pragma once

#include "ctcbert/numerics.hpp"

#include <span>
#include <vector>

namespace ctcbert {

using Labels = std::vector<int>;

/// T x (V+1) matrix of per-frame log-probabilities; column V is the blank.
class LogProbLattice {
 public:
  /// Validates that T >= 1, V >= 1 and that every row normalizes to 1 (1e-9).
  explicit LogProbLattice(Matrix log_probs);

  static LogProbLattice from_logits(const Matrix& logits);

  Eigen::Index frames() const { return log_probs_.rows(); }
  int vocab() const { return static_cast<int>(log_probs_.cols()) - 1; }
  int blank() const { return vocab(); }
  double operator()(Eigen::Index t, int k) const { return log_probs_(t, k); }
  const Matrix& values() const { return log_probs_; }

  /// Rows [start, end) as an independent lattice.
  LogProbLattice slice(Eigen::Index start, Eigen::Index end) const;

 private:
  struct Unchecked {};
  LogProbLattice(Matrix log_probs, Unchecked) : log_probs_(std::move(log_probs)) {}

  Matrix log_probs_;
};

struct CtcResult {
  double loss = 0.0;    // -log p(target | lattice)
  Matrix occupancy;     // gamma_t(k), rows sum to one
  Matrix grad;          // d loss / d logits = softmax - occupancy
};

/// Negative log-likelihood of `target` summed over all blank-extended
/// alignments. Throws Infeasible when target.size() > T. Targets with
/// adjacent repeats that need more than T frames yield +inf.
double ctc_loss(const LogProbLattice& lattice, std::span<const int> target);

/// Gradient of ctc_loss with respect to the pre-softmax logits.
Matrix ctc_grad(const LogProbLattice& lattice, std::span<const int> target);

/// Loss, occupancy and gradient from a single forward-backward pass.
CtcResult ctc_forward_backward(const LogProbLattice& lattice, std::span<const int> target);

/// The collapse map: merge adjacent repeats, then drop blanks.
Labels collapse_path(std::span<const int> path, int blank);

/// Exhaustive sum over every length-T path; the test oracle for ctc_loss.
/// Throws TooLarge when (V+1)^T exceeds 1e7.
double brute_force_ctc(const LogProbLattice& lattice, std::span<const int> target);

/// Per-frame argmax (lowest index on ties) followed by collapse_path.
Labels greedy_collapse(const LogProbLattice& lattice);

}  // namespace ctcbert

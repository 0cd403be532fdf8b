#include "ctcbert/ctc.hpp"

#include "ctcbert/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ctcbert {

LogProbLattice::LogProbLattice(Matrix log_probs) : log_probs_(std::move(log_probs)) {
  require(log_probs_.rows() >= 1, ErrorKind::DimensionMismatch, "lattice needs at least one frame");
  require(log_probs_.cols() >= 2, ErrorKind::DimensionMismatch,
          "lattice needs at least one label column plus the blank");
  for (Eigen::Index t = 0; t < log_probs_.rows(); ++t) {
    const double total = log_probs_.row(t).array().exp().sum();
    require(std::abs(total - 1.0) <= 1e-9, ErrorKind::DimensionMismatch,
            "lattice row " + std::to_string(t) + " is not a log-distribution");
  }
}

LogProbLattice LogProbLattice::from_logits(const Matrix& logits) {
  require(logits.rows() >= 1 && logits.cols() >= 2, ErrorKind::DimensionMismatch,
          "logits must be at least 1 x 2");
  return LogProbLattice(log_softmax_rows(logits), Unchecked{});
}

LogProbLattice LogProbLattice::slice(Eigen::Index start, Eigen::Index end) const {
  require(0 <= start && start < end && end <= frames(), ErrorKind::DimensionMismatch,
          "lattice slice out of range");
  return LogProbLattice(log_probs_.middleRows(start, end - start), Unchecked{});
}

namespace {

void check_target(const LogProbLattice& lattice, std::span<const int> target) {
  require(static_cast<Eigen::Index>(target.size()) <= lattice.frames(), ErrorKind::Infeasible,
          "target length " + std::to_string(target.size()) + " exceeds " +
              std::to_string(lattice.frames()) + " frames");
  for (int id : target) {
    require(0 <= id && id < lattice.vocab(), ErrorKind::DimensionMismatch,
            "target id " + std::to_string(id) + " outside [0, V)");
  }
}

// Extended label sequence: blank, y1, blank, y2, ..., yU, blank.
std::vector<int> extend(std::span<const int> target, int blank) {
  std::vector<int> ext(2 * target.size() + 1, blank);
  for (size_t u = 0; u < target.size(); ++u) ext[2 * u + 1] = target[u];
  return ext;
}

bool can_skip(const std::vector<int>& ext, size_t s, int blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

}  // namespace

CtcResult ctc_forward_backward(const LogProbLattice& lattice, std::span<const int> target) {
  check_target(lattice, target);
  const Matrix& lp = lattice.values();
  const Eigen::Index frames = lattice.frames();
  const int blank = lattice.blank();
  const std::vector<int> ext = extend(target, blank);
  const size_t states = ext.size();

  Matrix alpha = Matrix::Constant(frames, static_cast<Eigen::Index>(states), kNegInf);
  Matrix beta = alpha;

  alpha(0, 0) = lp(0, blank);
  if (states > 1) alpha(0, 1) = lp(0, ext[1]);
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (size_t s = 0; s < states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (can_skip(ext, s, blank)) acc = log_add(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) alpha(t, s) = acc + lp(t, ext[s]);
    }
  }

  const Eigen::Index last = frames - 1;
  beta(last, states - 1) = lp(last, blank);
  if (states > 1) beta(last, states - 2) = lp(last, ext[states - 2]);
  for (Eigen::Index t = last - 1; t >= 0; --t) {
    for (size_t s = 0; s < states; ++s) {
      double acc = beta(t + 1, s);
      if (s + 1 < states) acc = log_add(acc, beta(t + 1, s + 1));
      if (s + 2 < states && can_skip(ext, s + 2, blank)) acc = log_add(acc, beta(t + 1, s + 2));
      if (acc != kNegInf) beta(t, s) = acc + lp(t, ext[s]);
    }
  }

  double log_likelihood = alpha(last, states - 1);
  if (states > 1) log_likelihood = log_add(log_likelihood, alpha(last, states - 2));

  CtcResult result;
  result.loss = -log_likelihood;
  if (log_likelihood == kNegInf) {
    result.loss = std::numeric_limits<double>::infinity();
    return result;
  }

  // alpha and beta both include the emission at t, so divide it out once.
  result.occupancy = Matrix::Zero(frames, lp.cols());
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (size_t s = 0; s < states; ++s) {
      const double a = alpha(t, s);
      const double b = beta(t, s);
      if (a == kNegInf || b == kNegInf) continue;
      result.occupancy(t, ext[s]) += std::exp(a + b - lp(t, ext[s]) - log_likelihood);
    }
  }
  result.grad = lp.array().exp().matrix() - result.occupancy;
  return result;
}

double ctc_loss(const LogProbLattice& lattice, std::span<const int> target) {
  return ctc_forward_backward(lattice, target).loss;
}

Matrix ctc_grad(const LogProbLattice& lattice, std::span<const int> target) {
  CtcResult result = ctc_forward_backward(lattice, target);
  require(std::isfinite(result.loss), ErrorKind::Infeasible,
          "target is unreachable within the lattice; gradient undefined");
  return std::move(result.grad);
}

Labels collapse_path(std::span<const int> path, int blank) {
  Labels out;
  int previous = -1;
  for (int symbol : path) {
    if (symbol != previous && symbol != blank) out.push_back(symbol);
    previous = symbol;
  }
  return out;
}

double brute_force_ctc(const LogProbLattice& lattice, std::span<const int> target) {
  const auto frames = static_cast<int>(lattice.frames());
  const int symbols = lattice.vocab() + 1;
  double count = 1.0;
  for (int t = 0; t < frames; ++t) count *= symbols;
  require(count <= 1e7, ErrorKind::TooLarge,
          "brute-force enumeration of " + std::to_string(count) + " paths exceeds 1e7");

  const Labels wanted(target.begin(), target.end());
  std::vector<int> path(frames, 0);
  double log_total = kNegInf;
  while (true) {
    if (collapse_path(path, lattice.blank()) == wanted) {
      double log_p = 0.0;
      for (int t = 0; t < frames; ++t) log_p += lattice(t, path[t]);
      log_total = log_add(log_total, log_p);
    }
    int t = frames - 1;
    while (t >= 0 && ++path[t] == symbols) path[t--] = 0;
    if (t < 0) break;
  }
  return -log_total;
}

Labels greedy_collapse(const LogProbLattice& lattice) {
  std::vector<int> path(lattice.frames());
  for (Eigen::Index t = 0; t < lattice.frames(); ++t) {
    int best = 0;
    for (int k = 1; k <= lattice.vocab(); ++k) {
      if (lattice(t, k) > lattice(t, best)) best = k;
    }
    path[t] = best;
  }
  return collapse_path(path, lattice.blank());
}

}  // namespace ctcbert

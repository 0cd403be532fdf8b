#pragma once

#include "ctcbert/ctc.hpp"
#include "ctcbert/masking.hpp"
#include "ctcbert/numerics.hpp"

#include <random>
#include <vector>

namespace ctcbert::testing {

inline Matrix random_logits(Eigen::Index frames, int classes, Rng& rng, double scale = 1.5) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix m(frames, classes);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = gauss(rng);
  return m;
}

inline LogProbLattice random_lattice(Eigen::Index frames, int vocab, Rng& rng) {
  return LogProbLattice::from_logits(random_logits(frames, vocab + 1, rng));
}

/// Random label sequence without adjacent repeats.
inline Labels random_target(int length, int vocab, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  Labels out;
  while (static_cast<int>(out.size()) < length) {
    const int id = pick(rng);
    if (out.empty() || out.back() != id || vocab == 1) out.push_back(id);
  }
  return out;
}

inline std::vector<double> flatten(const Matrix& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

inline Matrix unflatten(std::span<const double> x, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  std::copy(x.begin(), x.end(), m.data());
  return m;
}

}  // namespace ctcbert::testing

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ctcbert {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct AdamState {
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::int64_t steps = 0;
};

/// AdamW: p <- p * (1 - lr * wd) - lr * m_hat / (sqrt(v_hat) + eps).
/// State is sized lazily on the first call; shapes must stay fixed after that.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamHyper& hyper);

}  // namespace ctcbert

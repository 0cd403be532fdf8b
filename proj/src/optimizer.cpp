#include "ctcbert/optimizer.hpp"

#include "ctcbert/error.hpp"

#include <cmath>

namespace ctcbert {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state,
               const AdamHyper& hyper) {
  require(params.size() == grads.size(), ErrorKind::ShapeMismatch,
          "parameter and gradient blob counts differ");
  if (state.first.empty()) {
    for (std::span<double> p : params) {
      state.first.emplace_back(p.size(), 0.0);
      state.second.emplace_back(p.size(), 0.0);
    }
  }
  require(state.first.size() == params.size(), ErrorKind::ShapeMismatch,
          "optimizer state holds a different number of blobs");
  for (size_t b = 0; b < params.size(); ++b) {
    require(params[b].size() == grads[b].size() && params[b].size() == state.first[b].size(),
            ErrorKind::ShapeMismatch, "blob " + std::to_string(b) + " changed shape");
  }

  ++state.steps;
  const double correction1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.steps));
  const double correction2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.steps));
  const double decay = 1.0 - hyper.lr * hyper.weight_decay;
  for (size_t b = 0; b < params.size(); ++b) {
    std::span<double> p = params[b];
    std::span<const double> g = grads[b];
    std::vector<double>& m = state.first[b];
    std::vector<double>& v = state.second[b];
    for (size_t i = 0; i < p.size(); ++i) {
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] = p[i] * decay - hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

}  // namespace ctcbert

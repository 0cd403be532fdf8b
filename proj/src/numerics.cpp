#include "ctcbert/numerics.hpp"

#include <algorithm>
#include <cassert>

namespace ctcbert {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double max = *std::max_element(values.begin(), values.end());
  assert(!std::isnan(max));
  if (max == kNegInf) return kNegInf;
  if (std::isinf(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

Vector row_log_sum_exp(const Matrix& values) {
  Vector out(values.rows());
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out[r] = log_sum_exp(std::span<const double>(values.row(r).data(),
                                                 static_cast<size_t>(values.cols())));
  }
  return out;
}

Vector log_softmax(const Vector& logits) {
  const double lse = log_sum_exp(std::span<const double>(logits.data(), logits.size()));
  return logits.array() - lse;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  const Vector lse = row_log_sum_exp(logits);
  out.colwise() -= lse;
  return out;
}

double check_gradient(const ScalarFunction& f, std::span<const double> x,
                      std::span<const double> analytic, double eps) {
  assert(x.size() == analytic.size());
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = f(probe);
    probe[i] = saved - eps;
    const double down = f(probe);
    probe[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double denom = std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

}  // namespace ctcbert

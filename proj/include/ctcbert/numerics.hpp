#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace ctcbert {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow; kNegInf is the additive identity.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

/// log(sum(exp(values))). The empty sum is kNegInf.
double log_sum_exp(std::span<const double> values);

/// Row-wise log_sum_exp of a matrix.
Vector row_log_sum_exp(const Matrix& values);

Vector log_softmax(const Vector& logits);

/// Applies log_softmax to every row.
Matrix log_softmax_rows(const Matrix& logits);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Compares `analytic` against central differences of `f` around `x`.
/// Returns max_i |fd_i - analytic_i| / max(1, |analytic_i|).
double check_gradient(const ScalarFunction& f, std::span<const double> x,
                      std::span<const double> analytic, double eps = 1e-5);

}  // namespace ctcbert

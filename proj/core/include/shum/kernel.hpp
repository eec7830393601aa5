#pragma once

#include <cmath>
#include <cstddef>

#include "shum/data_model.hpp"

namespace shum {

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Logistic function evaluated on the branch that never overflows.
inline double logistic(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Standard normal CDF through erfc so both tails keep full relative accuracy.
inline double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z * kInvSqrt2); }

inline double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Unchecked kernel value and derivative (w.r.t. x, including the 1/lambda factor).
inline double kernel_value(KernelKind kind, double x, double inv_lambda) noexcept {
  const double z = x * inv_lambda;
  return kind == KernelKind::Sigmoid ? logistic(z) : normal_cdf(z);
}

inline double kernel_slope(KernelKind kind, double x, double inv_lambda) noexcept {
  const double z = x * inv_lambda;
  if (kind == KernelKind::Sigmoid) {
    const double s = logistic(z);
    const double t = logistic(-z);
    return s * t * inv_lambda;
  }
  return normal_pdf(z) * inv_lambda;
}

}  // namespace detail

/// g(x / lambda) for the logistic or standard normal CDF.
double kernel_eval(KernelKind kind, double x, double lambda);

/// d/dx g(x / lambda) = g'(x / lambda) / lambda.
double kernel_deriv(KernelKind kind, double x, double lambda);

/// 1 / sqrt(n_total).
double default_lambda(std::size_t n_total);

}  // namespace shum

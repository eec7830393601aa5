#include "shum/kernel.hpp"

namespace shum {
namespace {

double checked_inverse(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive, got " + std::to_string(lambda));
  }
  return 1.0 / lambda;
}

}  // namespace

double kernel_eval(KernelKind kind, double x, double lambda) {
  return detail::kernel_value(kind, x, checked_inverse(lambda));
}

double kernel_deriv(KernelKind kind, double x, double lambda) {
  return detail::kernel_slope(kind, x, checked_inverse(lambda));
}

double default_lambda(std::size_t n_total) {
  if (n_total < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
  return 1.0 / std::sqrt(static_cast<double>(n_total));
}

}  // namespace shum

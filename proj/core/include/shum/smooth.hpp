#pragma once

#include <cstddef>
#include <vector>

#include "shum/data_model.hpp"

namespace shum {

/// Factorised form of the smoothed HUM. The tuple sum is a chain of
/// adjacent-category kernels, so it equals 1' A_{M-1} ... A_1 1 with
/// A_j[a, b] = g(s_{j+1}[a] - s_j[b]); prefix vectors w_j = A_{j-1} w_{j-1}
/// and suffix vectors u_j = A_j' u_{j+1} give the value at any split point.
///
/// Single use: build it for one score set and read the results. Not meant
/// to be shared across threads while being filled.
class ChainWorkspace {
 public:
  ChainWorkspace(const Scores& scores, const SmoothingSpec& spec, bool with_slopes = false);

  std::size_t num_categories() const noexcept { return prefix_.size(); }

  /// Kernel matrix between category j and j+1 (rows index category j+1).
  const Eigen::MatrixXd& adjacency(std::size_t j) const { return adjacency_.at(j); }
  /// Same shape, kernel derivatives; empty unless built with slopes.
  const Eigen::MatrixXd& slopes(std::size_t j) const { return slopes_.at(j); }
  const Eigen::VectorXd& prefix(std::size_t j) const { return prefix_.at(j); }
  const Eigen::VectorXd& suffix(std::size_t j) const { return suffix_.at(j); }

  /// Smoothed HUM reconstructed as u_j' w_j / prod(n); any j gives the same value.
  double value_at_split(std::size_t j) const;
  double value() const { return value_at_split(num_categories() - 1); }

  /// Product of category sizes as a double.
  double tuple_count() const noexcept { return tuple_count_; }

 private:
  std::vector<Eigen::MatrixXd> adjacency_;
  std::vector<Eigen::MatrixXd> slopes_;
  std::vector<Eigen::VectorXd> prefix_;
  std::vector<Eigen::VectorXd> suffix_;
  double tuple_count_ = 1.0;
};

/// Smoothed empirical HUM of precomputed scores.
double shum_value(const Scores& scores, const SmoothingSpec& spec);

/// Smoothed empirical HUM of beta' X.
double shum_value(const MarkerDataset& data, const Eigen::VectorXd& beta, const SmoothingSpec& spec);

struct SmoothEvaluation {
  double value = 0.0;
  /// Derivative with respect to the free coefficients (anchor removed).
  Eigen::VectorXd gradient;
};

/// Value and gradient sharing one workspace. beta[anchor] must equal 1.
SmoothEvaluation shum_value_and_gradient(const MarkerDataset& data, const Eigen::VectorXd& beta,
                                         const SmoothingSpec& spec, std::size_t anchor);

Eigen::VectorXd shum_gradient(const MarkerDataset& data, const Eigen::VectorXd& beta,
                              const SmoothingSpec& spec, std::size_t anchor);

/// Fraction of adjacent-category cross pairs with |beta'(X_{j+1} - X_j)| / lambda > 5.
double lambda_rule_check(const MarkerDataset& data, const Eigen::VectorXd& beta, double lambda);

/// Pairs with |x / lambda| above this count as "well separated".
inline constexpr double kLambdaRuleThreshold = 5.0;
/// Below this fraction of well-separated pairs, callers should warn.
inline constexpr double kLambdaRuleWarnFraction = 0.9;

}  // namespace shum

#pragma once

#include <cstddef>
#include <span>

#include "shum/data_model.hpp"

namespace shum {

/// Exact tuple counts can exceed 2^64 for moderately many categories.
__extension__ typedef unsigned __int128 TupleCount;

/// Empirical HUM as an exact fraction ordered / n_tuples.
struct HumValue {
  TupleCount ordered = 0;
  TupleCount n_tuples = 1;

  double value() const noexcept {
    return static_cast<double>(ordered) / static_cast<double>(n_tuples);
  }
};

/// Largest product of category sizes ehum_bruteforce accepts.
inline constexpr double kBruteForceTupleLimit = 1e7;

/// Enumerates every M-tuple and counts strictly increasing chains.
HumValue ehum_bruteforce(const Scores& scores);

/// Same count in O(sum n_j log n_j): sort each category, then propagate chain
/// counts across adjacent categories with a two-pointer prefix sum.
HumValue ehum_fast(const Scores& scores);

enum class HumMode { Fast, Verify };

/// Verify runs both paths and throws VerificationMismatch if the counts differ.
HumValue evaluate_ehum(const Scores& scores, HumMode mode = HumMode::Fast);

/// Convenience: ehum_fast(project_scores(data, beta)).value().
double ehum(const MarkerDataset& data, const Eigen::VectorXd& beta);

/// Fraction of (low, high) pairs with high > low (ties count as failures).
double pairwise_auc(std::span<const double> scores_low, std::span<const double> scores_high);

/// 1 / M!
double random_guess_baseline(std::size_t num_categories);

}  // namespace shum

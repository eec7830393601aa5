#include "shum/hum.hpp"

#include <algorithm>
#include <limits>

namespace shum {
namespace {

void validate(const Scores& scores) {
  if (scores.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoCategories, "HUM needs at least two categories");
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j].empty()) {
      throw Error(ErrorCode::EmptyCategory, "score vector " + std::to_string(j) + " is empty");
    }
  }
}

TupleCount tuple_total(const Scores& scores) {
  constexpr TupleCount kMax = std::numeric_limits<TupleCount>::max();
  TupleCount total = 1;
  for (const auto& s : scores) {
    if (total > kMax / s.size()) throw Error(ErrorCode::InstanceTooLarge, "tuple count overflows");
    total *= s.size();
  }
  return total;
}

}  // namespace

HumValue ehum_bruteforce(const Scores& scores) {
  validate(scores);
  const TupleCount total = tuple_total(scores);
  if (static_cast<double>(total) > kBruteForceTupleLimit) {
    throw Error(ErrorCode::InstanceTooLarge,
                "brute force limited to " + std::to_string(static_cast<long long>(kBruteForceTupleLimit)) +
                    " tuples");
  }
  const std::size_t m = scores.size();
  std::vector<std::size_t> idx(m, 0);
  TupleCount ordered = 0;
  while (true) {
    bool chain = true;
    for (std::size_t j = 1; j < m && chain; ++j) {
      chain = scores[j][idx[j]] > scores[j - 1][idx[j - 1]];
    }
    if (chain) ++ordered;
    // odometer increment, last category fastest
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (++idx[j] < scores[j].size()) break;
      idx[j] = 0;
      if (j == 0) return HumValue{ordered, total};
    }
  }
}

HumValue ehum_fast(const Scores& scores) {
  validate(scores);
  const TupleCount total = tuple_total(scores);

  std::vector<double> prev_sorted(scores[0]);
  std::sort(prev_sorted.begin(), prev_sorted.end());
  std::vector<TupleCount> prev_counts(prev_sorted.size(), 1);

  for (std::size_t j = 1; j < scores.size(); ++j) {
    std::vector<double> cur_sorted(scores[j]);
    std::sort(cur_sorted.begin(), cur_sorted.end());
    std::vector<TupleCount> cur_counts(cur_sorted.size(), 0);
    // chains ending at x = sum of chains ending at strictly smaller y in j-1
    TupleCount running = 0;
    std::size_t p = 0;
    for (std::size_t i = 0; i < cur_sorted.size(); ++i) {
      while (p < prev_sorted.size() && prev_sorted[p] < cur_sorted[i]) running += prev_counts[p++];
      cur_counts[i] = running;
    }
    prev_sorted = std::move(cur_sorted);
    prev_counts = std::move(cur_counts);
  }

  TupleCount ordered = 0;
  for (TupleCount c : prev_counts) ordered += c;
  return HumValue{ordered, total};
}

HumValue evaluate_ehum(const Scores& scores, HumMode mode) {
  HumValue fast = ehum_fast(scores);
  if (mode == HumMode::Verify) {
    const HumValue brute = ehum_bruteforce(scores);
    if (brute.ordered != fast.ordered || brute.n_tuples != fast.n_tuples) {
      throw Error(ErrorCode::VerificationMismatch, "fast and brute-force HUM counts differ");
    }
  }
  return fast;
}

double ehum(const MarkerDataset& data, const Eigen::VectorXd& beta) {
  return ehum_fast(project_scores(data, beta)).value();
}

double pairwise_auc(std::span<const double> scores_low, std::span<const double> scores_high) {
  if (scores_low.empty() || scores_high.empty()) {
    throw Error(ErrorCode::EmptyInput, "AUC needs two nonempty samples");
  }
  std::vector<double> high(scores_high.begin(), scores_high.end());
  std::sort(high.begin(), high.end());
  std::uint64_t count = 0;
  for (double v : scores_low) {
    count += static_cast<std::uint64_t>(high.end() - std::upper_bound(high.begin(), high.end(), v));
  }
  return static_cast<double>(count) /
         (static_cast<double>(scores_low.size()) * static_cast<double>(scores_high.size()));
}

double random_guess_baseline(std::size_t num_categories) {
  if (num_categories < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 categories");
  double factorial = 1.0;
  for (std::size_t k = 2; k <= num_categories; ++k) factorial *= static_cast<double>(k);
  return 1.0 / factorial;
}

}  // namespace shum

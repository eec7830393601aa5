#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "shum/error.hpp"

namespace shum {

/// One score vector per category, categories in ascending severity.
using Scores = std::vector<std::vector<double>>;

/// Per-category marker matrices (rows are subjects, columns are markers),
/// ordered by ascending severity. Immutable once built; all entries finite.
class MarkerDataset {
 public:
  /// Validates M >= 2, d >= 1, every n_j >= 1, consistent widths and finite
  /// entries. Empty name lists are filled with defaults ("x1".., "0"..).
  static MarkerDataset create(std::vector<Eigen::MatrixXd> categories,
                              std::vector<std::string> marker_names = {},
                              std::vector<std::string> category_labels = {});

  std::size_t num_categories() const noexcept { return categories_.size(); }
  std::size_t num_markers() const noexcept { return marker_names_.size(); }
  std::size_t category_size(std::size_t j) const { return categories_.at(j).rows(); }
  std::vector<std::size_t> category_sizes() const;
  std::size_t total_size() const noexcept;

  const Eigen::MatrixXd& category(std::size_t j) const { return categories_.at(j); }
  const std::vector<Eigen::MatrixXd>& categories() const noexcept { return categories_; }
  const std::vector<std::string>& marker_names() const noexcept { return marker_names_; }
  const std::vector<std::string>& category_labels() const noexcept { return category_labels_; }

  /// Dataset restricted to the given marker columns, in the given order.
  MarkerDataset select_markers(const std::vector<std::size_t>& columns) const;

  /// Same labels, new values; used by resampling and transforms.
  MarkerDataset with_categories(std::vector<Eigen::MatrixXd> categories) const;

  bool operator==(const MarkerDataset& other) const;

 private:
  MarkerDataset() = default;

  std::vector<Eigen::MatrixXd> categories_;
  std::vector<std::string> marker_names_;
  std::vector<std::string> category_labels_;
};

/// Combination vector normalised so that beta[anchor] == 1.
class Coefficients {
 public:
  /// Throws InvalidArgument unless beta[anchor] == 1 exactly.
  Coefficients(Eigen::VectorXd beta, std::size_t anchor);

  /// Builds beta from the d-1 free components.
  static Coefficients from_theta(const Eigen::VectorXd& theta, std::size_t anchor);

  /// Divides by beta[anchor]; requires that component to be strictly positive
  /// so the induced ordering of scores is unchanged.
  static Coefficients normalized(const Eigen::VectorXd& direction, std::size_t anchor);

  const Eigen::VectorXd& beta() const noexcept { return beta_; }
  std::size_t anchor() const noexcept { return anchor_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(beta_.size()); }
  Eigen::VectorXd theta() const;

  Coefficients rescaled(std::size_t new_anchor) const;
  Eigen::VectorXd unit_norm() const { return beta_ / beta_.norm(); }

 private:
  Eigen::VectorXd beta_;
  std::size_t anchor_;
};

enum class KernelKind { Sigmoid, NormalCdf };

struct SmoothingSpec {
  KernelKind kernel = KernelKind::Sigmoid;
  double lambda = 1.0;

  /// Throws NonPositiveLambda unless lambda > 0 and finite.
  static SmoothingSpec make(KernelKind kernel, double lambda);
};

enum class Method {
  SSHUM,
  NSHUM,
  Empirical,
  ParametricNormal,
  MinMax,
  FrechetUpper,
  FrechetLower,
  Naive,
};

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name);

struct BootstrapSummary {
  std::size_t replicates = 0;
  std::size_t failed_replicates = 0;
  std::size_t anchor = 0;
  /// SDs of the coefficients rescaled to the full-data anchor; replicates whose
  /// anchor component is not positive are excluded (count in anchored_used).
  Eigen::VectorXd coef_se;
  std::size_t anchored_used = 0;
  /// SDs of unit-norm coefficients; all successful replicates contribute.
  Eigen::VectorXd unit_coef_se;
  double ehum_se = 0.0;
  std::vector<std::uint64_t> replicate_seeds;
};

struct FitReport {
  Method method = Method::Naive;
  /// For MinMax the two entries weight (row max, row min) with max anchored.
  Coefficients coefficients{Eigen::VectorXd::Ones(1), 0};
  std::vector<std::string> coefficient_names;
  double ehum_at_solution = 0.0;
  double objective_at_solution = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  std::optional<double> lambda;
  std::vector<std::size_t> marker_ordering;
  std::optional<BootstrapSummary> bootstrap;
};

/// Entry i of vector j is the dot product of beta with row i of category j.
Scores project_scores(const MarkerDataset& data, const Eigen::VectorXd& beta);

Eigen::VectorXd anchored_to_full(const Eigen::VectorXd& theta, std::size_t anchor);
Eigen::VectorXd extract_theta(const Eigen::VectorXd& beta, std::size_t anchor);

struct CsvLoadResult {
  MarkerDataset data;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

/// Reads a header-mandatory CSV. Outcome codes are rank-mapped to categories
/// in ascending order; rows with an empty or "NA" cell in the outcome or any
/// marker column are dropped (complete-case).
CsvLoadResult load_csv(const std::filesystem::path& path, std::string_view outcome_column,
                       const std::vector<std::string>& marker_columns);

/// Writes the dataset in the format load_csv reads (17 significant digits).
void write_csv(const MarkerDataset& data, const std::filesystem::path& path,
               std::string_view outcome_column = "outcome");

}  // namespace shum

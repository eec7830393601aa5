#include "shum/data_model.hpp"

#include <cmath>

namespace shum {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::FewerThanTwoCategories: return "FewerThanTwoCategories";
    case ErrorCode::EmptyCategory: return "EmptyCategory";
    case ErrorCode::UnparseableNumeric: return "UnparseableNumeric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::SmoothObjectiveRequired: return "SmoothObjectiveRequired";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::WrongCategoryCount: return "WrongCategoryCount";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::BootstrapUnstable: return "BootstrapUnstable";
    case ErrorCode::StudyUnstable: return "StudyUnstable";
    case ErrorCode::VerificationMismatch: return "VerificationMismatch";
  }
  return "Unknown";
}

MarkerDataset MarkerDataset::create(std::vector<Eigen::MatrixXd> categories,
                                    std::vector<std::string> marker_names,
                                    std::vector<std::string> category_labels) {
  if (categories.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoCategories,
                "need at least 2 categories, got " + std::to_string(categories.size()));
  }
  const auto d = categories.front().cols();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need at least one marker");
  for (std::size_t j = 0; j < categories.size(); ++j) {
    const auto& c = categories[j];
    if (c.rows() < 1) {
      throw Error(ErrorCode::EmptyCategory, "category " + std::to_string(j) + " is empty");
    }
    if (c.cols() != d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "category " + std::to_string(j) + " has " + std::to_string(c.cols()) +
                      " markers, expected " + std::to_string(d));
    }
    if (!c.allFinite()) {
      throw Error(ErrorCode::InvalidArgument,
                  "category " + std::to_string(j) + " contains non-finite values");
    }
  }
  if (marker_names.empty()) {
    for (Eigen::Index k = 0; k < d; ++k) marker_names.push_back("x" + std::to_string(k + 1));
  }
  if (static_cast<Eigen::Index>(marker_names.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch, "marker name count does not match columns");
  }
  if (category_labels.empty()) {
    for (std::size_t j = 0; j < categories.size(); ++j) category_labels.push_back(std::to_string(j));
  }
  if (category_labels.size() != categories.size()) {
    throw Error(ErrorCode::DimensionMismatch, "category label count does not match categories");
  }
  MarkerDataset out;
  out.categories_ = std::move(categories);
  out.marker_names_ = std::move(marker_names);
  out.category_labels_ = std::move(category_labels);
  return out;
}

std::vector<std::size_t> MarkerDataset::category_sizes() const {
  std::vector<std::size_t> sizes;
  sizes.reserve(categories_.size());
  for (const auto& c : categories_) sizes.push_back(static_cast<std::size_t>(c.rows()));
  return sizes;
}

std::size_t MarkerDataset::total_size() const noexcept {
  std::size_t n = 0;
  for (const auto& c : categories_) n += static_cast<std::size_t>(c.rows());
  return n;
}

MarkerDataset MarkerDataset::select_markers(const std::vector<std::size_t>& columns) const {
  std::vector<Eigen::MatrixXd> cats;
  cats.reserve(categories_.size());
  std::vector<std::string> names;
  for (std::size_t k : columns) {
    if (k >= num_markers()) throw Error(ErrorCode::IndexOutOfRange, "marker column out of range");
    names.push_back(marker_names_[k]);
  }
  for (const auto& c : categories_) {
    Eigen::MatrixXd sub(c.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
      sub.col(static_cast<Eigen::Index>(k)) = c.col(static_cast<Eigen::Index>(columns[k]));
    }
    cats.push_back(std::move(sub));
  }
  return create(std::move(cats), std::move(names), category_labels_);
}

MarkerDataset MarkerDataset::with_categories(std::vector<Eigen::MatrixXd> categories) const {
  return create(std::move(categories), marker_names_, category_labels_);
}

bool MarkerDataset::operator==(const MarkerDataset& other) const {
  if (marker_names_ != other.marker_names_ || category_labels_ != other.category_labels_ ||
      categories_.size() != other.categories_.size()) {
    return false;
  }
  for (std::size_t j = 0; j < categories_.size(); ++j) {
    const auto& a = categories_[j];
    const auto& b = other.categories_[j];
    if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
  }
  return true;
}

Coefficients::Coefficients(Eigen::VectorXd beta, std::size_t anchor)
    : beta_(std::move(beta)), anchor_(anchor) {
  if (anchor_ >= static_cast<std::size_t>(beta_.size())) {
    throw Error(ErrorCode::IndexOutOfRange, "anchor index " + std::to_string(anchor_) +
                                                " outside coefficient vector of length " +
                                                std::to_string(beta_.size()));
  }
  if (beta_[static_cast<Eigen::Index>(anchor_)] != 1.0) {
    throw Error(ErrorCode::InvalidArgument, "anchored coefficient must equal 1");
  }
}

Coefficients Coefficients::from_theta(const Eigen::VectorXd& theta, std::size_t anchor) {
  return Coefficients(anchored_to_full(theta, anchor), anchor);
}

Coefficients Coefficients::normalized(const Eigen::VectorXd& direction, std::size_t anchor) {
  if (anchor >= static_cast<std::size_t>(direction.size())) {
    throw Error(ErrorCode::IndexOutOfRange, "anchor index out of range");
  }
  const double pivot = direction[static_cast<Eigen::Index>(anchor)];
  if (!(pivot > 0.0) || !std::isfinite(pivot)) {
    throw Error(ErrorCode::InvalidArgument,
                "anchored component must be positive to preserve the score ordering");
  }
  Eigen::VectorXd beta = direction / pivot;
  beta[static_cast<Eigen::Index>(anchor)] = 1.0;
  return Coefficients(std::move(beta), anchor);
}

Eigen::VectorXd Coefficients::theta() const { return extract_theta(beta_, anchor_); }

Coefficients Coefficients::rescaled(std::size_t new_anchor) const {
  return normalized(beta_, new_anchor);
}

SmoothingSpec SmoothingSpec::make(KernelKind kernel, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "smoothing parameter must be positive");
  }
  return SmoothingSpec{kernel, lambda};
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::SSHUM: return "sshum";
    case Method::NSHUM: return "nshum";
    case Method::Empirical: return "empirical";
    case Method::ParametricNormal: return "parametric";
    case Method::MinMax: return "minmax";
    case Method::FrechetUpper: return "frechet";
    case Method::FrechetLower: return "frechet-lower";
    case Method::Naive: return "naive";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::SSHUM, Method::NSHUM, Method::Empirical, Method::ParametricNormal,
                   Method::MinMax, Method::FrechetUpper, Method::FrechetLower, Method::Naive}) {
    if (name == to_string(m)) return m;
  }
  if (name == "frechet-upper") return Method::FrechetUpper;
  return std::nullopt;
}

Scores project_scores(const MarkerDataset& data, const Eigen::VectorXd& beta) {
  if (static_cast<std::size_t>(beta.size()) != data.num_markers()) {
    throw Error(ErrorCode::DimensionMismatch,
                "coefficient length " + std::to_string(beta.size()) + " but dataset has " +
                    std::to_string(data.num_markers()) + " markers");
  }
  Scores scores;
  scores.reserve(data.num_categories());
  for (const auto& c : data.categories()) {
    Eigen::VectorXd s = c * beta;
    scores.emplace_back(s.data(), s.data() + s.size());
  }
  return scores;
}

Eigen::VectorXd anchored_to_full(const Eigen::VectorXd& theta, std::size_t anchor) {
  const auto d = static_cast<std::size_t>(theta.size()) + 1;
  if (anchor >= d) {
    throw Error(ErrorCode::IndexOutOfRange,
                "anchor " + std::to_string(anchor) + " not below " + std::to_string(d));
  }
  Eigen::VectorXd beta(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0, t = 0; k < d; ++k) {
    beta[static_cast<Eigen::Index>(k)] =
        k == anchor ? 1.0 : theta[static_cast<Eigen::Index>(t++)];
  }
  return beta;
}

Eigen::VectorXd extract_theta(const Eigen::VectorXd& beta, std::size_t anchor) {
  const auto d = static_cast<std::size_t>(beta.size());
  if (anchor >= d) throw Error(ErrorCode::IndexOutOfRange, "anchor out of range");
  Eigen::VectorXd theta(static_cast<Eigen::Index>(d - 1));
  for (std::size_t k = 0, t = 0; k < d; ++k) {
    if (k != anchor) theta[static_cast<Eigen::Index>(t++)] = beta[static_cast<Eigen::Index>(k)];
  }
  return theta;
}

}  // namespace shum

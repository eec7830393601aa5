#include "shum/smooth.hpp"

#include <cmath>

#include "shum/kernel.hpp"

namespace shum {

ChainWorkspace::ChainWorkspace(const Scores& scores, const SmoothingSpec& spec, bool with_slopes) {
  if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  }
  if (scores.size() < 2) throw Error(ErrorCode::FewerThanTwoCategories, "need two categories");
  for (const auto& s : scores) {
    if (s.empty()) throw Error(ErrorCode::EmptyCategory, "empty score vector");
  }
  const double inv_lambda = 1.0 / spec.lambda;
  const std::size_t m = scores.size();
  for (const auto& s : scores) tuple_count_ *= static_cast<double>(s.size());

  adjacency_.reserve(m - 1);
  if (with_slopes) slopes_.reserve(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const auto& lo = scores[j];
    const auto& hi = scores[j + 1];
    Eigen::MatrixXd a(static_cast<Eigen::Index>(hi.size()), static_cast<Eigen::Index>(lo.size()));
    Eigen::MatrixXd da;
    if (with_slopes) da.resize(a.rows(), a.cols());
    for (Eigen::Index b = 0; b < a.cols(); ++b) {
      const double low = lo[static_cast<std::size_t>(b)];
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        const double x = hi[static_cast<std::size_t>(r)] - low;
        a(r, b) = detail::kernel_value(spec.kernel, x, inv_lambda);
        if (with_slopes) da(r, b) = detail::kernel_slope(spec.kernel, x, inv_lambda);
      }
    }
    adjacency_.push_back(std::move(a));
    if (with_slopes) slopes_.push_back(std::move(da));
  }

  prefix_.resize(m);
  suffix_.resize(m);
  prefix_[0] = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(scores[0].size()));
  for (std::size_t j = 0; j + 1 < m; ++j) prefix_[j + 1] = adjacency_[j] * prefix_[j];
  suffix_[m - 1] = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(scores[m - 1].size()));
  for (std::size_t j = m - 1; j > 0; --j) {
    suffix_[j - 1] = adjacency_[j - 1].transpose() * suffix_[j];
  }
}

double ChainWorkspace::value_at_split(std::size_t j) const {
  return prefix_.at(j).dot(suffix_.at(j)) / tuple_count_;
}

double shum_value(const Scores& scores, const SmoothingSpec& spec) {
  if (!(spec.lambda > 0.0) || !std::isfinite(spec.lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  }
  if (scores.size() < 2) throw Error(ErrorCode::FewerThanTwoCategories, "need two categories");
  for (const auto& s : scores) {
    if (s.empty()) throw Error(ErrorCode::EmptyCategory, "empty score vector");
  }
  // Forward sweep only; no kernel matrices are stored.
  const double inv_lambda = 1.0 / spec.lambda;
  double tuples = static_cast<double>(scores[0].size());
  std::vector<double> prefix(scores[0].size(), 1.0);
  std::vector<double> next;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    const auto& lo = scores[j - 1];
    const auto& hi = scores[j];
    tuples *= static_cast<double>(hi.size());
    next.assign(hi.size(), 0.0);
    for (std::size_t a = 0; a < hi.size(); ++a) {
      double acc = 0.0;
      for (std::size_t b = 0; b < lo.size(); ++b) {
        acc += detail::kernel_value(spec.kernel, hi[a] - lo[b], inv_lambda) * prefix[b];
      }
      next[a] = acc;
    }
    prefix.swap(next);
  }
  double total = 0.0;
  for (double v : prefix) total += v;
  return total / tuples;
}

double shum_value(const MarkerDataset& data, const Eigen::VectorXd& beta, const SmoothingSpec& spec) {
  return shum_value(project_scores(data, beta), spec);
}

SmoothEvaluation shum_value_and_gradient(const MarkerDataset& data, const Eigen::VectorXd& beta,
                                         const SmoothingSpec& spec, std::size_t anchor) {
  const std::size_t d = data.num_markers();
  if (static_cast<std::size_t>(beta.size()) != d) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient length does not match markers");
  }
  if (anchor >= d) throw Error(ErrorCode::IndexOutOfRange, "anchor out of range");

  const ChainWorkspace ws(project_scores(data, beta), spec, /*with_slopes=*/true);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t l = 0; l + 1 < data.num_categories(); ++l) {
    const auto& da = ws.slopes(l);
    const Eigen::VectorXd rows = ws.suffix(l + 1).cwiseProduct(da * ws.prefix(l));
    const Eigen::VectorXd cols = ws.prefix(l).cwiseProduct(da.transpose() * ws.suffix(l + 1));
    full.noalias() += data.category(l + 1).transpose() * rows;
    full.noalias() -= data.category(l).transpose() * cols;
  }
  full /= ws.tuple_count();
  return SmoothEvaluation{ws.value(), extract_theta(full, anchor)};
}

Eigen::VectorXd shum_gradient(const MarkerDataset& data, const Eigen::VectorXd& beta,
                              const SmoothingSpec& spec, std::size_t anchor) {
  return shum_value_and_gradient(data, beta, spec, anchor).gradient;
}

double lambda_rule_check(const MarkerDataset& data, const Eigen::VectorXd& beta, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  const Scores scores = project_scores(data, beta);
  std::size_t separated = 0;
  std::size_t pairs = 0;
  for (std::size_t j = 0; j + 1 < scores.size(); ++j) {
    for (double hi : scores[j + 1]) {
      for (double lo : scores[j]) {
        separated += std::abs(hi - lo) / lambda > kLambdaRuleThreshold ? 1 : 0;
      }
    }
    pairs += scores[j].size() * scores[j + 1].size();
  }
  return static_cast<double>(separated) / static_cast<double>(pairs);
}

}  // namespace shum

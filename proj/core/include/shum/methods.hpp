#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "shum/data_model.hpp"
#include "shum/optimize.hpp"

namespace shum {

enum class ParametricMode { ClosedForm, IntegralM3 };

enum class FrechetBound { Upper, Lower };

struct MethodConfig {
  OptimConfig optim;
  /// Smoothing parameter; default_lambda(total n) when unset.
  std::optional<double> lambda;
  ParametricMode parametric_mode = ParametricMode::ClosedForm;
  /// Anchor of the closed-form parametric direction; d-1 when unset.
  std::optional<std::size_t> parametric_anchor;
};

/// Plug-in normal model: per-category means and covariances, the pooled
/// within-category covariance and the average adjacent mean spacing.
struct ParametricModel {
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
  Eigen::MatrixXd pooled_covariance;
  Eigen::VectorXd spacing;

  static ParametricModel estimate(const MarkerDataset& data);
};

/// Direction Sigma^{-1} delta (unnormalised). Throws SingularCovariance.
Eigen::VectorXd closed_form_direction(const Eigen::MatrixXd& covariance, const Eigen::VectorXd& spacing);

/// Gaussian VUS of beta'X for three categories, integrated over u in [-8, 8]
/// with 201-node Gauss-Legendre quadrature.
double normal_vus(const ParametricModel& model, const Eigen::VectorXd& beta);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

FitReport fit_sshum(const MarkerDataset& data, const OptimConfig& cfg = {},
                    std::optional<double> lambda = std::nullopt);
FitReport fit_nshum(const MarkerDataset& data, const OptimConfig& cfg = {},
                    std::optional<double> lambda = std::nullopt);
FitReport fit_empirical(const MarkerDataset& data, const OptimConfig& cfg = {});
FitReport fit_parametric_normal(const MarkerDataset& data, const OptimConfig& cfg = {},
                                ParametricMode mode = ParametricMode::ClosedForm,
                                std::optional<std::size_t> anchor = std::nullopt);
FitReport fit_minmax(const MarkerDataset& data, const OptimConfig& cfg = {});
FitReport fit_frechet(const MarkerDataset& data, const OptimConfig& cfg = {},
                      FrechetBound bound = FrechetBound::Upper);
FitReport fit_naive(const MarkerDataset& data);

FitReport fit_method(Method method, const MarkerDataset& data, const MethodConfig& cfg = {});

/// Row-wise maximum and minimum marker as a two-column dataset.
MarkerDataset minmax_features(const MarkerDataset& data);

/// Scores of a report's combination: projects the markers (or the max/min
/// features for MinMax) onto the reported coefficients.
Scores report_scores(const MarkerDataset& data, const FitReport& report);

/// Resample with replacement inside each category; sizes preserved.
MarkerDataset stratified_resample(const MarkerDataset& data, std::uint64_t seed);

inline constexpr std::size_t kDefaultBootstrapReplicates = 100;
inline constexpr double kMaxBootstrapFailureRate = 0.10;

/// Refits `method` on B stratified resamples (replicate b uses seed + b) and
/// reports sample standard deviations. Coefficients are rescaled to
/// `anchor`, which defaults to the anchor of the full-data fit. Results do not
/// depend on `workers` (0 = hardware concurrency).
BootstrapSummary bootstrap_se(const MarkerDataset& data, Method method, std::size_t replicates,
                              std::uint64_t seed, const MethodConfig& cfg = {},
                              std::size_t workers = 1,
                              std::optional<std::size_t> anchor = std::nullopt);

}  // namespace shum

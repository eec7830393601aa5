#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shum/data_model.hpp"
#include "shum/methods.hpp"
#include "shum/random.hpp"

namespace shum {

enum class Family { Normal, Weibull };
enum class CovarianceKind { Identity, Exchangeable, AR1 };

/// d x d covariance: identity, rho off the diagonal, or rho^|s-t|.
Eigen::MatrixXd make_covariance(CovarianceKind kind, double rho, std::size_t d);

struct ScenarioConfig {
  /// 1..4 for the built-in scenarios, 0 for a custom configuration.
  int scenario_id = 0;
  Family family = Family::Normal;
  /// Normal family: one mean vector per category and a shared covariance.
  std::vector<Eigen::VectorXd> means;
  CovarianceKind covariance = CovarianceKind::Identity;
  double rho = 0.0;
  /// Weibull family: shape per marker, scale per category.
  Eigen::VectorXd weibull_shape;
  Eigen::VectorXd weibull_scale;
  std::vector<std::size_t> sizes;
  std::size_t replications = 200;
  std::uint64_t seed = 1;

  /// Built-in scenario 1-4 with three markers and three categories.
  static ScenarioConfig builtin(int id, std::vector<std::size_t> sizes = {60, 60, 60},
                                std::size_t replications = 200, std::uint64_t seed = 1);

  std::size_t num_categories() const noexcept { return sizes.size(); }
  std::size_t num_markers() const;
  Eigen::MatrixXd covariance_matrix() const;

  /// Throws InvalidParameter on inconsistent sizes or non-positive parameters
  /// and NotPositiveDefinite for a bad covariance.
  void validate() const;
};

inline constexpr std::size_t kDefaultReplications = 200;

/// n rows drawn from N(mean, cov) as mean + L z with L the Cholesky factor.
Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t n,
                           Rng& rng);

/// Inverse CDF of Weibull(k, lambda): lambda (-ln(1 - u))^(1/k).
double weibull_quantile(double shape, double scale, double u);

/// n draws from Weibull(shape, scale) by inverse-CDF sampling.
Eigen::VectorXd sample_weibull(double shape, double scale, std::size_t n, Rng& rng);

/// n subjects of category j.
Eigen::MatrixXd sample_category(const ScenarioConfig& cfg, std::size_t j, std::size_t n, Rng& rng);

/// Dataset of replicate r, seeded with replicate_seed(cfg.seed, r).
MarkerDataset generate_scenario(const ScenarioConfig& cfg, std::size_t replicate_index);

/// Sigma^{-1} delta for the normal scenarios, anchored at the marker with the
/// smallest mean spacing. Throws InvalidArgument for the Weibull family.
Coefficients true_beta_oracle(const ScenarioConfig& cfg);

/// Coefficients used as truth in study summaries: the oracle for normal
/// scenarios, the published optimum (0.047, 0.456, 1) for scenario 4, none
/// otherwise.
std::optional<Coefficients> reference_beta(const ScenarioConfig& cfg);

struct PopulationHum {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr std::size_t kMinPopulationDraws = 10000;

/// Monte Carlo HUM: the fraction of mc_n independent tuples (one subject per
/// category) whose scores are strictly increasing. Draws come in fixed-size
/// blocks with their own seeds, so `workers` does not change the result.
PopulationHum population_hum(const ScenarioConfig& cfg, const Eigen::VectorXd& beta, std::size_t mc_n,
                             std::uint64_t seed, std::size_t workers = 1);

struct MethodSummary {
  Method method = Method::Naive;
  std::size_t fits = 0;
  std::size_t failures = 0;
  double ehum_mean = 0.0;
  double ehum_sd = 0.0;
  std::vector<std::string> coefficient_names;
  /// Anchor used for the coefficient columns.
  std::size_t anchor = 0;
  /// Fits whose anchor component was positive and entered the coefficient columns.
  std::size_t coef_used = 0;
  Eigen::VectorXd coef_mean;
  Eigen::VectorXd coef_sd;
  /// Empty when no truth applies (unknown scenario or MinMax features).
  Eigen::VectorXd truth;
  Eigen::VectorXd coef_bias;
  /// Summed fit time across replicates; not part of deterministic outputs.
  double seconds = 0.0;
};

struct StudySummary {
  ScenarioConfig config;
  std::vector<MethodSummary> methods;
  std::vector<std::string> warnings;
};

inline constexpr double kMaxStudyFailureRate = 0.05;

/// Generates cfg.replications datasets, fits every method on each and
/// aggregates the results in replicate order. Throws StudyUnstable when a
/// method fails on more than 5% of replicates.
StudySummary run_study(const ScenarioConfig& cfg, const std::vector<Method>& methods,
                       const MethodConfig& method_cfg = {}, std::size_t workers = 1);

}  // namespace shum

#include "shum/simulate.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "shum/parallel.hpp"
#include "stats.hpp"

namespace shum {
namespace {

constexpr std::size_t kPopulationBlock = 8192;

Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || !cov.isApprox(cov.transpose())) {
    throw Error(ErrorCode::NotPositiveDefinite, "covariance is not symmetric positive definite");
  }
  return llt;
}

}  // namespace

Eigen::MatrixXd make_covariance(CovarianceKind kind, double rho, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = 0; t < n; ++t) {
      if (s == t) continue;
      if (kind == CovarianceKind::Exchangeable) cov(s, t) = rho;
      if (kind == CovarianceKind::AR1) cov(s, t) = std::pow(rho, static_cast<double>(std::abs(s - t)));
    }
  }
  return cov;
}

ScenarioConfig ScenarioConfig::builtin(int id, std::vector<std::size_t> sizes, std::size_t replications,
                                       std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.scenario_id = id;
  cfg.sizes = std::move(sizes);
  cfg.replications = replications;
  cfg.seed = seed;
  const Eigen::Vector3d step(1.0, 1.1, 1.2);
  switch (id) {
    case 1:
    case 2:
    case 3:
      cfg.family = Family::Normal;
      cfg.means = {Eigen::Vector3d::Zero(), step, 2.0 * step};
      cfg.covariance = id == 1 ? CovarianceKind::Identity
                       : id == 2 ? CovarianceKind::Exchangeable
                                 : CovarianceKind::AR1;
      cfg.rho = id == 1 ? 0.0 : 0.2;
      break;
    case 4:
      cfg.family = Family::Weibull;
      cfg.weibull_shape = Eigen::Vector3d(0.5, 1.0, 1.5);
      cfg.weibull_scale = Eigen::Vector3d(1.0, 2.0, 3.0);
      break;
    default:
      throw Error(ErrorCode::InvalidParameter, "unknown scenario " + std::to_string(id));
  }
  cfg.validate();
  return cfg;
}

std::size_t ScenarioConfig::num_markers() const {
  if (family == Family::Weibull) return static_cast<std::size_t>(weibull_shape.size());
  return means.empty() ? 0 : static_cast<std::size_t>(means.front().size());
}

Eigen::MatrixXd ScenarioConfig::covariance_matrix() const {
  return make_covariance(covariance, rho, num_markers());
}

void ScenarioConfig::validate() const {
  const std::size_t m = num_categories();
  if (m < 2) throw Error(ErrorCode::InvalidParameter, "a scenario needs at least two categories");
  for (std::size_t n : sizes) {
    if (n == 0) throw Error(ErrorCode::InvalidParameter, "category sizes must be positive");
  }
  if (replications < 1) throw Error(ErrorCode::InvalidParameter, "replications must be at least 1");
  const std::size_t d = num_markers();
  if (d < 1) throw Error(ErrorCode::InvalidParameter, "a scenario needs at least one marker");
  if (family == Family::Normal) {
    if (means.size() != m) throw Error(ErrorCode::InvalidParameter, "one mean vector per category");
    for (const auto& mu : means) {
      if (static_cast<std::size_t>(mu.size()) != d || !mu.allFinite()) {
        throw Error(ErrorCode::InvalidParameter, "mean vectors must be finite and of equal length");
      }
    }
    cholesky(covariance_matrix());
  } else {
    if (static_cast<std::size_t>(weibull_scale.size()) != m) {
      throw Error(ErrorCode::InvalidParameter, "one Weibull scale per category");
    }
    if (!(weibull_shape.array() > 0.0).all() || !(weibull_scale.array() > 0.0).all() ||
        !weibull_shape.allFinite() || !weibull_scale.allFinite()) {
      throw Error(ErrorCode::InvalidParameter, "Weibull shapes and scales must be positive");
    }
  }
}

Eigen::MatrixXd sample_mvn(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::size_t n,
                           Rng& rng) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mean and covariance sizes differ");
  }
  const Eigen::MatrixXd l = cholesky(cov).matrixL();
  const Eigen::Index d = mean.size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) z[k] = rng.normal();
    out.row(i) = (mean + l * z).transpose();
  }
  return out;
}

double weibull_quantile(double shape, double scale, double u) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "Weibull shape and scale must be positive");
  }
  return scale * std::pow(-std::log1p(-u), 1.0 / shape);
}

Eigen::VectorXd sample_weibull(double shape, double scale, std::size_t n, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "Weibull shape and scale must be positive");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = weibull_quantile(shape, scale, rng.uniform());
  return out;
}

Eigen::MatrixXd sample_category(const ScenarioConfig& cfg, std::size_t j, std::size_t n, Rng& rng) {
  if (cfg.family == Family::Normal) return sample_mvn(cfg.means.at(j), cfg.covariance_matrix(), n, rng);
  const auto d = static_cast<Eigen::Index>(cfg.num_markers());
  const double scale = cfg.weibull_scale[static_cast<Eigen::Index>(j)];
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  // Row-major draw order keeps a subject's markers adjacent in the stream.
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      out(i, k) = weibull_quantile(cfg.weibull_shape[k], scale, rng.uniform());
    }
  }
  return out;
}

MarkerDataset generate_scenario(const ScenarioConfig& cfg, std::size_t replicate_index) {
  cfg.validate();
  Rng rng(replicate_seed(cfg.seed, replicate_index));
  std::vector<Eigen::MatrixXd> categories;
  categories.reserve(cfg.num_categories());
  for (std::size_t j = 0; j < cfg.num_categories(); ++j) {
    categories.push_back(sample_category(cfg, j, cfg.sizes[j], rng));
  }
  return MarkerDataset::create(std::move(categories));
}

Coefficients true_beta_oracle(const ScenarioConfig& cfg) {
  if (cfg.family != Family::Normal) {
    throw Error(ErrorCode::InvalidArgument, "the closed-form truth needs normal markers");
  }
  cfg.validate();
  const std::size_t m = cfg.num_categories();
  const Eigen::VectorXd delta = (cfg.means[m - 1] - cfg.means[0]) / static_cast<double>(m - 1);
  const Eigen::VectorXd direction = closed_form_direction(cfg.covariance_matrix(), delta);
  Eigen::Index anchor = 0;
  delta.minCoeff(&anchor);
  return Coefficients::normalized(direction, static_cast<std::size_t>(anchor));
}

std::optional<Coefficients> reference_beta(const ScenarioConfig& cfg) {
  if (cfg.family == Family::Normal) return true_beta_oracle(cfg);
  if (cfg.scenario_id == 4) return Coefficients(Eigen::Vector3d(0.047, 0.456, 1.0), 2);
  return std::nullopt;
}

PopulationHum population_hum(const ScenarioConfig& cfg, const Eigen::VectorXd& beta, std::size_t mc_n,
                             std::uint64_t seed, std::size_t workers) {
  cfg.validate();
  if (mc_n < kMinPopulationDraws) {
    throw Error(ErrorCode::InvalidArgument, "population HUM needs at least 10^4 draws");
  }
  if (static_cast<std::size_t>(beta.size()) != cfg.num_markers()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient length does not match markers");
  }
  const std::size_t m = cfg.num_categories();
  const std::size_t blocks = (mc_n + kPopulationBlock - 1) / kPopulationBlock;
  std::vector<std::size_t> hits(blocks, 0);
  parallel_for(blocks, workers, [&](std::size_t b) {
    const std::size_t n = std::min(kPopulationBlock, mc_n - b * kPopulationBlock);
    Rng rng(replicate_seed(seed, b));
    std::vector<Eigen::VectorXd> scores;
    scores.reserve(m);
    for (std::size_t j = 0; j < m; ++j) scores.push_back(sample_category(cfg, j, n, rng) * beta);
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      bool ordered = true;
      for (std::size_t j = 1; j < m && ordered; ++j) ordered = scores[j][i] > scores[j - 1][i];
      count += ordered ? 1 : 0;
    }
    hits[b] = count;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(mc_n);
  return PopulationHum{p, std::sqrt(p * (1.0 - p) / static_cast<double>(mc_n))};
}

StudySummary run_study(const ScenarioConfig& cfg, const std::vector<Method>& methods,
                       const MethodConfig& method_cfg, std::size_t workers) {
  cfg.validate();
  if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods requested");
  const std::size_t reps = cfg.replications;
  const std::size_t nm = methods.size();

  struct Cell {
    std::optional<FitReport> report;
    double seconds = 0.0;
  };
  std::vector<Cell> cells(reps * nm);
  parallel_for(reps, workers, [&](std::size_t r) {
    const MarkerDataset data = generate_scenario(cfg, r);
    for (std::size_t k = 0; k < nm; ++k) {
      Cell& cell = cells[r * nm + k];
      const auto start = std::chrono::steady_clock::now();
      try {
        cell.report = fit_method(methods[k], data, method_cfg);
      } catch (const Error&) {
        cell.report.reset();
      }
      cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });

  const std::optional<Coefficients> truth = reference_beta(cfg);
  StudySummary summary;
  summary.config = cfg;
  if (reps == 1) summary.warnings.push_back("only one replicate: standard deviations are reported as 0");

  for (std::size_t k = 0; k < nm; ++k) {
    MethodSummary ms;
    ms.method = methods[k];
    std::vector<double> ehums;
    std::vector<Eigen::VectorXd> betas;
    for (std::size_t r = 0; r < reps; ++r) {
      const Cell& cell = cells[r * nm + k];
      ms.seconds += cell.seconds;
      if (!cell.report) {
        ++ms.failures;
        continue;
      }
      ++ms.fits;
      ehums.push_back(cell.report->ehum_at_solution);
      betas.push_back(cell.report->coefficients.beta());
      if (ms.coefficient_names.empty()) ms.coefficient_names = cell.report->coefficient_names;
    }
    if (static_cast<double>(ms.failures) > kMaxStudyFailureRate * static_cast<double>(reps)) {
      throw Error(ErrorCode::StudyUnstable, std::string(to_string(ms.method)) + " failed on " +
                                                std::to_string(ms.failures) + " of " +
                                                std::to_string(reps) + " replicates");
    }
    if (ms.failures > 0) {
      summary.warnings.push_back(std::string(to_string(ms.method)) + ": " + std::to_string(ms.failures) +
                                 " replicate fits failed and were skipped");
    }
    ms.ehum_mean = detail::mean_of(ehums);
    ms.ehum_sd = detail::sample_sd(ehums);

    const bool comparable = truth && ms.method != Method::MinMax && !betas.empty() &&
                            betas.front().size() == truth->beta().size();
    if (comparable) {
      ms.anchor = truth->anchor();
      ms.truth = truth->beta();
    } else {
      ms.anchor = betas.empty() ? 0 : static_cast<std::size_t>(betas.front().size() - 1);
      if (ms.method == Method::MinMax) ms.anchor = 0;
    }
    const Eigen::Index d = betas.empty() ? 0 : betas.front().size();
    std::vector<std::vector<double>> columns(static_cast<std::size_t>(d));
    const auto ai = static_cast<Eigen::Index>(ms.anchor);
    for (const auto& b : betas) {
      if (!(b[ai] > 0.0)) continue;
      ++ms.coef_used;
      for (Eigen::Index c = 0; c < d; ++c) columns[static_cast<std::size_t>(c)].push_back(b[c] / b[ai]);
    }
    ms.coef_mean.resize(d);
    ms.coef_sd.resize(d);
    for (Eigen::Index c = 0; c < d; ++c) {
      ms.coef_mean[c] = detail::mean_of(columns[static_cast<std::size_t>(c)]);
      ms.coef_sd[c] = detail::sample_sd(columns[static_cast<std::size_t>(c)]);
    }
    if (comparable) ms.coef_bias = ms.coef_mean - ms.truth;
    summary.methods.push_back(std::move(ms));
  }
  return summary;
}

}  // namespace shum

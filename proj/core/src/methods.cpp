#include "shum/methods.hpp"

#include <cmath>
#include <string>

#include "shum/hum.hpp"
#include "shum/kernel.hpp"
#include "shum/smooth.hpp"

namespace shum {
namespace {

FitReport base_report(Method method, const MarkerDataset& data, const Coefficients& coef) {
  FitReport report;
  report.method = method;
  report.coefficients = coef;
  report.coefficient_names = data.marker_names();
  report.ehum_at_solution = ehum(data, coef.beta());
  return report;
}

FitReport fit_smooth(Method method, ObjectiveKind kind, const MarkerDataset& data,
                     const OptimConfig& cfg, std::optional<double> lambda) {
  const double lam = lambda ? *lambda : default_lambda(data.total_size());
  if (!(lam > 0.0) || !std::isfinite(lam)) {
    throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  }
  const StepDownResult sd = step_down(data, kind, cfg, lam);
  const std::size_t anchor = sd.coefficients.anchor();
  OptimResult best = sd.optim;
  if (data.num_markers() > 1) {
    best = polish_bfgs(data, kind, sd.coefficients.theta(), anchor, cfg, lam);
    best.iterations += sd.optim.iterations;
  }
  FitReport report = base_report(method, data, Coefficients::from_theta(best.argmax, anchor));
  report.objective_at_solution = best.value;
  report.iterations = best.iterations;
  report.converged = best.converged && sd.optim.converged;
  report.lambda = lam;
  report.marker_ordering = sd.ordering;
  return report;
}

// Step-down on a non-smooth criterion followed by a joint simplex search.
FitReport fit_nonsmooth(Method method, ObjectiveKind kind, const MarkerDataset& data,
                        const OptimConfig& cfg) {
  const StepDownResult sd = step_down(data, kind, cfg);
  const std::size_t anchor = sd.coefficients.anchor();
  OptimResult best = sd.optim;
  if (data.num_markers() > 1) {
    const Objective objective = [&](const Eigen::VectorXd& theta) {
      return evaluate_criterion(kind, project_scores(data, anchored_to_full(theta, anchor)), 1.0);
    };
    OptimResult polished = nelder_mead_maximize(objective, sd.coefficients.theta(), cfg);
    polished.iterations += sd.optim.iterations;
    if (polished.value >= best.value) {
      best = polished;
    } else {
      best.iterations = polished.iterations;
    }
  }
  FitReport report = base_report(method, data, Coefficients::from_theta(best.argmax, anchor));
  report.objective_at_solution = best.value;
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.marker_ordering = sd.ordering;
  return report;
}

}  // namespace

FitReport fit_sshum(const MarkerDataset& data, const OptimConfig& cfg, std::optional<double> lambda) {
  return fit_smooth(Method::SSHUM, ObjectiveKind::SSHUM, data, cfg, lambda);
}

FitReport fit_nshum(const MarkerDataset& data, const OptimConfig& cfg, std::optional<double> lambda) {
  return fit_smooth(Method::NSHUM, ObjectiveKind::NSHUM, data, cfg, lambda);
}

FitReport fit_empirical(const MarkerDataset& data, const OptimConfig& cfg) {
  return fit_nonsmooth(Method::Empirical, ObjectiveKind::EHUM, data, cfg);
}

FitReport fit_frechet(const MarkerDataset& data, const OptimConfig& cfg, FrechetBound bound) {
  return bound == FrechetBound::Upper
             ? fit_nonsmooth(Method::FrechetUpper, ObjectiveKind::FrechetUpper, data, cfg)
             : fit_nonsmooth(Method::FrechetLower, ObjectiveKind::FrechetLower, data, cfg);
}

MarkerDataset minmax_features(const MarkerDataset& data) {
  std::vector<Eigen::MatrixXd> features;
  features.reserve(data.num_categories());
  for (const auto& x : data.categories()) {
    Eigen::MatrixXd f(x.rows(), 2);
    f.col(0) = x.rowwise().maxCoeff();
    f.col(1) = x.rowwise().minCoeff();
    features.push_back(std::move(f));
  }
  return MarkerDataset::create(std::move(features), {"max", "min"}, data.category_labels());
}

FitReport fit_minmax(const MarkerDataset& data, const OptimConfig& cfg) {
  if (data.num_markers() < 2) {
    throw Error(ErrorCode::InvalidArgument, "min-max combination needs at least two markers");
  }
  const MarkerDataset features = minmax_features(data);
  const OptimResult best = brent_maximize_1d(
      [&](double c) { return ehum(features, Eigen::Vector2d(1.0, c)); }, cfg);
  FitReport report =
      base_report(Method::MinMax, features, Coefficients(Eigen::Vector2d(1.0, best.argmax[0]), 0));
  report.objective_at_solution = best.value;
  report.iterations = best.iterations;
  report.converged = best.converged;
  report.marker_ordering = {0, 1};
  return report;
}

FitReport fit_naive(const MarkerDataset& data) {
  const auto d = static_cast<Eigen::Index>(data.num_markers());
  FitReport report =
      base_report(Method::Naive, data, Coefficients(Eigen::VectorXd::Ones(d), data.num_markers() - 1));
  report.objective_at_solution = report.ehum_at_solution;
  report.iterations = 0;
  report.converged = true;
  return report;
}

FitReport fit_method(Method method, const MarkerDataset& data, const MethodConfig& cfg) {
  switch (method) {
    case Method::SSHUM:
      return fit_sshum(data, cfg.optim, cfg.lambda);
    case Method::NSHUM:
      return fit_nshum(data, cfg.optim, cfg.lambda);
    case Method::Empirical:
      return fit_empirical(data, cfg.optim);
    case Method::ParametricNormal:
      return fit_parametric_normal(data, cfg.optim, cfg.parametric_mode, cfg.parametric_anchor);
    case Method::MinMax:
      return fit_minmax(data, cfg.optim);
    case Method::FrechetUpper:
      return fit_frechet(data, cfg.optim, FrechetBound::Upper);
    case Method::FrechetLower:
      return fit_frechet(data, cfg.optim, FrechetBound::Lower);
    case Method::Naive:
      return fit_naive(data);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

Scores report_scores(const MarkerDataset& data, const FitReport& report) {
  if (report.method == Method::MinMax) {
    return project_scores(minmax_features(data), report.coefficients.beta());
  }
  return project_scores(data, report.coefficients.beta());
}

}  // namespace shum

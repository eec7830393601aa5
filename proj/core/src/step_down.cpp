#include <algorithm>
#include <numeric>

#include "shum/hum.hpp"
#include "shum/optimize.hpp"
#include "shum/smooth.hpp"

namespace shum {

bool is_smooth(ObjectiveKind kind) noexcept {
  return kind == ObjectiveKind::SSHUM || kind == ObjectiveKind::NSHUM;
}

double frechet_upper(const Scores& scores) {
  double lowest = 1.0;
  for (std::size_t j = 0; j + 1 < scores.size(); ++j) {
    lowest = std::min(lowest, pairwise_auc(scores[j], scores[j + 1]));
  }
  return lowest;
}

double frechet_average(const Scores& scores) {
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < scores.size(); ++j) sum += pairwise_auc(scores[j], scores[j + 1]);
  return sum / static_cast<double>(scores.size() - 1);
}

double frechet_lower_bound(const Scores& scores) {
  const auto m = static_cast<double>(scores.size());
  return std::max(0.0, (m - 1.0) * frechet_average(scores) - (m - 2.0));
}

double evaluate_criterion(ObjectiveKind kind, const Scores& scores, double lambda) {
  switch (kind) {
    case ObjectiveKind::SSHUM:
      return shum_value(scores, SmoothingSpec::make(KernelKind::Sigmoid, lambda));
    case ObjectiveKind::NSHUM:
      return shum_value(scores, SmoothingSpec::make(KernelKind::NormalCdf, lambda));
    case ObjectiveKind::EHUM:
      return ehum_fast(scores).value();
    case ObjectiveKind::FrechetUpper:
      return frechet_upper(scores);
    case ObjectiveKind::FrechetLower:
      // The lower bound is monotone in P_A, so P_A itself is maximised.
      return frechet_average(scores);
  }
  return 0.0;
}

StepDownResult step_down(const MarkerDataset& data, ObjectiveKind kind, const OptimConfig& cfg,
                         double lambda) {
  cfg.validate();
  const std::size_t d = data.num_markers();
  const auto di = static_cast<Eigen::Index>(d);
  auto criterion = [&](const Eigen::VectorXd& beta) {
    return evaluate_criterion(kind, project_scores(data, beta), lambda);
  };

  StepDownResult out;
  out.individual_values.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    out.individual_values[k] = criterion(Eigen::VectorXd::Unit(di, static_cast<Eigen::Index>(k)));
  }
  out.ordering.resize(d);
  std::iota(out.ordering.begin(), out.ordering.end(), std::size_t{0});
  std::stable_sort(out.ordering.begin(), out.ordering.end(), [&](std::size_t a, std::size_t b) {
    return out.individual_values[a] > out.individual_values[b];
  });

  const std::size_t anchor = out.ordering.front();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(di);
  beta[static_cast<Eigen::Index>(anchor)] = 1.0;
  out.stage_values.push_back(out.individual_values[anchor]);
  out.step_coefficients.push_back(1.0);

  std::size_t iterations = 0;
  bool converged = true;
  for (std::size_t i = 1; i < d; ++i) {
    const auto k = static_cast<Eigen::Index>(out.ordering[i]);
    const OptimResult step = brent_maximize_1d(
        [&](double c) {
          Eigen::VectorXd trial = beta;
          trial[k] = c;
          return criterion(trial);
        },
        cfg);
    beta[k] = step.argmax[0];
    out.stage_values.push_back(step.value);
    out.step_coefficients.push_back(step.argmax[0]);
    iterations += step.iterations;
    converged = converged && step.converged;
  }

  out.coefficients = Coefficients(beta, anchor);
  out.optim.argmax = out.coefficients.theta();
  out.optim.value = out.stage_values.back();
  out.optim.iterations = iterations;
  out.optim.converged = converged;
  return out;
}

OptimResult polish_bfgs(const MarkerDataset& data, ObjectiveKind kind,
                        const Eigen::VectorXd& theta_init, std::size_t anchor,
                        const OptimConfig& cfg, double lambda) {
  if (!is_smooth(kind)) {
    throw Error(ErrorCode::SmoothObjectiveRequired, "BFGS polishing needs SSHUM or NSHUM");
  }
  const auto spec = SmoothingSpec::make(
      kind == ObjectiveKind::SSHUM ? KernelKind::Sigmoid : KernelKind::NormalCdf, lambda);
  const SmoothObjective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const auto eval = shum_value_and_gradient(data, anchored_to_full(theta, anchor), spec, anchor);
    grad = eval.gradient;
    return eval.value;
  };
  OptimResult refined = bfgs_maximize(objective, theta_init, cfg);
  const double start_value = shum_value(data, anchored_to_full(theta_init, anchor), spec);
  if (refined.value >= start_value) return refined;
  OptimResult keep = refined;
  keep.argmax = theta_init;
  keep.value = start_value;
  keep.gradient_norm.reset();
  return keep;
}

}  // namespace shum

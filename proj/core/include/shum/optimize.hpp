#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "shum/data_model.hpp"

namespace shum {

struct OptimConfig {
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-6;        // sup-norm
  double relative_tolerance = 1e-10;       // objective stagnation
  double armijo = 1e-4;
  double backtracking = 0.5;
  double nm_reflect = 1.0;
  double nm_expand = 2.0;
  double nm_contract = 0.5;
  double nm_shrink = 0.5;
  double nm_diameter_tolerance = 1e-8;
  double brent_half_width = 10.0;
  std::size_t brent_grid_points = 101;
  double brent_tolerance = 1e-8;

  /// Throws InvalidParameter when a field is out of range.
  void validate() const;
};

struct OptimResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<double> gradient_norm;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Returns f(theta) and writes its gradient into the second argument.
using SmoothObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using ScalarObjective = std::function<double(double)>;

/// BFGS on -f with Armijo backtracking. The inverse-Hessian approximation is
/// reset to the identity whenever the curvature condition s'y > 0 fails.
OptimResult bfgs_maximize(const SmoothObjective& f, const Eigen::VectorXd& theta0,
                          const OptimConfig& cfg = {});

/// Nelder-Mead simplex with one restart from the incumbent. Initial steps are
/// max(0.1, 0.1 |theta0_i|) per coordinate.
OptimResult nelder_mead_maximize(const Objective& f, const Eigen::VectorXd& theta0,
                                 const OptimConfig& cfg = {});

/// Grid pre-scan over [-L, L] followed by Brent refinement around the best
/// grid point. Grid ties resolve to the point closest to zero.
OptimResult brent_maximize_1d(const ScalarObjective& f, const OptimConfig& cfg = {});

enum class ObjectiveKind { SSHUM, NSHUM, EHUM, FrechetUpper, FrechetLower };

bool is_smooth(ObjectiveKind kind) noexcept;

/// Criterion value of a fixed score set. lambda is used by the smooth kinds only.
double evaluate_criterion(ObjectiveKind kind, const Scores& scores, double lambda);

/// min over adjacent categories of AUC(j, j+1).
double frechet_upper(const Scores& scores);
/// mean over adjacent categories of AUC(j, j+1).
double frechet_average(const Scores& scores);
/// max{0, (M-1) P_A - (M-2)}.
double frechet_lower_bound(const Scores& scores);

struct StepDownResult {
  /// argmax holds the free coefficients relative to coefficients.anchor().
  OptimResult optim;
  Coefficients coefficients{Eigen::VectorXd::Ones(1), 0};
  /// Marker indices sorted by decreasing individual criterion.
  std::vector<std::size_t> ordering;
  std::vector<double> individual_values;
  /// Criterion after each stage; entry 0 is the best single marker.
  std::vector<double> stage_values;
  std::vector<double> step_coefficients;
};

/// Greedy composition: rank markers by their individual criterion, then add
/// them one at a time, V_i = V_{i-1} + c_i X_(i), each c_i found by
/// brent_maximize_1d. The best marker is anchored at 1.
StepDownResult step_down(const MarkerDataset& data, ObjectiveKind kind, const OptimConfig& cfg,
                         double lambda = 1.0);

/// Joint BFGS refinement of all free coefficients from a step-down start.
/// Returns whichever of start and refined point has the larger objective.
OptimResult polish_bfgs(const MarkerDataset& data, ObjectiveKind kind,
                        const Eigen::VectorXd& theta_init, std::size_t anchor,
                        const OptimConfig& cfg, double lambda);

}  // namespace shum

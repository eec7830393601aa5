#include <algorithm>
#include <cmath>
#include <numbers>

#include "shum/hum.hpp"
#include "shum/kernel.hpp"
#include "shum/methods.hpp"

namespace shum {
namespace {

constexpr std::size_t kQuadratureNodes = 201;
constexpr double kQuadratureHalfWidth = 8.0;

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const Quadrature& vus_quadrature() {
  static const Quadrature q = [] {
    Quadrature out;
    gauss_legendre(kQuadratureNodes, -kQuadratureHalfWidth, kQuadratureHalfWidth, out.nodes,
                   out.weights);
    // Fold the standard normal density into the weights.
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
      out.weights[i] *= detail::normal_pdf(out.nodes[i]);
    }
    return out;
  }();
  return q;
}

// Anchor for a direction: the requested index, else d-1, else the largest
// positive component. The anchor component must be positive so rescaling
// keeps the orientation of the scores.
std::size_t pick_anchor(const Eigen::VectorXd& direction, std::optional<std::size_t> requested) {
  const auto d = static_cast<std::size_t>(direction.size());
  if (requested) {
    if (*requested >= d) throw Error(ErrorCode::IndexOutOfRange, "parametric anchor out of range");
    if (direction[static_cast<Eigen::Index>(*requested)] > 0.0) return *requested;
    throw Error(ErrorCode::InvalidArgument, "requested anchor has a non-positive coefficient");
  }
  if (direction[static_cast<Eigen::Index>(d - 1)] > 0.0) return d - 1;
  Eigen::Index best = 0;
  const double top = direction.maxCoeff(&best);
  if (!(top > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "parametric direction has no positive component");
  }
  return static_cast<std::size_t>(best);
}

}  // namespace

void gauss_legendre(std::size_t n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "need at least one quadrature node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t roots = (n + 1) / 2;
  const auto nd = static_cast<double>(n);
  for (std::size_t i = 0; i < roots; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        const auto kd = static_cast<double>(k);
        p1 = ((2.0 * kd - 1.0) * z * p2 - (kd - 1.0) * p3) / kd;
      }
      dp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[i] = mid - half * z;
    nodes[n - 1 - i] = mid + half * z;
    weights[i] = half * w;
    weights[n - 1 - i] = half * w;
  }
}

ParametricModel ParametricModel::estimate(const MarkerDataset& data) {
  const std::size_t m = data.num_categories();
  const auto d = static_cast<Eigen::Index>(data.num_markers());
  ParametricModel model;
  model.pooled_covariance = Eigen::MatrixXd::Zero(d, d);
  double dof = 0.0;
  for (const auto& x : data.categories()) {
    const Eigen::VectorXd mu = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
    const double df = static_cast<double>(x.rows() - 1);
    Eigen::MatrixXd cov = centered.transpose() * centered;
    model.pooled_covariance += cov;
    if (df > 0.0) cov /= df;
    dof += df;
    model.means.push_back(mu);
    model.covariances.push_back(std::move(cov));
  }
  if (dof > 0.0) model.pooled_covariance /= dof;
  model.spacing = (model.means[m - 1] - model.means[0]) / static_cast<double>(m - 1);
  return model;
}

Eigen::VectorXd closed_form_direction(const Eigen::MatrixXd& covariance, const Eigen::VectorXd& spacing) {
  if (covariance.rows() != spacing.size() || covariance.cols() != spacing.size()) {
    throw Error(ErrorCode::DimensionMismatch, "covariance and spacing sizes differ");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  const double scale = covariance.diagonal().cwiseAbs().maxCoeff();
  if (llt.info() != Eigen::Success || !(scale > 0.0) ||
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 1e-12 * std::sqrt(scale)) {
    throw Error(ErrorCode::SingularCovariance, "pooled covariance is not invertible");
  }
  return llt.solve(spacing);
}

double normal_vus(const ParametricModel& model, const Eigen::VectorXd& beta) {
  if (model.means.size() != 3) {
    throw Error(ErrorCode::WrongCategoryCount, "the normal VUS integral needs exactly three categories");
  }
  double m[3];
  double s[3];
  for (int j = 0; j < 3; ++j) {
    m[j] = beta.dot(model.means[static_cast<std::size_t>(j)]);
    s[j] = std::sqrt(beta.dot(model.covariances[static_cast<std::size_t>(j)] * beta));
  }
  const Quadrature& q = vus_quadrature();
  double total = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double v = m[1] + s[1] * q.nodes[i];
    total += q.weights[i] * detail::normal_cdf((v - m[0]) / s[0]) *
             detail::normal_cdf((m[2] - v) / s[2]);
  }
  return total;
}

FitReport fit_parametric_normal(const MarkerDataset& data, const OptimConfig& cfg, ParametricMode mode,
                                std::optional<std::size_t> anchor) {
  cfg.validate();
  if (mode == ParametricMode::IntegralM3 && data.num_categories() != 3) {
    throw Error(ErrorCode::WrongCategoryCount, "the integral mode needs exactly three categories");
  }
  const ParametricModel model = ParametricModel::estimate(data);
  const Eigen::VectorXd direction = closed_form_direction(model.pooled_covariance, model.spacing);
  // A single marker is reported as (1) like every other method.
  const std::size_t a = data.num_markers() == 1 ? 0 : pick_anchor(direction, anchor);
  Coefficients coef = data.num_markers() == 1 ? Coefficients(Eigen::VectorXd::Ones(1), 0)
                                               : Coefficients::normalized(direction, a);

  FitReport report;
  report.method = Method::ParametricNormal;
  report.coefficient_names = data.marker_names();
  report.iterations = 0;
  report.converged = true;

  if (mode == ParametricMode::IntegralM3 && data.num_markers() > 1) {
    const SmoothObjective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
      const double h0 = 1e-6;
      grad.resize(theta.size());
      Eigen::VectorXd probe = theta;
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = h0 * std::max(1.0, std::abs(theta[i]));
        probe[i] = theta[i] + h;
        const double up = normal_vus(model, anchored_to_full(probe, a));
        probe[i] = theta[i] - h;
        const double down = normal_vus(model, anchored_to_full(probe, a));
        probe[i] = theta[i];
        grad[i] = (up - down) / (2.0 * h);
      }
      return normal_vus(model, anchored_to_full(theta, a));
    };
    const OptimResult best = bfgs_maximize(objective, coef.theta(), cfg);
    const double start = normal_vus(model, coef.beta());
    if (best.value >= start) coef = Coefficients::from_theta(best.argmax, a);
    report.objective_at_solution = std::max(best.value, start);
    report.iterations = best.iterations;
    report.converged = best.converged;
  } else if (data.num_categories() == 3) {
    report.objective_at_solution = normal_vus(model, coef.beta());
  }
  report.coefficients = coef;
  report.ehum_at_solution = ehum(data, coef.beta());
  if (data.num_categories() != 3) report.objective_at_solution = report.ehum_at_solution;
  return report;
}

}  // namespace shum

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shum/hum.hpp"
#include "shum/kernel.hpp"
#include "shum/methods.hpp"
#include "shum/simulate.hpp"
#include "shum/smooth.hpp"

namespace shum {
namespace {

const Method kAll[] = {Method::SSHUM,        Method::NSHUM,        Method::Empirical, Method::ParametricNormal,
                       Method::MinMax,       Method::FrechetUpper, Method::FrechetLower, Method::Naive};

MarkerDataset scenario_draw(int id, std::size_t n, std::uint64_t seed) {
  return generate_scenario(ScenarioConfig::builtin(id, {n, n, n}, 1, seed), 0);
}

TEST(FitNaive, UnitNormWeights) {
  std::mt19937_64 gen(83);
  for (std::size_t d : {1u, 4u, 14u}) {
    const auto data = testing::random_dataset(gen, {4, 4, 4}, d);
    const FitReport r = fit_naive(data);
    EXPECT_NEAR(r.coefficients.unit_norm().norm(), 1.0, 1e-15);
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(d); ++k) {
      EXPECT_NEAR(r.coefficients.unit_norm()[k], 1.0 / std::sqrt(static_cast<double>(d)), 1e-15);
    }
    EXPECT_EQ(r.iterations, 0u);
  }
}

TEST(Methods, ReportedEhumMatchesReevaluation) {
  const MarkerDataset data = scenario_draw(3, 40, 9);
  for (Method m : kAll) {
    const FitReport r = fit_method(m, data);
    EXPECT_EQ(r.ehum_at_solution, ehum_fast(report_scores(data, r)).value()) << to_string(m);
    EXPECT_GE(r.ehum_at_solution, 0.0);
    EXPECT_LE(r.ehum_at_solution, 1.0);
    EXPECT_EQ(r.coefficients.beta()[static_cast<Eigen::Index>(r.coefficients.anchor())], 1.0);
    const Eigen::VectorXd scaled = 3.7 * r.coefficients.beta();
    if (m != Method::MinMax) EXPECT_EQ(ehum(data, scaled), r.ehum_at_solution);
  }
}

TEST(Methods, ObjectiveMatchesFreshEvaluation) {
  const MarkerDataset data = scenario_draw(1, 30, 10);
  const FitReport s = fit_sshum(data);
  EXPECT_NEAR(s.objective_at_solution,
              shum_value(data, s.coefficients.beta(), SmoothingSpec::make(KernelKind::Sigmoid, *s.lambda)), 1e-12);
  const FitReport n = fit_nshum(data, {}, 0.3);
  EXPECT_EQ(*n.lambda, 0.3);
  EXPECT_NEAR(n.objective_at_solution,
              shum_value(data, n.coefficients.beta(), SmoothingSpec::make(KernelKind::NormalCdf, 0.3)), 1e-12);
  const FitReport f = fit_frechet(data);
  EXPECT_EQ(f.objective_at_solution, frechet_upper(project_scores(data, f.coefficients.beta())));
}

TEST(Methods, SingleMarker) {
  std::mt19937_64 gen(89);
  const auto data = testing::random_dataset(gen, {6, 6, 6}, 1);
  for (Method m : {Method::SSHUM, Method::NSHUM, Method::Empirical, Method::ParametricNormal, Method::FrechetUpper}) {
    const FitReport r = fit_method(m, data);
    EXPECT_EQ(r.coefficients.beta(), Eigen::VectorXd::Ones(1)) << to_string(m);
    EXPECT_EQ(r.ehum_at_solution, ehum(data, Eigen::VectorXd::Ones(1)));
  }
  EXPECT_THROW(fit_minmax(data), Error);
}

TEST(FitSshum, TinyInstanceMatchesGrid) {
  // Three categories, one subject each, two markers; SHUM over the free weight.
  const auto data = MarkerDataset::create(
      {Eigen::RowVector2d(0.0, 0.3), Eigen::RowVector2d(0.5, 0.1), Eigen::RowVector2d(0.7, 1.2)});
  const double lambda = 0.5;
  const FitReport r = fit_sshum(data, {}, lambda);
  const SmoothingSpec spec = SmoothingSpec::make(KernelKind::Sigmoid, lambda);
  double best = -1.0;
  for (int i = -200000; i <= 200000; ++i) {
    const double c = i * 1e-4;
    Eigen::Vector2d beta = r.coefficients.anchor() == 0 ? Eigen::Vector2d(1.0, c) : Eigen::Vector2d(c, 1.0);
    best = std::max(best, shum_value(data, beta, spec));
  }
  EXPECT_NEAR(r.objective_at_solution, best, 1e-4);
  EXPECT_GE(r.objective_at_solution, best - 1e-12);
}

TEST(FitEmpirical, RecoversSeparatingMarker) {
  std::mt19937_64 gen(97);
  auto data = testing::random_dataset(gen, {20, 20, 20}, 3, 0.0);
  std::vector<Eigen::MatrixXd> cats = data.categories();
  for (std::size_t j = 0; j < 3; ++j) cats[j].col(1).array() += 10.0 * static_cast<double>(j);
  data = data.with_categories(cats);
  EXPECT_GE(fit_empirical(data).ehum_at_solution, 0.99);
}

TEST(Methods, TwoCategoryReduction) {
  std::mt19937_64 gen(101);
  const auto data = testing::random_dataset(gen, {25, 30}, 2, 0.8);
  const FitReport e = fit_empirical(data);
  const Scores s = project_scores(data, e.coefficients.beta());
  EXPECT_EQ(e.ehum_at_solution, pairwise_auc(s[0], s[1]));
  const FitReport up = fit_frechet(data, {}, FrechetBound::Upper);
  const FitReport lo = fit_frechet(data, {}, FrechetBound::Lower);
  EXPECT_EQ(up.objective_at_solution, up.ehum_at_solution);
  EXPECT_EQ(lo.objective_at_solution, lo.ehum_at_solution);
}

TEST(Parametric, ClosedFormDirections) {
  const Eigen::Vector3d delta(1.0, 1.1, 1.2);
  const auto exch = closed_form_direction(make_covariance(CovarianceKind::Exchangeable, 0.2, 3), delta);
  EXPECT_NEAR(exch[1] / exch[0], 1.189, 5e-4);
  EXPECT_NEAR(exch[2] / exch[0], 1.378, 5e-4);
  const auto ar = closed_form_direction(make_covariance(CovarianceKind::AR1, 0.2, 3), delta);
  EXPECT_NEAR(ar[0], 0.8125, 5e-5);
  EXPECT_NEAR(ar[1], 0.7333, 5e-5);
  EXPECT_NEAR(ar[2], 1.0208, 5e-5);
  EXPECT_NEAR(ar[1] / ar[0], 0.903, 5e-4);
  EXPECT_NEAR(ar[2] / ar[0], 1.256, 5e-4);
  const auto iso = closed_form_direction(Eigen::Matrix3d::Identity(), Eigen::Vector3d(1.0, 1.0, 1.0));
  EXPECT_EQ(iso, Eigen::VectorXd(Eigen::Vector3d(1.0, 1.0, 1.0)));
  try {
    closed_form_direction(Eigen::Matrix2d::Ones(), Eigen::Vector2d::Ones());
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularCovariance);
  }
}

TEST(Parametric, IdentityCovarianceGivesSpacingDirection) {
  // Perfectly balanced design: within-category scatter is the identity.
  Eigen::MatrixXd base(4, 2);
  base << 1, 1, 1, -1, -1, 1, -1, -1;
  base *= std::sqrt(0.75);
  std::vector<Eigen::MatrixXd> cats;
  for (int j = 0; j < 3; ++j) cats.push_back(base.rowwise() + Eigen::RowVector2d(2.0 * j, 0.5 * j));
  const auto data = MarkerDataset::create(cats);
  const ParametricModel model = ParametricModel::estimate(data);
  EXPECT_TRUE(model.pooled_covariance.isApprox(Eigen::Matrix2d::Identity(), 1e-12));
  const FitReport r = fit_parametric_normal(data);
  EXPECT_EQ(r.coefficients.anchor(), 1u);
  EXPECT_NEAR(r.coefficients.beta()[0], 4.0, 1e-12);
}

TEST(Parametric, NormalVusMatchesTrapezoidOracle) {
  std::mt19937_64 gen(103);
  const auto data = testing::random_dataset(gen, {30, 25, 35}, 2, 0.7);
  const ParametricModel model = ParametricModel::estimate(data);
  const Eigen::Vector2d beta(0.6, 1.0);
  double m[3];
  double s[3];
  for (int j = 0; j < 3; ++j) {
    m[j] = beta.dot(model.means[j]);
    s[j] = std::sqrt(beta.dot(model.covariances[j] * beta));
  }
  double trap = 0.0;
  const double h = 1e-3;
  for (double u = -12.0; u <= 12.0; u += h) {
    const double v = m[1] + s[1] * u;
    trap += h * kernel_eval(KernelKind::NormalCdf, (v - m[0]) / s[0], 1.0) *
            kernel_eval(KernelKind::NormalCdf, (m[2] - v) / s[2], 1.0) * std::exp(-0.5 * u * u) /
            std::sqrt(2.0 * M_PI);
  }
  EXPECT_NEAR(normal_vus(model, beta), trap, 1e-8);
}

TEST(Parametric, IntegralModeImprovesClosedForm) {
  const MarkerDataset data = scenario_draw(4, 60, 12);
  const FitReport closed = fit_parametric_normal(data);
  const FitReport integral = fit_parametric_normal(data, {}, ParametricMode::IntegralM3);
  const ParametricModel model = ParametricModel::estimate(data);
  EXPECT_GE(integral.objective_at_solution, normal_vus(model, closed.coefficients.beta()));
  const auto two = testing::random_dataset(*new std::mt19937_64(1), {5, 5}, 2);
  try {
    fit_parametric_normal(two, {}, ParametricMode::IntegralM3);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongCategoryCount);
  }
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(201, -8.0, 8.0, x, w);
  double sum_w = 0.0;
  double sum_x4 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum_w += w[i];
    sum_x4 += w[i] * std::pow(x[i], 4);
  }
  EXPECT_NEAR(sum_w, 16.0, 1e-12);
  EXPECT_NEAR(sum_x4, 2.0 * std::pow(8.0, 5) / 5.0, 1e-7);
}

TEST(FitMinmax, DegenerateAndMaxOnly) {
  std::mt19937_64 gen(107);
  auto base = testing::random_dataset(gen, {10, 10, 10}, 1);
  std::vector<Eigen::MatrixXd> same;
  for (const auto& x : base.categories()) {
    Eigen::MatrixXd y(x.rows(), 2);
    y << x, x;
    same.push_back(y);
  }
  const auto twin = MarkerDataset::create(same);
  const FitReport r = fit_minmax(twin);
  EXPECT_EQ(r.coefficient_names, (std::vector<std::string>{"max", "min"}));
  EXPECT_EQ(r.ehum_at_solution, ehum(base, Eigen::VectorXd::Ones(1)));

  // Marker 0 carries the signal and is always the row maximum; marker 1 is noise below it.
  std::normal_distribution<double> z;
  std::vector<Eigen::MatrixXd> cats;
  for (int j = 0; j < 3; ++j) {
    Eigen::MatrixXd x(60, 2);
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = 100.0 + 3.0 * j + z(gen);
      x(i, 1) = z(gen);
    }
    cats.push_back(x);
  }
  const auto data = MarkerDataset::create(cats);
  const FitReport mm = fit_minmax(data);
  EXPECT_LT(std::abs(mm.coefficients.beta()[1]), 0.25);
  EXPECT_GE(mm.ehum_at_solution, ehum(data, Eigen::Vector2d(1.0, 0.0)) - 0.02);
}

TEST(Bootstrap, DegenerateDataGivesZeroSe) {
  const auto data = MarkerDataset::create(
      {Eigen::RowVector2d(0.0, 0.1), Eigen::RowVector2d(1.0, 0.5), Eigen::RowVector2d(2.0, 1.5)});
  const BootstrapSummary b = bootstrap_se(data, Method::Empirical, 2, 5);
  EXPECT_EQ(b.replicates, 2u);
  EXPECT_EQ(b.failed_replicates, 0u);
  for (Eigen::Index k = 0; k < 2; ++k) {
    EXPECT_EQ(b.coef_se[k], 0.0);
    EXPECT_EQ(b.unit_coef_se[k], 0.0);
  }
  EXPECT_EQ(b.ehum_se, 0.0);
  EXPECT_EQ(b.replicate_seeds, (std::vector<std::uint64_t>{5, 6}));
  EXPECT_THROW(bootstrap_se(data, Method::Empirical, 1, 5), Error);
}

TEST(Bootstrap, DeterministicAcrossRunsAndWorkers) {
  const MarkerDataset data = scenario_draw(1, 25, 13);
  const BootstrapSummary a = bootstrap_se(data, Method::SSHUM, 12, 7, {}, 1);
  const BootstrapSummary b = bootstrap_se(data, Method::SSHUM, 12, 7, {}, 1);
  const BootstrapSummary c = bootstrap_se(data, Method::SSHUM, 12, 7, {}, 4);
  EXPECT_EQ(a.coef_se, b.coef_se);
  EXPECT_EQ(a.coef_se, c.coef_se);
  EXPECT_EQ(a.unit_coef_se, c.unit_coef_se);
  EXPECT_EQ(a.ehum_se, c.ehum_se);
  EXPECT_GT(a.ehum_se, 0.0);
  EXPECT_EQ(a.coef_se[static_cast<Eigen::Index>(a.anchor)], 0.0);
}

TEST(Bootstrap, StratifiedResamplePreservesSizes) {
  const MarkerDataset data = scenario_draw(2, 9, 14);
  const MarkerDataset r = stratified_resample(data, 99);
  EXPECT_EQ(r.category_sizes(), data.category_sizes());
  for (std::size_t j = 0; j < 3; ++j) {
    for (Eigen::Index i = 0; i < r.category(j).rows(); ++i) {
      bool found = false;
      for (Eigen::Index k = 0; k < data.category(j).rows() && !found; ++k) {
        found = r.category(j).row(i) == data.category(j).row(k);
      }
      EXPECT_TRUE(found);
    }
  }
  EXPECT_TRUE(stratified_resample(data, 99) == r);
}

TEST(Methods, SmoothKernelsAgreeOnSeparatedData) {
  const MarkerDataset data = scenario_draw(1, 60, 15);
  EXPECT_NEAR(fit_sshum(data).ehum_at_solution, fit_nshum(data).ehum_at_solution, 0.01);
}

}  // namespace
}  // namespace shum

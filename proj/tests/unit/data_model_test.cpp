#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shum/data_model.hpp"
#include "shum/simulate.hpp"

namespace shum {
namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto dir = std::filesystem::temp_directory_path() / "shum_data_model_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << contents;
  return path;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(MarkerDataset, RejectsDegenerateInput) {
  EXPECT_EQ(code_of([] { MarkerDataset::create({Eigen::MatrixXd::Ones(2, 2)}); }),
            ErrorCode::FewerThanTwoCategories);
  EXPECT_EQ(code_of([] { MarkerDataset::create({Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd(0, 2)}); }),
            ErrorCode::EmptyCategory);
  EXPECT_EQ(code_of([] { MarkerDataset::create({Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(2, 3)}); }),
            ErrorCode::DimensionMismatch);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(1, 1) = std::nan("");
  EXPECT_EQ(code_of([&] { MarkerDataset::create({Eigen::MatrixXd::Ones(2, 2), bad}); }),
            ErrorCode::InvalidArgument);
}

TEST(MarkerDataset, DefaultNamesAndSizes) {
  const auto data = MarkerDataset::create({Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(4, 2)});
  EXPECT_EQ(data.num_categories(), 2u);
  EXPECT_EQ(data.num_markers(), 2u);
  EXPECT_EQ(data.total_size(), 7u);
  EXPECT_EQ(data.marker_names(), (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(data.category_labels(), (std::vector<std::string>{"0", "1"}));
}

TEST(Coefficients, AnchorInvariants) {
  EXPECT_THROW(Coefficients(Eigen::Vector2d(1.0, 2.0), 1), Error);
  const Coefficients c(Eigen::Vector3d(2.0, 3.0, 1.0), 2);
  EXPECT_EQ(c.theta(), Eigen::Vector2d(2.0, 3.0));
  const Coefficients n = Coefficients::normalized(Eigen::Vector3d(2.0, 4.0, 8.0), 1);
  EXPECT_EQ(n.beta(), Eigen::Vector3d(0.5, 1.0, 2.0));
  EXPECT_THROW(Coefficients::normalized(Eigen::Vector2d(-1.0, 1.0), 0), Error);
  EXPECT_DOUBLE_EQ(Coefficients(Eigen::Vector2d(1.0, 1.0), 0).unit_norm().norm(), 1.0);
}

TEST(AnchoredToFull, Examples) {
  EXPECT_EQ(anchored_to_full(Eigen::Vector2d(2.0, 3.0), 2), Eigen::Vector3d(2.0, 3.0, 1.0));
  EXPECT_EQ(anchored_to_full(Eigen::VectorXd(0), 0), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(code_of([] { anchored_to_full(Eigen::Vector2d(2.0, 3.0), 3); }), ErrorCode::IndexOutOfRange);
}

TEST(AnchoredToFull, RoundTripIsIdentity) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + rep % 5;
    const std::size_t anchor = static_cast<std::size_t>(rep % d);
    Eigen::VectorXd beta(d);
    for (int k = 0; k < d; ++k) beta[k] = z(gen);
    beta[static_cast<Eigen::Index>(anchor)] = 1.0;
    EXPECT_EQ(anchored_to_full(extract_theta(beta, anchor), anchor), beta);
  }
}

TEST(ProjectScores, UnitZeroAndOracle) {
  std::mt19937_64 gen(5);
  const auto data = testing::random_dataset(gen, {3, 2, 4}, 3);
  const Scores unit = project_scores(data, Eigen::Vector3d::Unit(1));
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < unit[j].size(); ++i) {
      EXPECT_EQ(unit[j][i], data.category(j)(static_cast<Eigen::Index>(i), 1));
    }
  }
  for (const auto& s : project_scores(data, Eigen::Vector3d::Zero())) {
    for (double v : s) EXPECT_EQ(v, 0.0);
  }
  const Eigen::Vector3d beta(0.3, -1.7, 2.2);
  const Scores fast = project_scores(data, beta);
  const Scores slow = testing::dot_loop_scores(data, beta);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < fast[j].size(); ++i) EXPECT_NEAR(fast[j][i], slow[j][i], 1e-14);
  }
  EXPECT_EQ(code_of([&] { project_scores(data, Eigen::Vector2d::Ones()); }), ErrorCode::DimensionMismatch);
}

TEST(ProjectScores, IsLinear) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> z;
  const auto data = testing::random_dataset(gen, {5, 5}, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Vector3d b1(z(gen), z(gen), z(gen));
    const Eigen::Vector3d b2(z(gen), z(gen), z(gen));
    const double a = z(gen);
    const double b = z(gen);
    const Scores lhs = project_scores(data, a * b1 + b * b2);
    const Scores s1 = project_scores(data, b1);
    const Scores s2 = project_scores(data, b2);
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t i = 0; i < lhs[j].size(); ++i) {
        EXPECT_NEAR(lhs[j][i], a * s1[j][i] + b * s2[j][i], 1e-12);
      }
    }
  }
}

TEST(Method, NamesRoundTrip) {
  for (Method m : {Method::SSHUM, Method::NSHUM, Method::Empirical, Method::ParametricNormal, Method::MinMax,
                   Method::FrechetUpper, Method::FrechetLower, Method::Naive}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_EQ(parse_method("frechet-upper"), Method::FrechetUpper);
  EXPECT_FALSE(parse_method("lasso").has_value());
}

TEST(LoadCsv, GroupsRankMapsAndDropsIncompleteRows) {
  const auto path = temp_file("basic.csv",
                              "id,y,a,b\n"
                              "1,3,1.5,2\n"
                              "2,1,0.5,NA\n"
                              "3,7,2.5,3\n"
                              "4,1,0.1,0.2\n"
                              "5,,1,1\n"
                              "6,3,\"1.25\",1\n");
  const CsvLoadResult r = load_csv(path, "y", {"b", "a"});
  EXPECT_EQ(r.rows_read, 6u);
  EXPECT_EQ(r.rows_dropped, 2u);
  EXPECT_EQ(r.data.category_labels(), (std::vector<std::string>{"1", "3", "7"}));
  EXPECT_EQ(r.data.category_sizes(), (std::vector<std::size_t>{1, 2, 1}));
  EXPECT_EQ(r.data.marker_names(), (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(r.data.category(0)(0, 0), 0.2);
  EXPECT_EQ(r.data.category(1)(1, 1), 1.25);
  EXPECT_EQ(r.data.total_size(), r.rows_read - r.rows_dropped);
}

TEST(LoadCsv, ErrorPaths) {
  const auto one = temp_file("one.csv", "y,a\n1,1\n1,2\n");
  EXPECT_EQ(code_of([&] { load_csv(one, "y", {"a"}); }), ErrorCode::FewerThanTwoCategories);
  EXPECT_EQ(code_of([&] { load_csv(one, "y", {"zzz"}); }), ErrorCode::MissingColumn);
  const auto bad = temp_file("bad.csv", "y,a\n1,1\n2,abc\n");
  try {
    load_csv(bad, "y", {"a"});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnparseableNumeric);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { load_csv("/nonexistent/file.csv", "y", {"a"}); }), ErrorCode::IoError);
}

TEST(LoadCsv, DropCountOnPaperSizedFile) {
  // 118 subjects in groups of 44/43/31, ten of them with a missing marker.
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  std::string text = "group";
  for (int k = 1; k <= 14; ++k) text += ",m" + std::to_string(k);
  text += "\n";
  const int sizes[3] = {44, 43, 31};
  int row = 0;
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < sizes[g]; ++i, ++row) {
      text += std::to_string(g + 1);
      for (int k = 0; k < 14; ++k) text += "," + (row % 12 == 5 && k == row % 14 ? std::string("NA") : std::to_string(z(gen)));
      text += "\n";
    }
  }
  std::vector<std::string> markers;
  for (int k = 1; k <= 14; ++k) markers.push_back("m" + std::to_string(k));
  const CsvLoadResult r = load_csv(temp_file("adrc_like.csv", text), "group", markers);
  EXPECT_EQ(r.rows_read, 118u);
  EXPECT_EQ(r.rows_dropped, 10u);
  EXPECT_EQ(r.data.total_size(), 108u);
}

TEST(WriteCsv, RoundTripReproducesSimulatedData) {
  const auto cfg = ScenarioConfig::builtin(2, {7, 5, 6}, 1, 42);
  const MarkerDataset original = generate_scenario(cfg, 0);
  const auto path = std::filesystem::temp_directory_path() / "shum_data_model_test" / "roundtrip.csv";
  write_csv(original, path, "outcome");
  const CsvLoadResult back = load_csv(path, "outcome", original.marker_names());
  EXPECT_EQ(back.rows_dropped, 0u);
  EXPECT_TRUE(back.data == original);
}

}  // namespace
}  // namespace shum

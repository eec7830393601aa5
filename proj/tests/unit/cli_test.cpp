#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "shum_app/app.hpp"

namespace fs = std::filesystem;

namespace shum::app {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("shum_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Three ordered groups, four normal markers with increasing mean spacing.
  fs::path write_data(std::size_t per_group = 20, std::uint64_t seed = 5) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z;
    const fs::path p = dir_ / "data.csv";
    std::ofstream f(p);
    f.precision(17);
    f << "id,stage,m1,m2,m3,m4\n";
    int id = 0;
    for (int g = 0; g < 3; ++g) {
      for (std::size_t i = 0; i < per_group; ++i) {
        f << ++id << ',' << g;
        for (int k = 0; k < 4; ++k) f << ',' << z(gen) + 0.4 * (k + 1) * g;
        f << '\n';
      }
    }
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, HumNaiveWeightsAndVerify) {
  const auto data = write_data();
  const Result r = run_cli({"hum", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2,m3,m4",
                            "--verify"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("combined EHUM: "), std::string::npos);
  EXPECT_NE(r.out.find("random-guess baseline (1/M!): 0.1667"), std::string::npos);
  EXPECT_NE(r.out.find("fast and brute-force counts agree"), std::string::npos);
}

TEST_F(CliTest, FitNaivePrintsHalfAtFourMarkers) {
  const auto data = write_data();
  const Result r = run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2,m3,m4",
                            "--methods", "naive", "--out", (dir_ / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("unit 0.500"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out" / "fit_report.json"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "scores.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(CliTest, FitOutputsAreByteIdenticalAcrossRunsAndWorkers) {
  const auto data = write_data(15);
  std::vector<std::string> base{"fit",     "--data",      data.string(),         "--outcome", "stage",
                                "--markers", "m1,m2,m3",  "--methods",           "sshum,empirical,minmax",
                                "--bootstrap", "6",       "--seed",              "3"};
  auto with = [&](const std::string& out, const std::string& workers) {
    auto a = base;
    a.insert(a.end(), {"--out", (dir_ / out).string(), "--workers", workers});
    return a;
  };
  ASSERT_EQ(run_cli(with("a", "1")).code, kExitOk);
  ASSERT_EQ(run_cli(with("b", "1")).code, kExitOk);
  ASSERT_EQ(run_cli(with("c", "3")).code, kExitOk);
  for (const char* file : {"fit_report.json", "scores.csv"}) {
    const std::string a = slurp(dir_ / "a" / file);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / file)) << file;
    EXPECT_EQ(a, slurp(dir_ / "c" / file)) << file;
  }
}

TEST_F(CliTest, CsvFormatEmbedsHash) {
  const auto data = write_data();
  const Result r = run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2",
                            "--methods", "empirical", "--format", "csv", "--out", (dir_ / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string report = slurp(dir_ / "out" / "fit_report.csv");
  EXPECT_EQ(report.rfind("# manifest_hash=", 0), 0u);
  EXPECT_NE(report.find("method,term,estimate,se,unit_estimate,unit_se"), std::string::npos);
  const std::string manifest = slurp(dir_ / "out" / "manifest.json");
  const std::string hash = report.substr(16, report.find('\n') - 16);
  EXPECT_NE(manifest.find(hash), std::string::npos);
}

TEST_F(CliTest, InputErrorsExitTwo) {
  const auto data = write_data();
  const std::string out = (dir_ / "out").string();
  EXPECT_EQ(run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1,nope", "--out", out})
                .code,
            kExitInput);
  EXPECT_EQ(run_cli({"fit", "--data", (dir_ / "missing.csv").string(), "--outcome", "stage", "--markers", "m1",
                     "--out", out})
                .code,
            kExitInput);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "9", "--out", out}).code, kExitInput);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "1", "--n", "10,10", "--out", out}).code, kExitInput);
  EXPECT_EQ(run_cli({"hum", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2", "--weights",
                     "1,2,3"})
                .code,
            kExitInput);
  EXPECT_EQ(run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1", "--bootstrap", "1",
                     "--out", out})
                .code,
            kExitInput);
  EXPECT_EQ(run_cli({"bogus"}).code, kExitInput);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, MissingOutcomeIsNamed) {
  const auto data = write_data();
  const Result r = run_cli({"fit", "--data", data.string(), "--outcome", "grade", "--markers", "m1", "--out",
                            (dir_ / "out").string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("grade"), std::string::npos) << r.err;
}

TEST_F(CliTest, ZeroWeightsTieEverything) {
  const auto data = write_data();
  const Result r = run_cli({"hum", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2", "--weights",
                            "0,0"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("combined EHUM: 0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, FitFailureExitsThree) {
  const fs::path p = dir_ / "flat.csv";
  std::ofstream(p) << "y,a,b\n0,1,1\n1,1,1\n";
  const Result r = run_cli({"fit", "--data", p.string(), "--outcome", "y", "--markers", "a,b", "--methods",
                            "parametric", "--out", (dir_ / "out").string()});
  EXPECT_EQ(r.code, kExitFit) << r.err;
}

TEST_F(CliTest, FittedWeightsRoundTripThroughHum) {
  const auto data = write_data();
  const Result fit = run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2",
                              "--methods", "empirical", "--format", "csv", "--out", (dir_ / "out").string()});
  ASSERT_EQ(fit.code, kExitOk) << fit.err;
  std::istringstream csv(slurp(dir_ / "out" / "fit_report.csv"));
  std::string line;
  std::vector<std::string> weights;
  std::string ehum;
  while (std::getline(csv, line)) {
    if (line.rfind("empirical,", 0) != 0) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells[1] == "ehum") ehum = cells[2];
    if (cells[1] == "m1" || cells[1] == "m2") weights.push_back(cells[2]);
  }
  ASSERT_EQ(weights.size(), 2u);
  const Result hum = run_cli({"hum", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2",
                              "--weights", weights[0] + "," + weights[1]});
  ASSERT_EQ(hum.code, kExitOk) << hum.err;
  EXPECT_NE(hum.out.find("combined EHUM: " + ehum + "\n"), std::string::npos) << hum.out << " vs " << ehum;
}

TEST_F(CliTest, SimulateIsDeterministicAndReplayable) {
  const std::vector<std::string> args{"simulate", "--scenario", "4",       "--n",    "12,12,12",
                                      "--reps",   "3",          "--methods", "empirical,naive,sshum", "--seed", "5"};
  auto with = [&](const std::string& out, const std::string& workers) {
    auto a = args;
    a.insert(a.end(), {"--out", (dir_ / out).string(), "--workers", workers});
    return a;
  };
  const Result first = run_cli(with("a", "1"));
  ASSERT_EQ(first.code, kExitOk) << first.err;
  ASSERT_EQ(run_cli(with("b", "2")).code, kExitOk);
  const Result replay =
      run_cli({"replay", "--manifest", (dir_ / "a" / "manifest.json").string(), "--out", (dir_ / "c").string()});
  ASSERT_EQ(replay.code, kExitOk) << replay.err;
  for (const char* file : {"study.json", "study_hum.csv", "study_coefficients.csv"}) {
    const std::string a = slurp(dir_ / "a" / file);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir_ / "b" / file)) << file;
    EXPECT_EQ(a, slurp(dir_ / "c" / file)) << file;
  }
}

TEST_F(CliTest, SingleReplicateWarns) {
  const Result r = run_cli({"simulate", "--scenario", "1", "--n", "8,8,8", "--reps", "1", "--methods", "naive",
                            "--out", (dir_ / "out").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, OutDirFromEnvironment) {
  const auto data = write_data();
  const fs::path target = dir_ / "env_out";
  ::setenv("SHUM_OUT_DIR", target.c_str(), 1);
  const Result r = run_cli({"fit", "--data", data.string(), "--outcome", "stage", "--markers", "m1,m2",
                            "--methods", "naive"});
  ::unsetenv("SHUM_OUT_DIR");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(target / "fit_report.json"));
}

}  // namespace
}  // namespace shum::app

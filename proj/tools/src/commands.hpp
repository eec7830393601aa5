#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shum::app {

struct RunContext {
  std::vector<std::string> args;
  std::filesystem::path out_dir;
  std::size_t workers = 1;
  std::ostream& out;
  std::ostream& err;
};

struct FitOptions {
  std::filesystem::path data;
  std::string outcome;
  std::string markers;
  std::string methods = "sshum,nshum,empirical,parametric,minmax,frechet,naive";
  std::string lambda = "auto";
  std::size_t bootstrap = 0;
  bool log_transform = false;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string parametric_mode = "closed";
};

struct SimulateOptions {
  int scenario = 1;
  std::string sizes = "60,60,60";
  std::size_t reps = 200;
  std::string methods = "empirical,minmax,parametric,frechet,sshum,nshum";
  std::string lambda = "auto";
  std::uint64_t seed = 1;
};

struct HumOptions {
  std::filesystem::path data;
  std::string outcome;
  std::string markers;
  std::string weights = "naive";
  bool verify = false;
};

int cmd_fit(const FitOptions& opt, const RunContext& ctx);
int cmd_simulate(const SimulateOptions& opt, const RunContext& ctx);
int cmd_hum(const HumOptions& opt, const RunContext& ctx);

}  // namespace shum::app

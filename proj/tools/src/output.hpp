#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "shum/data_model.hpp"

namespace shum::app {

using Json = nlohmann::ordered_json;

/// Bad flags or unusable input; maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A method failed on the full data; maps to exit code 3.
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Machine format: 17 significant digits, "nan" for missing.
std::string fmt17(double x);
/// Human format: fixed decimals.
std::string fixed(double x, int decimals = 3);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);
std::string file_digest(const std::filesystem::path& path);

Json to_json(const Eigen::VectorXd& v);

void write_file(const std::filesystem::path& path, std::string_view contents);

/// Parses "a,b,c" into trimmed non-empty items.
std::vector<std::string> split_list(std::string_view text);

/// Run record written next to the outputs. The hash covers the configuration
/// only (no paths, timings or worker count), so it is stable across reruns.
struct Manifest {
  std::string command;
  std::vector<std::string> command_line;
  std::vector<std::string> replay_args;
  Json config;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::size_t workers = 1;
  Json timings = Json::object();

  std::string hash() const;
  Json to_json() const;
};

/// Args without --out/--workers (and their values), used for replay.
std::vector<std::string> strip_run_flags(const std::vector<std::string>& args);

}  // namespace shum::app

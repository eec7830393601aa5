#include "shum_app/app.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "output.hpp"
#include "shum/parallel.hpp"

namespace shum::app {
namespace {

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("SHUM_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "shum_out";
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("SHUM_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw InputError(std::string("SHUM_WORKERS must be a positive integer, got '") + env + "'");
  }
  return default_workers();
}

std::vector<std::string> replay_command(const std::filesystem::path& manifest_path,
                                        const std::vector<std::string>& args) {
  std::ifstream in(manifest_path);
  if (!in) throw InputError("cannot read manifest " + manifest_path.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  if (!manifest.contains("replay_args") || !manifest["replay_args"].is_array()) {
    throw InputError("manifest " + manifest_path.string() + " has no replay_args");
  }
  std::vector<std::string> replay = manifest["replay_args"].get<std::vector<std::string>>();
  // Carry over --out/--workers given to the replay command itself.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--out" || args[i] == "--workers") {
      replay.push_back(args[i]);
      replay.push_back(args[i + 1]);
    }
  }
  return replay;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Linear biomarker combinations for ordered categories by hyper-volume under the ROC manifold", "shum"};
  cli.set_version_flag("--version", SHUM_VERSION_STRING);
  cli.require_subcommand(1);

  std::string out_dir;
  std::size_t workers = 0;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (env SHUM_OUT_DIR, default shum_out)");
    sub->add_option("--workers", workers, "Worker threads (env SHUM_WORKERS, default all cores)")
        ->check(CLI::PositiveNumber);
  };

  FitOptions fit;
  auto* fit_cmd = cli.add_subcommand("fit", "Fit combination methods to a CSV dataset");
  fit_cmd->add_option("--data", fit.data, "CSV file with a header row")->required();
  fit_cmd->add_option("--outcome", fit.outcome, "Ordinal outcome column")->required();
  fit_cmd->add_option("--markers", fit.markers, "Comma-separated marker columns")->required();
  fit_cmd->add_option("--methods", fit.methods, "Comma-separated methods")->capture_default_str();
  fit_cmd->add_option("--lambda", fit.lambda, "Smoothing parameter or 'auto' (1/sqrt(n))")
      ->capture_default_str();
  fit_cmd->add_option("--bootstrap", fit.bootstrap, "Stratified bootstrap replicates (0 = none)");
  fit_cmd->add_flag("--log-transform", fit.log_transform, "Take logs of all markers before fitting");
  fit_cmd->add_option("--seed", fit.seed, "Bootstrap seed")->capture_default_str();
  fit_cmd->add_option("--format", fit.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  fit_cmd->add_option("--parametric-mode", fit.parametric_mode, "closed or integral (three categories)")
      ->check(CLI::IsMember({"closed", "integral"}))
      ->capture_default_str();
  add_run_flags(fit_cmd);

  SimulateOptions sim;
  auto* sim_cmd = cli.add_subcommand("simulate", "Run a Monte Carlo study on a built-in scenario");
  sim_cmd->add_option("--scenario", sim.scenario, "Scenario 1-4")->required();
  sim_cmd->add_option("--n", sim.sizes, "Category sizes, e.g. 60,60,60")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
  sim_cmd->add_option("--methods", sim.methods, "Comma-separated methods")->capture_default_str();
  sim_cmd->add_option("--lambda", sim.lambda, "Smoothing parameter or 'auto'")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  add_run_flags(sim_cmd);

  HumOptions hum;
  auto* hum_cmd = cli.add_subcommand("hum", "Empirical HUM of a fixed combination");
  hum_cmd->add_option("--data", hum.data, "CSV file with a header row")->required();
  hum_cmd->add_option("--outcome", hum.outcome, "Ordinal outcome column")->required();
  hum_cmd->add_option("--markers", hum.markers, "Comma-separated marker columns")->required();
  hum_cmd->add_option("--weights", hum.weights, "Comma-separated weights or 'naive'")->capture_default_str();
  hum_cmd->add_flag("--verify", hum.verify, "Cross-check against brute-force enumeration");

  std::string manifest_path;
  auto* replay_cmd = cli.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay_cmd->add_option("--manifest", manifest_path, "manifest.json from an earlier run")->required();
  add_run_flags(replay_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    cli.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*replay_cmd) {
      std::vector<std::string> passthrough;
      if (!out_dir.empty()) passthrough.insert(passthrough.end(), {"--out", out_dir});
      if (workers > 0) passthrough.insert(passthrough.end(), {"--workers", std::to_string(workers)});
      return run(replay_command(manifest_path, passthrough), out, err);
    }
    const RunContext ctx{args, out_dir.empty() ? default_out_dir() : std::filesystem::path(out_dir),
                         workers > 0 ? workers : default_worker_count(), out, err};
    if (*fit_cmd) return cmd_fit(fit, ctx);
    if (*sim_cmd) return cmd_simulate(sim, ctx);
    return cmd_hum(hum, ctx);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const FitError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFit;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace shum::app

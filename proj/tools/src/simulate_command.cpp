#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "shum_app/app.hpp"
#include "output.hpp"
#include "shum/simulate.hpp"

namespace shum::app {
namespace {

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) throw InputError("--n entries must be positive integers, got '" + item + "'");
    sizes.push_back(static_cast<std::size_t>(v));
  }
  if (sizes.size() != 3) throw InputError("--n needs three category sizes for the built-in scenarios");
  return sizes;
}

Json config_json(const ScenarioConfig& cfg) {
  Json j;
  j["scenario"] = cfg.scenario_id;
  j["family"] = cfg.family == Family::Normal ? "normal" : "weibull";
  j["sizes"] = cfg.sizes;
  j["replications"] = cfg.replications;
  if (cfg.family == Family::Normal) {
    Json means = Json::array();
    for (const auto& mu : cfg.means) means.push_back(to_json(mu));
    j["means"] = means;
    j["covariance"] = cfg.covariance == CovarianceKind::Identity       ? "identity"
                      : cfg.covariance == CovarianceKind::Exchangeable ? "exchangeable"
                                                                        : "ar1";
    j["rho"] = cfg.rho;
  } else {
    j["weibull_shape"] = to_json(cfg.weibull_shape);
    j["weibull_scale"] = to_json(cfg.weibull_scale);
  }
  return j;
}

std::string hum_csv(const StudySummary& s, const std::string& hash) {
  std::ostringstream os;
  os << "# manifest_hash=" << hash << "\n";
  os << "method,fits,failures,ehum_mean,ehum_sd\n";
  for (const auto& m : s.methods) {
    os << to_string(m.method) << ',' << m.fits << ',' << m.failures << ',' << fmt17(m.ehum_mean) << ','
       << fmt17(m.ehum_sd) << '\n';
  }
  return os.str();
}

std::string coef_csv(const StudySummary& s, const std::string& hash) {
  std::ostringstream os;
  os << "# manifest_hash=" << hash << "\n";
  os << "method,coefficient,anchor,used,truth,mean,bias,sd\n";
  const double nan = std::nan("");
  for (const auto& m : s.methods) {
    for (std::size_t k = 0; k < m.coefficient_names.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const bool known = m.truth.size() > 0;
      os << to_string(m.method) << ',' << m.coefficient_names[k] << ',' << m.coefficient_names[m.anchor] << ','
         << m.coef_used << ',' << fmt17(known ? m.truth[i] : nan) << ',' << fmt17(m.coef_mean[i]) << ','
         << fmt17(known ? m.coef_bias[i] : nan) << ',' << fmt17(m.coef_sd[i]) << '\n';
    }
  }
  return os.str();
}

Json study_json(const StudySummary& s, const std::string& hash) {
  Json j;
  j["manifest_hash"] = hash;
  j["version"] = SHUM_VERSION_STRING;
  j["config"] = config_json(s.config);
  j["warnings"] = s.warnings;
  j["methods"] = Json::array();
  for (const auto& m : s.methods) {
    Json mj;
    mj["method"] = std::string(to_string(m.method));
    mj["fits"] = m.fits;
    mj["failures"] = m.failures;
    mj["ehum_mean"] = m.ehum_mean;
    mj["ehum_sd"] = m.ehum_sd;
    mj["coefficient_names"] = m.coefficient_names;
    mj["anchor"] = m.anchor;
    mj["coefficients_used"] = m.coef_used;
    mj["coefficient_mean"] = to_json(m.coef_mean);
    mj["coefficient_sd"] = to_json(m.coef_sd);
    mj["truth"] = m.truth.size() > 0 ? to_json(m.truth) : Json(nullptr);
    mj["coefficient_bias"] = m.coef_bias.size() > 0 ? to_json(m.coef_bias) : Json(nullptr);
    j["methods"].push_back(mj);
  }
  return j;
}

void print_tables(std::ostream& out, const StudySummary& s) {
  out << "scenario " << s.config.scenario_id << ", n = (";
  for (std::size_t j = 0; j < s.config.sizes.size(); ++j) out << (j ? "," : "") << s.config.sizes[j];
  out << "), " << s.config.replications << " replicates, seed " << s.config.seed << "\n\n";
  out << "method         EHUM mean (sd)\n";
  for (const auto& m : s.methods) {
    std::string name(to_string(m.method));
    name.resize(14, ' ');
    out << name << " " << fixed(m.ehum_mean) << " (" << fixed(m.ehum_sd) << ")\n";
  }
  out << "\nmethod         coefficient  truth    mean     bias     sd\n";
  for (const auto& m : s.methods) {
    for (std::size_t k = 0; k < m.coefficient_names.size(); ++k) {
      if (k == m.anchor) continue;
      const auto i = static_cast<Eigen::Index>(k);
      std::string name(to_string(m.method));
      name.resize(14, ' ');
      std::string coef = m.coefficient_names[k];
      coef.resize(12, ' ');
      const bool known = m.truth.size() > 0;
      auto col = [](const std::string& v) {
        std::string c = v;
        c.resize(std::max<std::size_t>(c.size(), 8), ' ');
        return c;
      };
      out << name << " " << coef << " " << col(known ? fixed(m.truth[i]) : "NA") << " "
          << col(fixed(m.coef_mean[i])) << " " << col(known ? fixed(m.coef_bias[i]) : "NA") << " "
          << fixed(m.coef_sd[i]) << "\n";
    }
  }
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, const RunContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  if (opt.scenario < 1 || opt.scenario > 4) {
    throw InputError("--scenario must be 1, 2, 3 or 4, got " + std::to_string(opt.scenario));
  }
  if (opt.reps < 1) throw InputError("--reps must be at least 1");
  std::vector<Method> methods;
  for (const auto& name : split_list(opt.methods)) {
    const auto m = parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
  }
  if (methods.empty()) throw InputError("no methods given");
  MethodConfig method_cfg;
  if (opt.lambda != "auto") {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(opt.lambda, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != opt.lambda.size() || !(v > 0.0) || !std::isfinite(v)) {
      throw InputError("--lambda must be 'auto' or a positive number, got '" + opt.lambda + "'");
    }
    method_cfg.lambda = v;
  }

  const ScenarioConfig cfg = ScenarioConfig::builtin(opt.scenario, parse_sizes(opt.sizes), opt.reps, opt.seed);

  Manifest manifest;
  manifest.command = "simulate";
  manifest.command_line = ctx.args;
  manifest.replay_args = strip_run_flags(ctx.args);
  manifest.seed = opt.seed;
  manifest.workers = ctx.workers;
  manifest.config = config_json(cfg);
  manifest.config["methods"] = split_list(opt.methods);
  manifest.config["lambda"] = opt.lambda;
  const std::string hash = manifest.hash();

  StudySummary summary;
  try {
    summary = run_study(cfg, methods, method_cfg, ctx.workers);
  } catch (const Error& e) {
    throw FitError(e.what());
  }
  for (const auto& w : summary.warnings) ctx.err << "warning: " << w << "\n";
  for (const auto& m : summary.methods) manifest.timings[std::string(to_string(m.method))] = m.seconds;

  write_file(ctx.out_dir / "study_hum.csv", hum_csv(summary, hash));
  write_file(ctx.out_dir / "study_coefficients.csv", coef_csv(summary, hash));
  write_file(ctx.out_dir / "study.json", study_json(summary, hash).dump(2) + "\n");
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(ctx.out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

  print_tables(ctx.out, summary);
  ctx.out << "\nwrote " << ctx.out_dir.string() << "/study.json\n";
  return kExitOk;
}

}  // namespace shum::app

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "shum_app/app.hpp"
#include "output.hpp"
#include "shum/hum.hpp"
#include "shum/kernel.hpp"
#include "shum/methods.hpp"
#include "shum/smooth.hpp"

namespace shum::app {
namespace {

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> methods;
  for (const auto& name : split_list(text)) {
    const auto m = parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
  }
  if (methods.empty()) throw InputError("no methods given");
  return methods;
}

std::optional<double> parse_lambda(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(value > 0.0) || !std::isfinite(value)) {
    throw InputError("--lambda must be 'auto' or a positive number, got '" + text + "'");
  }
  return value;
}

MarkerDataset log_transform(const MarkerDataset& data) {
  std::vector<Eigen::MatrixXd> logged;
  for (const auto& x : data.categories()) {
    if ((x.array() <= 0.0).any()) {
      throw InputError("--log-transform needs strictly positive marker values");
    }
    logged.push_back(x.array().log().matrix());
  }
  return data.with_categories(std::move(logged));
}

bool is_smooth_method(Method m) { return m == Method::SSHUM || m == Method::NSHUM; }

struct MethodRun {
  FitReport report;
  std::optional<double> rule_fraction;
  double seconds = 0.0;
};

Json report_json(const MethodRun& run) {
  const FitReport& r = run.report;
  Json j;
  j["method"] = std::string(to_string(r.method));
  j["coefficient_names"] = r.coefficient_names;
  j["anchor"] = r.coefficients.anchor();
  j["coefficients"] = to_json(r.coefficients.beta());
  j["unit_coefficients"] = to_json(r.coefficients.unit_norm());
  j["ehum"] = r.ehum_at_solution;
  j["objective"] = r.objective_at_solution;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["lambda"] = r.lambda ? Json(*r.lambda) : Json(nullptr);
  j["lambda_rule_fraction"] = run.rule_fraction ? Json(*run.rule_fraction) : Json(nullptr);
  j["marker_ordering"] = r.marker_ordering;
  if (r.bootstrap) {
    const BootstrapSummary& b = *r.bootstrap;
    Json bj;
    bj["replicates"] = b.replicates;
    bj["failed_replicates"] = b.failed_replicates;
    bj["anchored_used"] = b.anchored_used;
    bj["coefficient_se"] = to_json(b.coef_se);
    bj["unit_coefficient_se"] = to_json(b.unit_coef_se);
    bj["ehum_se"] = b.ehum_se;
    bj["replicate_seeds"] = b.replicate_seeds;
    j["bootstrap"] = bj;
  } else {
    j["bootstrap"] = nullptr;
  }
  return j;
}

std::string report_csv(const std::vector<MethodRun>& runs, const std::string& hash) {
  std::ostringstream os;
  os << "# manifest_hash=" << hash << "\n";
  os << "method,term,estimate,se,unit_estimate,unit_se\n";
  const double nan = std::nan("");
  for (const auto& run : runs) {
    const FitReport& r = run.report;
    const auto method = std::string(to_string(r.method));
    const Eigen::VectorXd unit = r.coefficients.unit_norm();
    for (std::size_t k = 0; k < r.coefficient_names.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      os << method << ',' << r.coefficient_names[k] << ',' << fmt17(r.coefficients.beta()[i]) << ','
         << fmt17(r.bootstrap ? r.bootstrap->coef_se[i] : nan) << ',' << fmt17(unit[i]) << ','
         << fmt17(r.bootstrap ? r.bootstrap->unit_coef_se[i] : nan) << '\n';
    }
    const double se = r.bootstrap ? r.bootstrap->ehum_se : nan;
    os << method << ",ehum," << fmt17(r.ehum_at_solution) << ',' << fmt17(se) << ','
       << fmt17(r.ehum_at_solution) << ',' << fmt17(se) << '\n';
    os << method << ",objective," << fmt17(r.objective_at_solution) << ",nan,nan,nan\n";
  }
  return os.str();
}

std::string scores_csv(const MarkerDataset& data, const std::vector<MethodRun>& runs,
                       const std::string& hash) {
  std::vector<Scores> per_method;
  for (const auto& run : runs) per_method.push_back(report_scores(data, run.report));
  std::ostringstream os;
  os << "# manifest_hash=" << hash << "\n";
  os << "category,subject";
  for (const auto& run : runs) os << ',' << to_string(run.report.method);
  os << '\n';
  for (std::size_t j = 0; j < data.num_categories(); ++j) {
    for (std::size_t i = 0; i < data.category_size(j); ++i) {
      os << data.category_labels()[j] << ',' << i;
      for (const auto& s : per_method) os << ',' << fmt17(s[j][i]);
      os << '\n';
    }
  }
  return os.str();
}

void print_tables(std::ostream& out, const CsvLoadResult& loaded, const MarkerDataset& data,
                  const std::vector<MethodRun>& runs) {
  out << "rows read " << loaded.rows_read << ", dropped " << loaded.rows_dropped << ", category sizes";
  for (std::size_t n : data.category_sizes()) out << ' ' << n;
  out << "\nrandom-guess baseline (1/M!): " << fixed(random_guess_baseline(data.num_categories()), 4)
      << "\n";
  for (const auto& run : runs) {
    const FitReport& r = run.report;
    out << "\n" << to_string(r.method);
    if (r.lambda) out << "  lambda " << fixed(*r.lambda, 4);
    if (run.rule_fraction) out << "  separated pairs " << fixed(100.0 * *run.rule_fraction, 1) << "%";
    out << "\n";
    std::size_t width = 6;
    for (const auto& name : r.coefficient_names) width = std::max(width, name.size());
    const Eigen::VectorXd unit = r.coefficients.unit_norm();
    auto cell = [](double v, const std::optional<double>& se) {
      std::string s = fixed(v);
      if (se) s += " (" + fixed(*se) + ")";
      return s;
    };
    for (std::size_t k = 0; k < r.coefficient_names.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      std::optional<double> se;
      std::optional<double> unit_se;
      if (r.bootstrap) {
        se = r.bootstrap->coef_se[i];
        unit_se = r.bootstrap->unit_coef_se[i];
      }
      std::string name = r.coefficient_names[k];
      name.resize(width, ' ');
      std::string anchored = cell(r.coefficients.beta()[i], se);
      anchored.resize(std::max<std::size_t>(anchored.size(), 16), ' ');
      out << "  " << name << "  " << anchored << "  unit " << cell(unit[i], unit_se) << "\n";
    }
    std::string label = "EHUM";
    label.resize(width, ' ');
    std::optional<double> ehum_se;
    if (r.bootstrap) ehum_se = r.bootstrap->ehum_se;
    out << "  " << label << "  " << cell(r.ehum_at_solution, ehum_se) << "\n";
  }
}

}  // namespace

int cmd_fit(const FitOptions& opt, const RunContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::string> markers = split_list(opt.markers);
  if (markers.empty()) throw InputError("--markers needs at least one column name");
  const std::vector<Method> methods = parse_methods(opt.methods);
  const std::optional<double> lambda = parse_lambda(opt.lambda);
  if (opt.bootstrap == 1) throw InputError("--bootstrap needs at least 2 replicates (or 0 for none)");

  CsvLoadResult loaded = [&] {
    try {
      return load_csv(opt.data, opt.outcome, markers);
    } catch (const Error& e) {
      throw InputError(e.what());
    }
  }();
  const MarkerDataset data = opt.log_transform ? log_transform(loaded.data) : loaded.data;

  MethodConfig cfg;
  cfg.lambda = lambda;
  cfg.parametric_mode =
      opt.parametric_mode == "integral" ? ParametricMode::IntegralM3 : ParametricMode::ClosedForm;

  Manifest manifest;
  manifest.command = "fit";
  manifest.command_line = ctx.args;
  manifest.replay_args = strip_run_flags(ctx.args);
  manifest.seed = opt.seed;
  manifest.workers = ctx.workers;
  manifest.config = Json{{"data_digest", file_digest(opt.data)},
                         {"outcome", opt.outcome},
                         {"markers", markers},
                         {"methods", split_list(opt.methods)},
                         {"lambda", opt.lambda},
                         {"bootstrap", opt.bootstrap},
                         {"log_transform", opt.log_transform},
                         {"format", opt.format},
                         {"parametric_mode", opt.parametric_mode}};
  const std::string hash = manifest.hash();

  std::vector<MethodRun> runs;
  for (Method m : methods) {
    const auto t0 = std::chrono::steady_clock::now();
    MethodRun run;
    try {
      run.report = fit_method(m, data, cfg);
      if (opt.bootstrap >= 2) {
        run.report.bootstrap = bootstrap_se(data, m, opt.bootstrap, opt.seed, cfg, ctx.workers,
                                            run.report.coefficients.anchor());
      }
    } catch (const Error& e) {
      throw FitError("method " + std::string(to_string(m)) + " failed: " + e.what());
    }
    if (is_smooth_method(m)) {
      run.rule_fraction = lambda_rule_check(data, run.report.coefficients.beta(), *run.report.lambda);
      if (*run.rule_fraction < kLambdaRuleWarnFraction) {
        ctx.err << "warning: " << to_string(m) << ": only " << fixed(100.0 * *run.rule_fraction, 1)
                << "% of adjacent pairs satisfy |score difference| / lambda > 5\n";
      }
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.timings[std::string(to_string(m))] = run.seconds;
    runs.push_back(std::move(run));
  }

  Json report;
  report["manifest_hash"] = hash;
  report["version"] = SHUM_VERSION_STRING;
  report["data"] = Json{{"rows_read", loaded.rows_read},
                        {"rows_dropped", loaded.rows_dropped},
                        {"category_labels", data.category_labels()},
                        {"category_sizes", data.category_sizes()},
                        {"markers", data.marker_names()},
                        {"log_transform", opt.log_transform}};
  report["random_guess_baseline"] = random_guess_baseline(data.num_categories());
  report["methods"] = Json::array();
  for (const auto& run : runs) report["methods"].push_back(report_json(run));

  if (opt.format == "csv") {
    write_file(ctx.out_dir / "fit_report.csv", report_csv(runs, hash));
  } else {
    write_file(ctx.out_dir / "fit_report.json", report.dump(2) + "\n");
  }
  write_file(ctx.out_dir / "scores.csv", scores_csv(data, runs, hash));
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(ctx.out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

  print_tables(ctx.out, loaded, data, runs);
  ctx.out << "\nwrote " << (ctx.out_dir / (opt.format == "csv" ? "fit_report.csv" : "fit_report.json")).string()
          << "\n";
  return kExitOk;
}

}  // namespace shum::app

#include <cmath>

#include "commands.hpp"
#include "shum_app/app.hpp"
#include "output.hpp"
#include "shum/hum.hpp"

namespace shum::app {

int cmd_hum(const HumOptions& opt, const RunContext& ctx) {
  const std::vector<std::string> markers = split_list(opt.markers);
  if (markers.empty()) throw InputError("--markers needs at least one column name");
  const auto d = static_cast<Eigen::Index>(markers.size());

  Eigen::VectorXd weights(d);
  if (opt.weights == "naive") {
    weights.setConstant(1.0 / std::sqrt(static_cast<double>(d)));
  } else {
    const auto items = split_list(opt.weights);
    if (static_cast<Eigen::Index>(items.size()) != d) {
      throw InputError("--weights has " + std::to_string(items.size()) + " entries but " +
                       std::to_string(d) + " markers were given");
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      const std::string& item = items[static_cast<std::size_t>(k)];
      std::size_t used = 0;
      try {
        weights[k] = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || !std::isfinite(weights[k])) {
        throw InputError("weight '" + item + "' is not a number");
      }
    }
  }

  const CsvLoadResult loaded = [&] {
    try {
      return load_csv(opt.data, opt.outcome, markers);
    } catch (const Error& e) {
      throw InputError(e.what());
    }
  }();
  const MarkerDataset& data = loaded.data;
  const HumMode mode = opt.verify ? HumMode::Verify : HumMode::Fast;

  auto evaluate = [&](const Eigen::VectorXd& beta) {
    try {
      return evaluate_ehum(project_scores(data, beta), mode).value();
    } catch (const Error& e) {
      throw InputError(e.what());
    }
  };

  ctx.out << "rows read " << loaded.rows_read << ", dropped " << loaded.rows_dropped << "\n";
  ctx.out << "combined EHUM: " << fmt17(evaluate(weights)) << "\n\n";
  std::size_t width = 6;
  for (const auto& name : markers) width = std::max(width, name.size());
  std::string head = "marker";
  head.resize(width, ' ');
  ctx.out << head << "  EHUM\n";
  for (Eigen::Index k = 0; k < d; ++k) {
    std::string name = markers[static_cast<std::size_t>(k)];
    name.resize(width, ' ');
    ctx.out << name << "  " << fixed(evaluate(Eigen::VectorXd::Unit(d, k))) << "\n";
  }
  ctx.out << "\nrandom-guess baseline (1/M!): " << fixed(random_guess_baseline(data.num_categories()), 4)
          << "\n";
  if (opt.verify) ctx.out << "fast and brute-force counts agree\n";
  return kExitOk;
}

}  // namespace shum::app

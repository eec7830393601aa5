#include <cmath>
#include <limits>

#include "shum/methods.hpp"
#include "shum/parallel.hpp"
#include "shum/random.hpp"
#include "stats.hpp"

namespace shum {

MarkerDataset stratified_resample(const MarkerDataset& data, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> drawn;
  drawn.reserve(data.num_categories());
  for (const auto& x : data.categories()) {
    Eigen::MatrixXd y(x.rows(), x.cols());
    const auto n = static_cast<std::size_t>(x.rows());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      y.row(i) = x.row(static_cast<Eigen::Index>(rng.uniform_index(n)));
    }
    drawn.push_back(std::move(y));
  }
  return data.with_categories(std::move(drawn));
}

BootstrapSummary bootstrap_se(const MarkerDataset& data, Method method, std::size_t replicates,
                              std::uint64_t seed, const MethodConfig& cfg, std::size_t workers,
                              std::optional<std::size_t> anchor) {
  if (replicates < 2) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least two replicates");
  const std::size_t a = anchor ? *anchor : fit_method(method, data, cfg).coefficients.anchor();

  struct Replicate {
    bool ok = false;
    Eigen::VectorXd beta;
    double ehum = 0.0;
  };
  std::vector<Replicate> results(replicates);
  std::vector<std::uint64_t> seeds(replicates);
  for (std::size_t b = 0; b < replicates; ++b) seeds[b] = seed + b;

  parallel_for(replicates, workers, [&](std::size_t b) {
    try {
      const FitReport fit = fit_method(method, stratified_resample(data, seeds[b]), cfg);
      results[b] = Replicate{true, fit.coefficients.beta(), fit.ehum_at_solution};
    } catch (const Error&) {
      results[b] = Replicate{};
    }
  });

  BootstrapSummary out;
  out.replicates = replicates;
  out.anchor = a;
  out.replicate_seeds = seeds;
  for (const auto& r : results) out.failed_replicates += r.ok ? 0 : 1;
  if (static_cast<double>(out.failed_replicates) >
      kMaxBootstrapFailureRate * static_cast<double>(replicates)) {
    throw Error(ErrorCode::BootstrapUnstable,
                std::to_string(out.failed_replicates) + " of " + std::to_string(replicates) +
                    " bootstrap replicates failed");
  }

  Eigen::Index d = 0;
  for (const auto& r : results) {
    if (r.ok) d = r.beta.size();
  }
  if (a >= static_cast<std::size_t>(d)) throw Error(ErrorCode::IndexOutOfRange, "bootstrap anchor out of range");
  const auto ai = static_cast<Eigen::Index>(a);
  std::vector<std::vector<double>> anchored(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> unit(static_cast<std::size_t>(d));
  std::vector<double> ehums;
  for (const auto& r : results) {
    if (!r.ok) continue;
    ehums.push_back(r.ehum);
    const Eigen::VectorXd u = r.beta / r.beta.norm();
    const bool usable = r.beta[ai] > 0.0;
    out.anchored_used += usable ? 1 : 0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      unit[kk].push_back(u[k]);
      if (usable) anchored[kk].push_back(r.beta[k] / r.beta[ai]);
    }
  }
  out.coef_se.resize(d);
  out.unit_coef_se.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    out.coef_se[k] = out.anchored_used >= 2 ? detail::sample_sd(anchored[kk])
                                            : std::numeric_limits<double>::quiet_NaN();
    out.unit_coef_se[k] = detail::sample_sd(unit[kk]);
  }
  out.ehum_se = detail::sample_sd(ehums);
  return out;
}

}  // namespace shum

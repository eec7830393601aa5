#include "shum/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace shum {
namespace {

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

[[noreturn]] void non_finite(const Eigen::VectorXd& at) {
  throw Error(ErrorCode::NonFiniteObjective, "objective or gradient not finite at " + describe(at));
}

double checked(double value, const Eigen::VectorXd& at) {
  if (!std::isfinite(value)) non_finite(at);
  return value;
}

bool stagnated(double before, double after, double rtol) {
  const double scale = std::max({std::abs(before), std::abs(after), 1e-300});
  return std::abs(after - before) <= rtol * scale;
}

}  // namespace

void OptimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, what);
  };
  require(max_iterations > 0, "max_iterations must be positive");
  require(gradient_tolerance > 0, "gradient tolerance must be positive");
  require(relative_tolerance > 0, "relative tolerance must be positive");
  require(armijo > 0 && armijo < 1, "Armijo constant must lie in (0, 1)");
  require(backtracking > 0 && backtracking < 1, "backtracking factor must lie in (0, 1)");
  require(nm_reflect > 0 && nm_expand > 1 && nm_contract > 0 && nm_contract < 1 &&
              nm_shrink > 0 && nm_shrink < 1,
          "invalid Nelder-Mead coefficients");
  require(nm_diameter_tolerance > 0, "simplex tolerance must be positive");
  require(brent_half_width > 0, "Brent half width must be positive");
  require(brent_grid_points >= 3, "Brent grid needs at least 3 points");
  require(brent_tolerance > 0, "Brent tolerance must be positive");
}

// ---------------------------------------------------------------------------
// BFGS

OptimResult bfgs_maximize(const SmoothObjective& f, const Eigen::VectorXd& theta0,
                          const OptimConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = theta0.size();
  Eigen::VectorXd x = theta0;
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx) || !g.allFinite()) non_finite(x);

  OptimResult result;
  if (n == 0) {
    result.argmax = x;
    result.value = fx;
    result.converged = true;
    result.gradient_norm = 0.0;
    return result;
  }

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  Eigen::VectorXd x_new(n);
  Eigen::VectorXd g_new(n);
  std::size_t it = 0;
  std::size_t flat_steps = 0;
  bool converged = false;

  while (true) {
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (gnorm < cfg.gradient_tolerance) {
      converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;

    Eigen::VectorXd p = h * g;
    double slope = p.dot(g);
    if (!(slope > 0.0)) {
      h.setIdentity();
      scaled = false;
      p = g;
      slope = g.squaredNorm();
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int tries = 0; tries < 80; ++tries) {
      x_new = x + step * p;
      f_new = f(x_new, g_new);
      if (!std::isfinite(f_new) || !g_new.allFinite()) non_finite(x_new);
      if (f_new >= fx + cfg.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.backtracking;
    }
    if (!accepted) {
      // No ascent left at double precision along the search direction.
      converged = true;
      break;
    }
    ++it;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g - g_new;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 0.0) {
      if (!scaled) {
        h = Eigen::MatrixXd::Identity(n, n) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h * y;
      // H+ = (I - rho s y')H(I - rho y s') + rho s s'
      h += rho * ((1.0 + rho * y.dot(hy)) * (s * s.transpose()) - hy * s.transpose() -
                  s * hy.transpose());
    } else {
      h.setIdentity();
      scaled = false;
    }

    flat_steps = stagnated(fx, f_new, cfg.relative_tolerance) ? flat_steps + 1 : 0;
    x = x_new;
    fx = f_new;
    g = g_new;
    // One flat step is common right before superlinear convergence kicks in.
    if (flat_steps >= 2) {
      converged = true;
      break;
    }
  }

  result.argmax = x;
  result.value = fx;
  result.iterations = it;
  result.converged = converged;
  result.gradient_norm = g.cwiseAbs().maxCoeff();
  return result;
}

// ---------------------------------------------------------------------------
// Nelder-Mead

namespace {

struct SimplexRun {
  Eigen::VectorXd best;
  double best_value;  // of -f
  std::size_t iterations = 0;
  bool converged = false;
};

SimplexRun run_simplex(const Objective& f, const Eigen::VectorXd& start, double start_value,
                       std::size_t budget, const OptimConfig& cfg) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.push_back(start);
  vals.push_back(start_value);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd p = start;
    p[i] += std::max(0.1, 0.1 * std::abs(start[i]));
    vals.push_back(-checked(f(p), p));
    pts.push_back(std::move(p));
  }
  auto eval = [&](const Eigen::VectorXd& p) { return -checked(f(p), p); };

  std::vector<std::size_t> order(pts.size());
  SimplexRun run{start, start_value};
  std::size_t it = 0;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    {
      std::vector<Eigen::VectorXd> p2;
      std::vector<double> v2;
      for (auto k : order) {
        p2.push_back(pts[k]);
        v2.push_back(vals[k]);
      }
      pts.swap(p2);
      vals.swap(v2);
    }
    double diameter = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) diameter = std::max(diameter, (pts[k] - pts[0]).norm());
    if (diameter < cfg.nm_diameter_tolerance) {
      run.converged = true;
      break;
    }
    if (it >= budget) break;
    ++it;

    const std::size_t worst = pts.size() - 1;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < worst; ++k) centroid += pts[k];
    centroid /= static_cast<double>(worst);

    const Eigen::VectorXd xr = centroid + cfg.nm_reflect * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = centroid + cfg.nm_expand * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[worst - 1]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    if (fr < vals[worst]) {
      const Eigen::VectorXd xc = centroid + cfg.nm_contract * (xr - centroid);
      const double fc = eval(xc);
      if (fc <= fr) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
    } else {
      const Eigen::VectorXd xcc = centroid + cfg.nm_contract * (pts[worst] - centroid);
      const double fcc = eval(xcc);
      if (fcc < vals[worst]) {
        pts[worst] = xcc;
        vals[worst] = fcc;
        continue;
      }
    }
    for (std::size_t k = 1; k < pts.size(); ++k) {
      pts[k] = pts[0] + cfg.nm_shrink * (pts[k] - pts[0]);
      vals[k] = eval(pts[k]);
    }
  }
  run.best = pts[0];
  run.best_value = vals[0];
  run.iterations = it;
  return run;
}

}  // namespace

OptimResult nelder_mead_maximize(const Objective& f, const Eigen::VectorXd& theta0,
                                 const OptimConfig& cfg) {
  cfg.validate();
  const double f0 = checked(f(theta0), theta0);
  OptimResult result;
  if (theta0.size() == 0) {
    result.argmax = theta0;
    result.value = f0;
    result.converged = true;
    return result;
  }
  SimplexRun first = run_simplex(f, theta0, -f0, cfg.max_iterations, cfg);
  SimplexRun final_run = first;
  if (first.iterations < cfg.max_iterations) {
    SimplexRun second =
        run_simplex(f, first.best, first.best_value, cfg.max_iterations - first.iterations, cfg);
    second.iterations += first.iterations;
    if (second.best_value <= first.best_value) {
      final_run = second;
    } else {
      final_run.iterations = second.iterations;
      final_run.converged = second.converged;
    }
  }
  result.argmax = final_run.best;
  result.value = -final_run.best_value;
  result.iterations = final_run.iterations;
  result.converged = final_run.converged;
  return result;
}

// ---------------------------------------------------------------------------
// Brent

OptimResult brent_maximize_1d(const ScalarObjective& f, const OptimConfig& cfg) {
  cfg.validate();
  const double half = cfg.brent_half_width;
  const std::size_t points = cfg.brent_grid_points;
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) non_finite(Eigen::VectorXd::Constant(1, x));
    return v;
  };

  std::vector<double> grid(points);
  std::vector<double> values(points);
  std::size_t best = 0;
  for (std::size_t i = 0; i < points; ++i) {
    // symmetric construction so the midpoint is exactly 0 for odd grids
    grid[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
    if (2 * i + 1 == points) grid[i] = 0.0;
    values[i] = eval(grid[i]);
    const bool better = values[i] > values[best] ||
                        (values[i] == values[best] && std::abs(grid[i]) < std::abs(grid[best]));
    if (better) best = i;
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[best + 1 == points ? points - 1 : best + 1];

  // Brent's localmin on -f, seeded at the grid incumbent.
  constexpr double kGolden = 0.3819660112501051;
  const double rel = 1e-10;
  const double abs_tol = cfg.brent_tolerance / 4.0;
  double x = grid[best];
  double w = x;
  double v = x;
  double fx = -values[best];
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;
  std::size_t it = 0;
  bool converged = false;
  while (it < cfg.max_iterations) {
    const double m = 0.5 * (a + b);
    const double tol = rel * std::abs(x) + abs_tol;
    const double t2 = 2.0 * tol;
    if (std::abs(x - m) <= t2 - 0.5 * (b - a)) {
      converged = true;
      break;
    }
    ++it;
    double p = 0.0;
    double q = 0.0;
    double r = 0.0;
    if (std::abs(e) > tol) {
      r = (x - w) * (fx - fv);
      q = (x - v) * (fx - fw);
      p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p; else q = -q;
      r = e;
      e = d;
    }
    if (std::abs(p) < std::abs(0.5 * q * r) && p > q * (a - x) && p < q * (b - x)) {
      d = p / q;
      const double u = x + d;
      if (u - a < t2 || b - u < t2) d = x < m ? tol : -tol;
    } else {
      e = (x < m ? b : a) - x;
      d = kGolden * e;
    }
    const double u = x + (std::abs(d) >= tol ? d : (d > 0 ? tol : -tol));
    const double fu = -eval(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }

  OptimResult result;
  result.iterations = it;
  result.converged = converged;
  if (-fx > values[best]) {
    result.argmax = Eigen::VectorXd::Constant(1, x);
    result.value = -fx;
  } else {
    result.argmax = Eigen::VectorXd::Constant(1, grid[best]);
    result.value = values[best];
  }
  return result;
}

}  // namespace shum

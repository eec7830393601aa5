#pragma once

// Reference implementations used only by the tests. Each one is written the
// slow, obvious way and shares no code with the library paths it checks.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shum/data_model.hpp"

namespace shum::testing {

// Counts strictly increasing M-tuples by recursion over categories.
inline std::uint64_t ordered_tuples(const Scores& s, std::size_t level = 0, double prev = 0.0) {
  std::uint64_t total = 0;
  for (double v : s[level]) {
    if (level > 0 && !(v > prev)) continue;
    total += level + 1 == s.size() ? 1 : ordered_tuples(s, level + 1, v);
  }
  return total;
}

inline std::uint64_t tuple_total(const Scores& s) {
  std::uint64_t n = 1;
  for (const auto& v : s) n *= v.size();
  return n;
}

inline std::uint64_t mann_whitney_strict(const std::vector<double>& low, const std::vector<double>& high) {
  std::uint64_t count = 0;
  for (double h : high) {
    for (double l : low) count += h > l ? 1 : 0;
  }
  return count;
}

// Smoothed HUM summed over every tuple with an explicit product of kernels.
inline double naive_shum(const Scores& s, const std::function<double(double)>& g) {
  double total = 0.0;
  std::vector<std::size_t> idx(s.size(), 0);
  while (true) {
    double term = 1.0;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) term *= g(s[j + 1][idx[j + 1]] - s[j][idx[j]]);
    total += term;
    std::size_t k = s.size();
    while (k > 0) {
      --k;
      if (++idx[k] < s[k].size()) break;
      idx[k] = 0;
      if (k == 0) return total / static_cast<double>(tuple_total(s));
    }
  }
}

inline Scores dot_loop_scores(const MarkerDataset& data, const Eigen::VectorXd& beta) {
  Scores out(data.num_categories());
  for (std::size_t j = 0; j < data.num_categories(); ++j) {
    const auto& x = data.category(j);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < x.cols(); ++k) acc += beta[k] * x(i, k);
      out[j].push_back(acc);
    }
  }
  return out;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd up = x;
    Eigen::VectorXd down = x;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

inline Scores random_scores(std::mt19937_64& gen, std::size_t m, std::size_t max_n, bool ties) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_int_distribution<int> coarse(0, 4);
  std::normal_distribution<double> fine(0.0, 1.0);
  Scores s(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t n = size(gen);
    for (std::size_t i = 0; i < n; ++i) {
      s[j].push_back(ties ? static_cast<double>(coarse(gen)) + 0.3 * static_cast<double>(j)
                          : fine(gen) + 0.5 * static_cast<double>(j));
    }
  }
  return s;
}

// Normal markers with category j shifted by `shift * j` in every column.
inline MarkerDataset random_dataset(std::mt19937_64& gen, std::vector<std::size_t> sizes, std::size_t d,
                                    double shift = 1.0) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Eigen::MatrixXd> cats;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(sizes[j]), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = z(gen) + shift * static_cast<double>(j);
    }
    cats.push_back(std::move(x));
  }
  return MarkerDataset::create(std::move(cats));
}

}  // namespace shum::testing

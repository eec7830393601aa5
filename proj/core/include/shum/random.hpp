#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

namespace shum {

/// splitmix64 finaliser; used to derive independent replicate seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed of replicate `index` under `master`: mix_seed(master ^ index).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Portable generator. The standard distributions are implementation-defined,
/// so every transform is spelled out here to keep streams identical across
/// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Uniform integer in [0, n); n > 0. Rejection sampling, no modulo bias.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal by the Box-Muller transform; the second variate of each
  /// pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace shum

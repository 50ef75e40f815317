#pragma once

#include <cstdint>

namespace percolab {

/// splitmix64 finalizer; full avalanche, invertible.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Identifies one Monte Carlo sample. `seed` selects the experiment,
/// `stream` is the sample index. Every random draw is a pure function of
/// (seed, stream, edge identity), so results do not depend on traversal
/// order, worker count, or how often an edge is inspected.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSeed at(std::uint64_t sample_index) const noexcept {
    return {seed, stream + sample_index};
  }
};

constexpr double to_unit_interval(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
}

/// Folds (seed, stream) once per sample; combined with each edge key below.
constexpr std::uint64_t sample_key(RngSeed s) noexcept {
  return mix64(s.seed ^ mix64(s.stream + 0x5851f42d4c957f2dull));
}

/// Uniform variate attached to one edge in one sample.
constexpr double edge_uniform(std::uint64_t sample_key, std::uint64_t edge_key) noexcept {
  return to_unit_interval(mix64(sample_key ^ edge_key));
}

/// Sequential generator for instance generation and test fixtures.
/// Not used on estimator hot paths. Output is platform independent.
class SmallRng {
 public:
  explicit SmallRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Uniform in [0,1).
  double next_unit() noexcept { return to_unit_interval(next_u64()); }

  /// Uniform integer in [0, bound), bound > 0. Lemire multiply-shift.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

}  // namespace percolab

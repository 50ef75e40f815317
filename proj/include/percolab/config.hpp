#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "percolab/model.hpp"
#include "percolab/rng.hpp"

namespace percolab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inclusive coordinate range generator for measurement points: lo hi step.
struct PointRange {
  std::int64_t lo = 0, hi = 0, step = 1;
};

/// Parsed experiment configuration. The file format is flat `key = value`
/// lines with `#` comments; `point` may repeat. Unknown keys are an error.
struct ExperimentConfig {
  std::string command;

  ModelParams params;
  Box box;
  std::uint64_t n_samples = 0;
  RngSeed seed;

  // simulate
  std::vector<std::string> measure;  ///< subset of {tau, chi, tm, tmsup, gamma}
  std::vector<SplitPoint> points;    ///< explicit `point` keys
  std::optional<PointRange> long_points;   ///< generated (0,..|r,0,..)
  std::optional<PointRange> short_points;  ///< generated (s,0,..|0,..)
  double m = 0.0;
  std::vector<std::int64_t> L_values;  ///< cylinder radii for tmsup/gamma

  // certify
  double lambda = 0.5;
  double delta_frac = 0.5;
  double alpha_frac = 0.5;
  std::optional<std::uint64_t> gamma_L_max;

  // oracle-check
  std::vector<std::string> suites;  ///< subset of {hsl, fkg, mc}
  std::uint64_t n_random = 200;
  std::uint64_t n_model_boxes = 50;
  std::uint64_t n_mc_instances = 20;
  std::uint64_t mc_samples = 100000;
  std::optional<std::uint32_t> cap;

  // fit
  std::optional<std::string> input_csv;
  std::optional<double> fixed_q;

  /// Explicit points plus the expanded range generators.
  std::vector<SplitPoint> measurement_points() const;
};

/// Parses and validates a config for the given command. Throws ConfigError
/// with the offending key and line on any problem.
ExperimentConfig parse_config(const std::string& text, const std::string& command);

/// Reads the file and parses it.
ExperimentConfig load_config(const std::string& path, const std::string& command);

/// Canonical serialization; parse(serialize(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& c);

}  // namespace percolab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerocov/scenario.hpp"

namespace aerocov::cli {

enum class SweepParam { threshold_db, altitude, density };

std::string_view to_string(SweepParam p);

/// One swept axis, parsed from "param=start:stop:step". Stop is included
/// when it lies on the grid (up to 1e-9 of a step).
struct SweepSpec {
  SweepParam param = SweepParam::threshold_db;
  std::vector<double> grid;
};

/// Throws std::invalid_argument on an unknown parameter, a malformed range,
/// a zero step, or a step pointing away from stop.
SweepSpec parse_sweep(std::string_view text);

enum class Mode { analysis, simulation, both };

Mode parse_mode(std::string_view text);

struct RunOptions {
  Mode mode = Mode::analysis;
  std::vector<SweepSpec> sweeps;   ///< cartesian product, first sweep outermost
  double threshold_db = 0.0;       ///< used when threshold_db is not swept
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;            ///< 0 = hardware concurrency
};

/// CSV text plus whether every requested computation converged.
struct CommandOutput {
  std::string text;
  bool ok = true;
};

/// Columns: threshold_db, altitude_m, density_per_km2, coverage, coverage_los,
/// coverage_nlos, association_los, sim_coverage, sim_coverage_ci95.
CommandOutput cmd_coverage(const Scenario& base, const RunOptions& opts);

/// Columns: altitude_m, density_per_km2, rate_nats_per_hz, rate_mbps,
/// sim_rate_nats_per_hz, sim_rate_ci95. Threshold sweeps are rejected.
CommandOutput cmd_rate(const Scenario& base, const RunOptions& opts);

/// Columns: altitude_m, density_per_km2, association_los, association_nlos,
/// sim_association_los, sim_association_los_ci95.
CommandOutput cmd_association(const Scenario& base, const RunOptions& opts);

/// Tolerances applied by cmd_validate.
struct ValidateLimits {
  double ks = 0.02;
  double association = 0.01;
  double coverage = 0.03;
  double rate_relative = 0.03;
  std::uint64_t min_trials = 10000;
};

struct ValidateOptions {
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  /// Simulate on a different window than the analysis (perturbation runs).
  std::optional<double> sim_r_max;
  std::vector<double> thresholds_db = {-10, -5, 0, 5, 10, 15, 20};
  ValidateLimits limits;
  unsigned workers = 0;
};

/// Text report, one line per check; ok is false when any check failed.
CommandOutput cmd_validate(const Scenario& base, const ValidateOptions& opts);

/// Per-trial dump of the configured scenario.
CommandOutput cmd_simulate(const Scenario& base, std::optional<std::uint64_t> trials,
                           std::optional<std::uint64_t> seed, unsigned workers = 0);

}  // namespace aerocov::cli

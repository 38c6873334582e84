#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grassdim/dimension.hpp"
#include "grassdim/fractals.hpp"
#include "grassdim/grassmann.hpp"
#include "grassdim/marstrand.hpp"

namespace grassdim {

/// Parameters of a projection-sweep or census experiment, read from a flat
/// key = value file.  Unknown keys are rejected.
struct ExperimentConfig {
  std::string experiment;  ///< "preservation" | "constancy" | "marstrand-census"
  int n = 0, m = 0, l = 0;
  std::string fractal_key;
  int num_directions = 0;
  int j_min = 0, j_max = 0;  ///< the "levels = j_min:j_max" key
  std::uint64_t seed = 0;
  int depth = -1;  ///< generator depth; -1 selects the catalog default
  double sigma = 0.0, sigma_prime = 0.0;  ///< echoed census parameters
  double tau = 0.5, beta = 0.75;          ///< census threshold exponents
  std::string output_path;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct DirectionResult {
  Subspace subspace;
  DimensionEstimate estimate;
};

/// Distribution of per-direction dimension estimates for one cloud.
struct ExperimentReport {
  ExperimentConfig config;
  std::string version;
  std::vector<DirectionResult> per_direction;
  double empirical_sup = 0.0;
  double median = 0.0;
  double interquartile_range = 0.0;
  /// (epsilon, fraction of directions with estimate < empirical_sup - epsilon)
  std::vector<std::pair<double, double>> exceptional_fractions;
  bool success = false;
  double wall_time_ms = 0.0;
};

/// Sweep over sampled planes for a cloud whose reference dimension fits
/// inside the projected dimension (reference <= m - l); the distribution
/// should concentrate at the reference value.
ExperimentReport run_preservation(const ExperimentConfig& config);

/// The same sweep without the dimension cap; the distribution should
/// concentrate at its own supremum.
ExperimentReport run_constancy(const ExperimentConfig& config);

/// One level of the direction census: how many directions collapse the
/// extracted separated set into few tubes, and the average tube count.
struct CensusRow {
  int level = 0;
  double delta = 0.0;
  std::int64_t point_count = 0;
  std::int64_t direction_count = 0;
  std::int64_t bad_count = 0;
  double bound_rhs = 0.0;
  double mean_tube_count = 0.0;
  double spread_constant = 0.0;
};

struct CensusReport {
  ExperimentConfig config;
  std::string version;
  std::vector<CensusRow> rows;
  double wall_time_ms = 0.0;
};

/// Slices the named cloud horizontally, extracts a separated representative
/// set from the largest slab, and runs the direction census across the
/// level range.  Writes the report to config.output_path when set.
CensusReport run_marstrand_census(const ExperimentConfig& config);

/// JSON serialization; wall time can be excluded when comparing runs.
std::string report_to_json(const ExperimentReport& report,
                           bool include_wall_time = true);
ExperimentReport report_from_json(const std::string& text);
std::string census_to_json(const CensusReport& report,
                           bool include_wall_time = true);

/// Dispatch on config.experiment, running and persisting the report to
/// config.output_path (when set); returns the serialized report.
std::string run_experiment(const ExperimentConfig& config);

}  // namespace grassdim

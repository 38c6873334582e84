#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grassdim/grassmann.hpp"
#include "grassdim/grid.hpp"

namespace grassdim {

/// Result of a scaling-law fit: the fitted exponent, the scales used, the
/// per-scale statistics the fit consumed, and the fit's standard error.
struct DimensionEstimate {
  double value = 0.0;
  std::vector<int> scale_levels;  ///< dyadic levels (or distance bands) used
  std::vector<double> counts;     ///< per-level counts / band sums
  double slope_stderr = 0.0;
  std::string method;  ///< "box" | "energy-slope" | "l2-growth"
};

/// Number of occupied dyadic cells at the given level.  Exact.
std::int64_t box_count(const PointCloud& cloud, int level);

/// Least-squares slope of log2(occupied cells) against the level over
/// j in [j_min, j_max].  Every level's count must lie strictly between 10
/// and 0.1 * (point count); otherwise the sample cannot support the
/// requested scales and a SaturationError is thrown.
DimensionEstimate boxdim_estimate(const PointCloud& cloud, int j_min, int j_max);

/// Largest exponent s in s_grid at which the pair-mass distribution over
/// dyadic distance bands fits a finite-energy profile: band sums
/// S_j * 2^{js} stay bounded (by 4 * mass^2) with a non-increasing trend
/// (Theil-Sen slope <= 0.05 in log2).  Clouds of diameter > 1 are rescaled
/// to diameter 1 first.  Bands at or below four times the minimum point
/// separation are discarded as atomic artifacts, as is the outermost band;
/// fewer than 4 usable bands raises InsufficientRangeError.
DimensionEstimate energy_slope_dim(const PointCloud& cloud,
                                   const std::vector<double>& s_grid);

/// Exponent read off the growth of smoothed-density L2 norms of the cloud
/// projected onto v: fits log2 ||smoothed at 2^-j||_2^2 against log2(scale)
/// and reports subspace_dim + slope.  A projection occupying a single cell
/// at j_max short-circuits to 0 (a point mass).  Other saturation raises
/// SaturationError as in boxdim_estimate.
DimensionEstimate l2_growth_dim(const PointCloud& cloud, const Subspace& v,
                                int j_min, int j_max);

}  // namespace grassdim

#pragma once

#include <cstdint>
#include <vector>

#include "grassdim/grassmann.hpp"
#include "grassdim/grid.hpp"
#include "grassdim/rng.hpp"

namespace grassdim {

/// A delta-separated cloud with a verified spread condition: every ball of
/// radius r centered at a point holds at most spread_constant * (r/delta)^k
/// of the points.
struct DeltaKSet {
  PointCloud cloud;  ///< unit weights
  double delta = 0.0;
  double k = 0.0;
  bool separation_ok = false;    ///< all pairwise distances >= delta
  double spread_constant = 0.0;  ///< smallest constant observed to work
};

/// A finite, pairwise delta-separated family of m-planes.
struct DirectionSet {
  std::vector<Subspace> subspaces;
  double delta = 0.0;
  bool separation_ok = false;  ///< pairwise projection distance >= delta
};

/// Tube-occupancy statistics of a cloud across a direction set.
struct IncidenceReport {
  std::uint64_t energy = 0;        ///< sum over directions of sum of squared tube counts
  std::uint64_t energy_excess = 0; ///< energy minus N * (number of directions)
  std::vector<std::int64_t> per_direction_tube_counts;
  std::int64_t bad_count = 0;  ///< directions whose tube count is <= delta^tau * N
  double tau = 0.0;
  double bound_rhs = 0.0;  ///< delta^{tau-(n-m)m} * log(1/delta)
  std::int64_t point_count = 0;
};

/// Exact separation check plus the spread condition measured over balls
/// centered at (up to ball_samples of) the points with dyadic radii
/// delta, 2*delta, ... up to the diameter.
DeltaKSet verify_delta_k(const PointCloud& cloud, double delta, double k,
                         int ball_samples);

/// Occupied dyadic cells at the given level among the projected points, in
/// the plane's frame coordinates.  Equals box_count of the pushforward.
std::int64_t tube_count(const PointCloud& cloud, const Subspace& v, int level);

/// For each direction, buckets points by tube and sums squared occupancies;
/// reports the total across directions and the excess over the diagonal.
IncidenceReport incidence_energy(const PointCloud& cloud, const DirectionSet& dirs,
                                 int level);

/// Counts directions whose projection collapses the cloud into at most
/// delta^tau * N tubes, against the bound delta^{tau-(n-m)m} * log(1/delta).
/// The cloud must be delta-separated at the level's scale (GuardError
/// otherwise; the spread constant is measured and reported, not gated).
/// tau <= 0 makes the threshold vacuous: bad_count = 0.
IncidenceReport bad_direction_census(const PointCloud& cloud,
                                     const DirectionSet& dirs, int level,
                                     double tau);

/// Mean tube count over the direction set, for comparison against
/// delta^{(n-m)m-tau} * N.  Requires tau < beta and at least delta^-beta
/// directions (std::invalid_argument otherwise).
double average_tube_count(const PointCloud& cloud, const DirectionSet& dirs,
                          int level, double tau, double beta);

/// One representative point per occupied tube of v0 (the lexicographically
/// smallest), thinned greedily in lexicographic order until pairwise
/// delta-separated, then certified by verify_delta_k with k = dim v0.
DeltaKSet extract_delta_set(const PointCloud& slab_cloud, const Subspace& v0,
                            int level);

/// Greedy maximal delta-separated family of m-planes in R^n, packed from
/// 3 * delta^{-(n-m)m} uniform samples (capped at 300000 candidates).
DirectionSet build_direction_set(int n, int m, double delta, Rng& rng);

}  // namespace grassdim

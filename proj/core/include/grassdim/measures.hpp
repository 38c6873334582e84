#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "grassdim/grassmann.hpp"
#include "grassdim/grid.hpp"
#include "grassdim/rng.hpp"

namespace grassdim {

/// Piecewise-constant density at the given dyadic level: each occupied cell
/// gets density (mass inside)/delta^n.  Mass is conserved exactly.
GridMeasure discretize(const PointCloud& mu, int level);

/// Image of the cloud under orthogonal projection onto V, expressed in V's
/// frame coordinates (points become frame^T x); weights are preserved.
PointCloud pushforward(const PointCloud& mu, const Subspace& v);

/// Riesz s-energy of an atomic measure: sum over ordered pairs i != j of
/// w_i w_j |x_i - x_j|^{-s}.  Coincident distinct atoms make the energy
/// +infinity (returned, not thrown).  Clouds with < 2 points have energy 0.
double riesz_energy(const PointCloud& mu, double s);

/// Riesz s-energy of a grid measure, 0 < s < d.  Far cell pairs use
/// cell-center distances; touching pairs (including each cell against
/// itself) use precomputed pair integrals so the result stays finite and
/// tracks the continuum value.
double riesz_energy_grid(const GridMeasure& nu, double s);

/// Values of the smoothed density (mu convolved with the scaled kernel
/// delta^-n Psi(./delta)) sampled at the centers of dyadic cells at
/// eval_level.  Requires 2^-eval_level <= delta/4 (ResolutionError).
GridMeasure mollify(const PointCloud& mu, double delta, int eval_level);

/// Both orders of smoothing-at-scale-delta and projecting onto V, compared
/// in L2 on the image plane's evaluation grid.
struct CommutationReport {
  double project_then_smooth_norm = 0.0;  ///< L2 of the directly smoothed image
  double smooth_then_project_norm = 0.0;  ///< L2 of the fiber-integrated field
  double discrepancy = 0.0;               ///< relative L2 difference
  int eval_level = 0;
};

/// Computes the relative L2 discrepancy between (a) smoothing the projected
/// cloud with the projected kernel and (b) numerically integrating the
/// smoothed ambient field over fibers of the projection.  The two agree in
/// the continuum; the discrepancy is pure quadrature error and shrinks
/// roughly linearly in the evaluation cell size.
CommutationReport commutation_check(const PointCloud& mu, const Subspace& v,
                                    double delta, int eval_level);

/// Three L2 norms that bracket each other for projections of discretized
/// measures: smooth-the-image at scale delta, project the discretization at
/// scale delta, smooth-the-image at the inflated scale c*delta.
struct SandwichReport {
  double image_smoothed = 0.0;          ///< ||(projected mu) smoothed at delta||_2
  double discretized_projected = 0.0;   ///< ||projection of the delta-discretization||_2
  double image_smoothed_coarse = 0.0;   ///< ||(projected mu) smoothed at c*delta||_2
  double scale_factor = 0.0;            ///< the inflation constant c = 4*sqrt(n)
};

SandwichReport sandwich_check(const PointCloud& mu, const Subspace& v,
                              int delta_level, int eval_level);

/// Horizontal slab of thickness delta in the last vertical_dim coordinates.
struct Slab {
  int ambient_dim = 0;
  int vertical_dim = 0;
  double delta = 0.0;
  std::vector<std::int32_t> index;  ///< dyadic indices of the last coords
};

struct SlabPiece {
  Slab slab;
  PointCloud shadow;  ///< first (n - vertical_dim) coordinates of the piece
};

/// Partition a cloud in R^n by the dyadic indices of its last vertical_dim
/// coordinates at the given level; each piece is returned as its
/// (n - vertical_dim)-dimensional shadow with the original weights.  Pieces
/// are ordered by slab index (lexicographic).
std::vector<SlabPiece> slice_horizontal(const PointCloud& cloud,
                                        int vertical_dim, int level);

/// Monte-Carlo average, over uniformly sampled subspaces of the given
/// dimension, of the squared L2 norm of the projected cloud smoothed at
/// scale delta.  Comparable to the Riesz energy at exponent subspace_dim.
double avg_projection_l2(const PointCloud& nu, int subspace_dim, double delta,
                         int num_dirs, Rng& rng);

}  // namespace grassdim

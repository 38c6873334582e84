#pragma once

#include <Eigen/Dense>

#include "grassdim/rng.hpp"

namespace grassdim {

/// A linear subspace of R^n carried by an orthonormal frame.
///
/// The frame is an n x m matrix with orthonormal columns spanning the
/// subspace.  Frames are not canonical (any rotation of the columns spans
/// the same subspace); everything observable -- projection matrices,
/// distances, embeddings -- is frame-invariant.
class Subspace {
 public:
  /// Wraps an explicit orthonormal frame.  Throws std::invalid_argument if
  /// the columns are not orthonormal to 1e-9 or the shape is degenerate.
  explicit Subspace(Eigen::MatrixXd frame);

  /// Orthonormalizes the columns of `vectors` (which must have full column
  /// rank) and spans a subspace with them.
  static Subspace span_of(const Eigen::MatrixXd& vectors);

  int ambient_dim() const { return static_cast<int>(frame_.rows()); }
  int dim() const { return static_cast<int>(frame_.cols()); }
  const Eigen::MatrixXd& frame() const { return frame_; }

  /// The orthogonal projection matrix P = F F^T onto the subspace
  /// (symmetric, idempotent, trace m).
  Eigen::MatrixXd projection_matrix() const { return frame_ * frame_.transpose(); }

  /// Coordinates of ambient points in this frame: F^T x.
  Eigen::VectorXd coordinates_of(const Eigen::VectorXd& x) const {
    return frame_.transpose() * x;
  }

 private:
  Eigen::MatrixXd frame_;
};

/// Metric on the Grassmannian: the operator norm ||P_V - P_W||, i.e. the
/// sine of the largest principal angle between V and W.  Takes values in
/// [0, 1]; requires equal ambient dimension and equal subspace dimension.
double dpi_distance(const Subspace& v, const Subspace& w);

/// Draws a subspace from the rotation-invariant (uniform) distribution on
/// the Grassmannian of m-planes in R^n, by orthonormalizing an n x m matrix
/// of independent standard Gaussians (QR with positive diagonal).
Subspace sample_uniform(int n, int m, Rng& rng);

/// Embeds V <= R^(n-l) as V x R^l inside R^(n-l+l): the frame gains l new
/// rows and l new columns holding an identity block on the appended
/// coordinates.  Projection matrices satisfy P_lift = P_V (+) I_l, so the
/// lift is an isometry for dpi_distance.
Subspace vertical_lift(const Subspace& v, int l);

/// Orthonormal bases of V and W matched through the singular value
/// decomposition of F_V^T F_W.
///
/// The columns pair up: v_i . w_j = sigma_i * delta_ij with sigma_1 >= ...
/// >= sigma_m the principal cosines.  When dpi_distance(V, W) = d < 1 the
/// matched columns satisfy max_i |v_i - w_i| <= sqrt(2) * d.
struct AlignedBasisPair {
  Eigen::MatrixXd basis_v;          ///< n x m, orthonormal, spans V
  Eigen::MatrixXd basis_w;          ///< n x m, orthonormal, spans W
  Eigen::VectorXd principal_cosines;  ///< nonincreasing, in [0, 1]
};

/// Computes the aligned pair.  Throws DegeneratePairError when the frames
/// are numerically orthogonal (all pairings lost, which requires
/// dpi_distance(V, W) = 1).
AlignedBasisPair aligned_bases(const Subspace& v, const Subspace& w);

/// Image of a subspace under the wedge (minor) embedding: the unit vector
/// of all m x m minors of the frame, rows indexed by the C(n, m) size-m
/// subsets of {0..n-1} in lexicographic order.  The sign is fixed by making
/// the first coordinate of magnitude > 1e-12 positive, so the embedding is
/// frame-independent up to the unavoidable +-1 ambiguity handled by
/// wedge_distance.
struct PluckerPoint {
  int ambient_dim = 0;
  int dim = 0;
  Eigen::VectorXd coords;  ///< length C(n, m), unit norm
};

PluckerPoint plucker_embed(const Subspace& v);

/// Chordal distance min(||p - q||, ||p + q||) between wedge images.  It is
/// bilipschitz-equivalent to dpi_distance with dimension-dependent
/// constants.
double wedge_distance(const Subspace& v, const Subspace& w);

/// Monte-Carlo estimate of the uniform measure of the metric ball
/// {W : dpi_distance(W, center) <= delta}.
struct BallVolumeEstimate {
  double fraction = 0.0;   ///< estimated measure, in [0, 1]
  double std_error = 0.0;  ///< Monte-Carlo standard error of the estimate
};

/// Ball volumes scale like delta^(m(n-m)) as delta -> 0.
///
/// For delta > 1/2 the estimate is the empirical hit fraction over
/// `samples` uniform draws.  For small delta a direct draw almost never
/// lands in the ball, so the estimator switches to an exact reweighting:
/// the squared principal sines of a uniform plane against a fixed one form
/// a Jacobi ensemble whose density is known in closed form (normalization
/// by the Selberg integral), and the ball probability becomes a smooth
/// integral over [0,1]^m, which is Monte-Carlo averaged with the same
/// sample budget.  Both regimes are unbiased; they agree within error bars
/// where they overlap.
BallVolumeEstimate ball_volume_mc(const Subspace& center, double delta,
                                  int samples, Rng& rng);

}  // namespace grassdim

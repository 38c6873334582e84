#pragma once

// Shared cloud builders for the test suite.

#include <Eigen/Dense>
#include <cmath>

#include <grassdim/grid.hpp>
#include <grassdim/rng.hpp>

namespace testutil {

/// Equally spaced net of `count` points on a segment from `a` to `b`,
/// placed at cell midpoints (i + 0.5)/count along the segment.
inline grassdim::PointCloud segment_net(const Eigen::VectorXd& a,
                                        const Eigen::VectorXd& b, int count) {
  Eigen::MatrixXd pts(count, a.size());
  for (int i = 0; i < count; ++i) {
    double t = (i + 0.5) / count;
    pts.row(i) = ((1.0 - t) * a + t * b).transpose();
  }
  return grassdim::PointCloud::equal_weights(pts);
}

/// Axis-aligned planar net spanning [0,1]^2 x {z0} in R^3 with spacing 1/side.
inline grassdim::PointCloud square_net_r3(int side, double z0) {
  Eigen::MatrixXd pts(static_cast<long>(side) * side, 3);
  long r = 0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j, ++r)
      pts.row(r) << (i + 0.5) / side, (j + 0.5) / side, z0;
  return grassdim::PointCloud::equal_weights(pts);
}

/// Planar net spanning a unit square embedded with a generic (non-axis)
/// orthonormal in-plane basis; spacing is exactly 1/side.
inline grassdim::PointCloud tilted_square_net_r3(int side) {
  Eigen::Vector3d e(0.96, 0.2, 0.195);
  e.normalize();
  Eigen::Vector3d f(-0.21, 0.93, 0.2);
  f -= e * e.dot(f);
  f.normalize();
  Eigen::Vector3d anchor(0.02, 0.03, 0.05);
  Eigen::MatrixXd pts(static_cast<long>(side) * side, 3);
  long r = 0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j, ++r)
      pts.row(r) =
          (anchor + e * ((i + 0.5) / side) + f * ((j + 0.5) / side)).transpose();
  return grassdim::PointCloud::equal_weights(pts);
}

/// Uniform random cloud in [lo, hi]^dim.
inline grassdim::PointCloud random_cloud(int dim, int count, grassdim::Rng& rng,
                                         double lo = 0.0, double hi = 1.0) {
  Eigen::MatrixXd pts(count, dim);
  for (int i = 0; i < count; ++i)
    for (int d = 0; d < dim; ++d) pts(i, d) = lo + (hi - lo) * rng.uniform();
  return grassdim::PointCloud::equal_weights(pts);
}

}  // namespace testutil

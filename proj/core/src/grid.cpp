#include "grassdim/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace grassdim {

PointCloud PointCloud::equal_weights(Eigen::MatrixXd pts) {
  const auto n = pts.rows();
  if (n == 0) throw std::invalid_argument("PointCloud: empty point set");
  PointCloud c;
  c.points = std::move(pts);
  c.weights = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return c;
}

CellKey DyadicGrid::cell_of(const Eigen::VectorXd& x) const {
  if (x.size() != dim)
    throw std::invalid_argument("DyadicGrid::cell_of: dimension mismatch");
  if (dim > 16) throw std::invalid_argument("DyadicGrid: dim > 16 unsupported");
  CellKey k;
  k.len = static_cast<std::int8_t>(dim);
  const double scale = std::ldexp(1.0, level);
  for (int i = 0; i < dim; ++i) {
    const double v = std::floor(x[i] * scale);
    k.idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(v);
  }
  return k;
}

Eigen::VectorXd DyadicGrid::center_of(const CellKey& k) const {
  Eigen::VectorXd c(dim);
  const double d = delta();
  for (int i = 0; i < dim; ++i)
    c[i] = (static_cast<double>(k.idx[static_cast<std::size_t>(i)]) + 0.5) * d;
  return c;
}

double GridMeasure::total_mass() const {
  const double vol = std::pow(grid.delta(), grid.dim);
  double s = 0.0;
  for (const auto& [k, c] : cells) s += c;
  return s * vol;
}

double GridMeasure::l2_norm() const {
  const double vol = std::pow(grid.delta(), grid.dim);
  double s = 0.0;
  for (const auto& [k, c] : cells) s += c * c;
  return std::sqrt(s * vol);
}

}  // namespace grassdim

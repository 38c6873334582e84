#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace grassdim {

/// A weighted atomic measure: N points in R^n with positive weights.
/// Points are stored row-per-atom.
struct PointCloud {
  Eigen::MatrixXd points;   ///< N x n
  Eigen::VectorXd weights;  ///< length N, strictly positive

  int dim() const { return static_cast<int>(points.cols()); }
  std::int64_t size() const { return static_cast<std::int64_t>(points.rows()); }
  double total_mass() const { return weights.sum(); }

  /// Equal-weight cloud of total mass 1.
  static PointCloud equal_weights(Eigen::MatrixXd pts);
};

/// Integer index of a dyadic cell, usable as a hash map key.  Supports
/// ambient dimensions up to 16.
struct CellKey {
  std::array<std::int32_t, 16> idx{};
  std::int8_t len = 0;

  bool operator==(const CellKey& o) const {
    if (len != o.len) return false;
    for (int i = 0; i < len; ++i) {
      if (idx[static_cast<std::size_t>(i)] != o.idx[static_cast<std::size_t>(i)])
        return false;
    }
    return true;
  }
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    // FNV-1a over the used words.
    std::uint64_t h = 1469598103934665603ULL;
    for (int i = 0; i < k.len; ++i) {
      std::uint64_t w =
          static_cast<std::uint32_t>(k.idx[static_cast<std::size_t>(i)]);
      h = (h ^ w) * 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// The grid of half-open dyadic cubes of side 2^-level anchored at the
/// origin: cell k = prod_i [k_i 2^-level, (k_i+1) 2^-level).
struct DyadicGrid {
  int dim = 0;
  int level = 0;

  double delta() const { return std::ldexp(1.0, -level); }

  /// Index of the cell containing x (componentwise floor).
  CellKey cell_of(const Eigen::VectorXd& x) const;

  /// Center of a cell.
  Eigen::VectorXd center_of(const CellKey& k) const;
};

/// A measure with a piecewise-constant density on dyadic cells: value c_Q
/// on cell Q means density c_Q there, i.e. the cell carries mass
/// c_Q * delta^dim.  Doubles as the sample representation of mollified
/// density fields (values at cell centers).
struct GridMeasure {
  DyadicGrid grid;
  std::unordered_map<CellKey, double, CellKeyHash> cells;

  double total_mass() const;

  /// L2 norm of the density: sqrt(sum c_Q^2 delta^dim).
  double l2_norm() const;
};

}  // namespace grassdim

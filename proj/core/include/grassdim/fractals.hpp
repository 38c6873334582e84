#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grassdim/grassmann.hpp"
#include "grassdim/grid.hpp"
#include "grassdim/rng.hpp"

namespace grassdim {

/// A contracting similarity x -> ratio * rotation * x + translation.
struct SimilarityMap {
  double ratio = 0.0;
  Eigen::MatrixXd rotation;     ///< orthogonal n x n
  Eigen::VectorXd translation;  ///< n-vector

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return ratio * (rotation * x) + translation;
  }
};

/// An iterated function system of contracting similarities.
struct IfsSystem {
  int ambient_dim = 0;
  std::vector<SimilarityMap> maps;
  int depth = 0;

  /// The unique s with sum ratio_i^s = 1 (bisection to 1e-10).
  double similarity_dimension() const;
};

/// All depth-fold compositions applied to base_point, in map-major order
/// (first map's branch first), with uniform weights summing to 1.
/// Deterministic.  Throws std::invalid_argument when maps^depth > 10^7.
PointCloud ifs_generate(const IfsSystem& system, const Eigen::VectorXd& base_point);

/// Cartesian product measure: points are concatenations (a_i, b_j) in
/// a-major order, weights multiply.  Combined dimension must be <= 16 and
/// the product size <= 10^7.
PointCloud product_cloud(const PointCloud& a, const PointCloud& b);

/// A family of projection planes to sweep in experiments: either the
/// vertical family (planes containing the last vertical_dim axes, sampled
/// by lifting a uniformly random horizontal plane) or a horizontal family
/// (planes inside the first ambient_dim - 1 coordinates).
struct FamilyDescriptor {
  enum class Kind { VerticalLift, HorizontalEmbed };
  Kind kind = Kind::VerticalLift;
  int ambient_dim = 0;   ///< n: where the cloud lives
  int subspace_dim = 0;  ///< m: dimension of each sampled plane
  int vertical_dim = 0;  ///< l: VerticalLift planes contain {0}^{n-l} x R^l

  Subspace sample(Rng& rng) const;
};

/// A named cloud whose projections are constant by construction — every
/// plane of the returned family projects it to a single point (kind
/// "vertical-line-in-R4-horizontal-family") or preserves it isometrically
/// (kind "segment-preserved-family").
struct DegenerateExample {
  PointCloud cloud;
  FamilyDescriptor family;
};

DegenerateExample degenerate_example(const std::string& kind);

/// Catalog entry for a named generator.
struct GeneratorInfo {
  std::string key;
  int ambient_dim = 0;
  double reference_dim = 0.0;  ///< ground-truth dimension of the attractor
  int default_depth = 0;
  bool has_family_override = false;  ///< degenerate examples fix their family
  FamilyDescriptor family;
};

/// The fixed corpus of named generators.
const std::vector<GeneratorInfo>& generator_manifest();

/// Lookup by key; nullptr when absent.
const GeneratorInfo* find_generator(const std::string& key);

/// Builds the named cloud.  depth < 0 selects the catalog default.  For
/// product constructions the depth drives the first factor and the second
/// factor is matched to the same spatial scale.
PointCloud make_generator_cloud(const std::string& key, int depth = -1);

}  // namespace grassdim

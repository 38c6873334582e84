#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include <grassdim/dimension.hpp>
#include <grassdim/errors.hpp>
#include <grassdim/fractals.hpp>
#include <grassdim/grid.hpp>
#include <grassdim/measures.hpp>
#include <grassdim/rng.hpp>

#include "helpers.hpp"

using namespace grassdim;

TEST_CASE("box count basics") {
  Eigen::MatrixXd one(1, 3);
  one << 0.2, 0.7, 0.1;
  PointCloud atom = PointCloud::equal_weights(one);
  for (int j : {0, 3, 10}) CHECK(box_count(atom, j) == 1);

  Rng rng(71);
  PointCloud mu = testutil::random_cloud(2, 500, rng);
  CHECK(box_count(mu, 0) == 1);  // everything inside the unit cell
  CHECK_THROWS_AS(box_count(mu, -1), std::invalid_argument);
}

TEST_CASE("box counts nest between consecutive levels") {
  Rng rng(72);
  PointCloud mu = testutil::random_cloud(3, 2000, rng);
  std::int64_t prev = box_count(mu, 0);
  for (int j = 1; j <= 6; ++j) {
    std::int64_t cur = box_count(mu, j);
    CHECK(cur >= prev);       // refining cannot merge cells
    CHECK(cur <= 8 * prev);   // each cell has 2^3 children
    prev = cur;
  }
}

TEST_CASE("box count ignores duplicated points") {
  Rng rng(73);
  PointCloud mu = testutil::random_cloud(2, 300, rng);
  Eigen::MatrixXd doubled(600, 2);
  doubled << mu.points, mu.points;
  PointCloud dup = PointCloud::equal_weights(doubled);
  for (int j : {2, 4, 6}) CHECK(box_count(dup, j) == box_count(mu, j));
}

TEST_CASE("middle-thirds net: frozen occupied-cell counts") {
  // Exact counts for the depth-10 net, independently recomputed from the
  // ternary-digit description of the set.
  PointCloud mu = make_generator_cloud("cantor-third", 10);
  const std::vector<std::int64_t> expected = {6, 10, 16, 28, 42, 69, 101, 153};
  for (int j = 3; j <= 10; ++j)
    CHECK(box_count(mu, j) == expected[static_cast<std::size_t>(j - 3)]);
}

TEST_CASE("boxdim: dyadic nets fit slope one exactly") {
  PointCloud mu = make_generator_cloud("segment", 14);
  DimensionEstimate est = boxdim_estimate(mu, 4, 10);
  CHECK(est.method == "box");
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.slope_stderr == doctest::Approx(0.0).epsilon(1e-10));
  REQUIRE(est.scale_levels.size() == 7);
  CHECK(est.scale_levels.front() == 4);
  CHECK(est.counts.front() == doctest::Approx(16.0));
  CHECK(est.counts.back() == doctest::Approx(1024.0));
}

TEST_CASE("boxdim: middle-thirds net lands near log 2 / log 3") {
  PointCloud mu = make_generator_cloud("cantor-third", 10);
  DimensionEstimate est = boxdim_estimate(mu, 6, 9);
  CHECK(est.value ==
        doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(0.08));
}

TEST_CASE("boxdim: plane Cantor square doubles the line exponent") {
  PointCloud mu = make_generator_cloud("cantor-third-sq", 9);
  DimensionEstimate est = boxdim_estimate(mu, 6, 9);
  const double target = 2.0 * std::log(2.0) / std::log(3.0);
  CHECK(std::abs(est.value - target) < 0.08);
}

TEST_CASE("boxdim: eight-corner dust staircase averages to 3/2") {
  PointCloud mu = make_generator_cloud("dust-3d", 6);
  DimensionEstimate est = boxdim_estimate(mu, 4, 8);
  CHECK(est.value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("boxdim guards") {
  Rng rng(74);
  PointCloud small = testutil::random_cloud(2, 50, rng);
  CHECK_THROWS_AS(boxdim_estimate(small, 2, 6), SaturationError);
  CHECK_THROWS_AS(boxdim_estimate(small, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(boxdim_estimate(small, -1, 4), std::invalid_argument);
  // SaturationError is a GuardError.
  CHECK_THROWS_AS(boxdim_estimate(small, 2, 6), GuardError);
}

TEST_CASE("projection never raises the fitted box dimension") {
  PointCloud mu = make_generator_cloud("dust-3d", 5);
  DimensionEstimate ambient = boxdim_estimate(mu, 4, 6);
  Rng rng(75);
  for (int rep = 0; rep < 3; ++rep) {
    Subspace v = sample_uniform(3, 2, rng);
    PointCloud proj = pushforward(mu, v);
    DimensionEstimate flat = boxdim_estimate(proj, 4, 6);
    CHECK(flat.value <= ambient.value + 0.1);
  }
}

namespace {

std::vector<double> default_s_grid(int ambient_dim) {
  std::vector<double> grid;
  for (double s = 0.05; s < ambient_dim - 1e-9 && s < 3.95 + 1e-9; s += 0.05)
    grid.push_back(s);
  return grid;
}

}  // namespace

TEST_CASE("energy slope: uniform nets carry exponent about one") {
  PointCloud mu = testutil::segment_net(Eigen::VectorXd::Zero(1),
                                        Eigen::VectorXd::Ones(1), 2048);
  DimensionEstimate est = energy_slope_dim(mu, default_s_grid(1));
  CHECK(est.method == "energy-slope");
  CHECK(est.value >= 0.85);
  CHECK(est.value <= 1.0);
  CHECK(est.scale_levels.size() >= 4);
}

TEST_CASE("energy slope: concentrated cloud reports dimension zero") {
  Rng rng(76);
  Eigen::MatrixXd pts(50, 2);
  for (int i = 0; i < 50; ++i) {
    pts(i, 0) = 0.5 + 1e-9 * (rng.uniform() - 0.5);
    pts(i, 1) = 0.5 + 1e-9 * (rng.uniform() - 0.5);
  }
  PointCloud mu = PointCloud::equal_weights(pts);
  DimensionEstimate est = energy_slope_dim(mu, default_s_grid(2));
  CHECK(est.value <= 0.1);
}

TEST_CASE("energy slope: middle-thirds net sits near its box dimension") {
  PointCloud mu = make_generator_cloud("cantor-third", 10);
  DimensionEstimate est = energy_slope_dim(mu, default_s_grid(1));
  CHECK(std::abs(est.value - std::log(2.0) / std::log(3.0)) <= 0.15);
}

TEST_CASE("energy slope guards") {
  Eigen::MatrixXd pts(1, 2);
  pts << 0.5, 0.5;
  CHECK_THROWS_AS(energy_slope_dim(PointCloud::equal_weights(pts), {0.5}),
                  InsufficientRangeError);
  Eigen::MatrixXd two(2, 2);
  two << 0.5, 0.5, 0.5, 0.5;
  CHECK_THROWS_AS(energy_slope_dim(PointCloud::equal_weights(two), {0.5}),
                  InsufficientRangeError);
  Rng rng(77);
  PointCloud mu = testutil::random_cloud(2, 30, rng);
  CHECK_THROWS_AS(energy_slope_dim(mu, {}), std::invalid_argument);
  CHECK_THROWS_AS(energy_slope_dim(mu, {2.5}), std::invalid_argument);
  CHECK_THROWS_AS(energy_slope_dim(mu, {-0.1}), std::invalid_argument);
}

TEST_CASE("l2 growth: point mass projects to exponent exactly zero") {
  Eigen::MatrixXd pts(40, 3);
  Rng rng(78);
  for (int i = 0; i < 40; ++i) {
    pts(i, 0) = 0.4 + 1e-12 * rng.uniform();
    pts(i, 1) = 0.3 + 1e-12 * rng.uniform();
    pts(i, 2) = 0.6 + 1e-12 * rng.uniform();
  }
  PointCloud mu = PointCloud::equal_weights(pts);
  Subspace v = sample_uniform(3, 2, rng);
  DimensionEstimate est = l2_growth_dim(mu, v, 3, 6);
  CHECK(est.value == 0.0);
  CHECK(est.method == "l2-growth");
}

TEST_CASE("l2 growth: segment projected along itself keeps exponent one") {
  PointCloud mu = testutil::segment_net(Eigen::Vector2d(0.1, 0.2),
                                        Eigen::Vector2d(0.9, 0.7), 4096);
  Eigen::Vector2d dir = (Eigen::Vector2d(0.9, 0.7) - Eigen::Vector2d(0.1, 0.2));
  Eigen::MatrixXd frame = dir.normalized();
  DimensionEstimate est = l2_growth_dim(mu, Subspace{frame}, 4, 7);
  CHECK(std::abs(est.value - 1.0) <= 0.15);
}

TEST_CASE("l2 growth: four-corner set collapses to one half on the axis") {
  // Along a coordinate direction the four-corner net projects onto the
  // {0,3}-digit base-4 set of dimension 1/2.
  PointCloud mu = make_generator_cloud("cantor-4corner", 8);
  Eigen::MatrixXd frame(2, 1);
  frame << 1.0, 0.0;
  DimensionEstimate est = l2_growth_dim(mu, Subspace{frame}, 7, 12);
  CHECK(std::abs(est.value - 0.5) <= 0.2);
}

TEST_CASE("l2 growth guard mirrors the box-count guard") {
  Rng rng(79);
  PointCloud small = testutil::random_cloud(3, 60, rng);
  Subspace v = sample_uniform(3, 2, rng);
  CHECK_THROWS_AS(l2_growth_dim(small, v, 2, 7), SaturationError);
  CHECK_THROWS_AS(l2_growth_dim(small, v, 4, 4), std::invalid_argument);
}

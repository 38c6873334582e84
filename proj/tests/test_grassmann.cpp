#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include <grassdim/grassmann.hpp>
#include <grassdim/rng.hpp>

using namespace grassdim;

namespace {

Subspace line_at_angle(double theta) {
  Eigen::MatrixXd f(2, 1);
  f << std::cos(theta), std::sin(theta);
  return Subspace(f);
}

}  // namespace

TEST_CASE("projection matrices are symmetric idempotent with trace m") {
  Rng rng(11);
  for (auto [n, m] : std::vector<std::pair<int, int>>{
           {2, 1}, {3, 1}, {3, 2}, {4, 2}, {6, 3}}) {
    for (int rep = 0; rep < 5; ++rep) {
      Subspace v = sample_uniform(n, m, rng);
      Eigen::MatrixXd p = v.projection_matrix();
      CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(p.trace() == doctest::Approx(m).epsilon(1e-10));
    }
  }
}

TEST_CASE("projection applied through coordinates matches the matrix") {
  Rng rng(12);
  Subspace v = sample_uniform(5, 2, rng);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd x(5);
    for (int i = 0; i < 5; ++i) x[i] = rng.normal();
    Eigen::VectorXd via_coords = v.frame() * v.coordinates_of(x);
    Eigen::VectorXd via_matrix = v.projection_matrix() * x;
    CHECK((via_coords - via_matrix).norm() < 1e-12);
  }
}

TEST_CASE("distance between planar lines is the sine of their angle") {
  for (double a : {0.0, 0.3, 1.0, 1.4}) {
    for (double b : {0.1, 0.7, 2.5}) {
      double expected = std::abs(std::sin(a - b));
      CHECK(dpi_distance(line_at_angle(a), line_at_angle(b)) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
  CHECK(dpi_distance(line_at_angle(0.4), line_at_angle(0.4)) < 1e-14);
}

TEST_CASE("orthogonal complementary planes in R^4 are at distance one") {
  Eigen::MatrixXd f1 = Eigen::MatrixXd::Zero(4, 2);
  f1(0, 0) = 1.0;
  f1(1, 1) = 1.0;
  Eigen::MatrixXd f2 = Eigen::MatrixXd::Zero(4, 2);
  f2(2, 0) = 1.0;
  f2(3, 1) = 1.0;
  CHECK(dpi_distance(Subspace(f1), Subspace(f2)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniform samples carry orthonormal frames") {
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    Subspace v = sample_uniform(5, 3, rng);
    Eigen::MatrixXd gram = v.frame().transpose() * v.frame();
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("sampling distribution is rotation invariant") {
  // Compare mean distance to a fixed reference before and after rotating the
  // samples by a fixed orthogonal matrix; means must agree within MC noise.
  const int trials = 4000;
  Rng rng(14);
  Subspace ref = sample_uniform(3, 1, rng);
  Eigen::Matrix3d q =
      Eigen::AngleAxisd(0.83, Eigen::Vector3d(1, 2, -1).normalized())
          .toRotationMatrix();
  double sum = 0, sum_sq = 0, sum_rot = 0, sum_rot_sq = 0;
  for (int i = 0; i < trials; ++i) {
    Subspace v = sample_uniform(3, 1, rng);
    double d = dpi_distance(v, ref);
    Subspace vr(q * v.frame());
    double dr = dpi_distance(vr, ref);
    sum += d;
    sum_sq += d * d;
    sum_rot += dr;
    sum_rot_sq += dr * dr;
  }
  double mean = sum / trials, mean_rot = sum_rot / trials;
  double var = sum_sq / trials - mean * mean;
  double se = std::sqrt(2.0 * var / trials);
  CHECK(std::abs(mean - mean_rot) < 4.0 * se + 1e-12);
}

TEST_CASE("aligned bases stay orthonormal, span the subspaces, obey the bound") {
  Rng rng(15);
  for (auto [n, m] :
       std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {4, 2}}) {
    for (int rep = 0; rep < 500; ++rep) {
      Subspace v = sample_uniform(n, m, rng);
      Subspace w = sample_uniform(n, m, rng);
      AlignedBasisPair pair = aligned_bases(v, w);
      double d = dpi_distance(v, w);

      Eigen::MatrixXd gv = pair.basis_v.transpose() * pair.basis_v;
      Eigen::MatrixXd gw = pair.basis_w.transpose() * pair.basis_w;
      CHECK((gv - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <
            1e-9);
      CHECK((gw - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <
            1e-9);

      // Each aligned vector still lies in its own subspace.
      Eigen::MatrixXd pv = v.projection_matrix();
      Eigen::MatrixXd pw = w.projection_matrix();
      CHECK((pv * pair.basis_v - pair.basis_v).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((pw * pair.basis_w - pair.basis_w).cwiseAbs().maxCoeff() < 1e-9);

      double worst = 0;
      for (int i = 0; i < m; ++i)
        worst = std::max(worst,
                         (pair.basis_v.col(i) - pair.basis_w.col(i)).norm());
      CHECK(worst <= std::numbers::sqrt2 * d + 1e-8);
    }
  }
}

TEST_CASE("plucker embedding is unit norm with a fixed sign convention") {
  Rng rng(16);
  for (int rep = 0; rep < 50; ++rep) {
    Subspace v = sample_uniform(4, 2, rng);
    PluckerPoint p = plucker_embed(v);
    CHECK(p.coords.size() == 6);  // C(4,2)
    CHECK(p.coords.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < p.coords.size(); ++i) {
      if (std::abs(p.coords[i]) > 1e-12) {
        CHECK(p.coords[i] > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("plucker coordinates do not depend on the frame choice") {
  Rng rng(17);
  Subspace v = sample_uniform(4, 2, rng);
  // Re-frame the same subspace by an in-plane rotation.
  Eigen::Matrix2d rot;
  double t = 0.77;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Subspace w(v.frame() * rot);
  CHECK((plucker_embed(v).coords - plucker_embed(w).coords).norm() < 1e-10);
  CHECK(wedge_distance(v, w) < 1e-10);
}

TEST_CASE("wedge distance between planar lines has the half-angle form") {
  for (double a : {0.0, 0.4, 1.1}) {
    for (double da : {0.05, 0.3, 1.2}) {
      Subspace v = line_at_angle(a);
      Subspace w = line_at_angle(a + da);
      // Lines embed as their direction vectors up to sign; the distance is
      // the chord over the smaller of the two angle gaps.
      double gap = std::min(da, std::numbers::pi - da);
      double expected = 2.0 * std::sin(gap / 2.0);
      CHECK(wedge_distance(v, w) == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("wedge and projection distances are uniformly comparable") {
  Rng rng(18);
  for (auto [n, m] : std::vector<std::pair<int, int>>{
           {2, 1}, {3, 1}, {3, 2}, {4, 2}}) {
    double lo = 1e300, hi = 0;
    for (int rep = 0; rep < 2000; ++rep) {
      Subspace v = sample_uniform(n, m, rng);
      Subspace w = sample_uniform(n, m, rng);
      double dp = dpi_distance(v, w);
      double dw = wedge_distance(v, w);
      if (dw < 1e-9) continue;
      double ratio = dp / dw;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    CHECK(hi / lo < 10.0);
  }
}

TEST_CASE("vertical lift pins the axis block and keeps the base geometry") {
  Rng rng(19);
  Subspace v = sample_uniform(3, 2, rng);
  Subspace lifted = vertical_lift(v, 2);
  CHECK(lifted.ambient_dim() == 5);
  CHECK(lifted.dim() == 4);
  // The lifted projection fixes every vertical axis vector.
  Eigen::MatrixXd p = lifted.projection_matrix();
  for (int axis = 3; axis < 5; ++axis) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
    e[axis] = 1.0;
    CHECK((p * e - e).norm() < 1e-12);
  }
  // Distances between lifts equal distances between bases.
  Subspace w = sample_uniform(3, 2, rng);
  CHECK(dpi_distance(vertical_lift(v, 2), vertical_lift(w, 2)) ==
        doctest::Approx(dpi_distance(v, w)).epsilon(1e-10));
}

TEST_CASE("ball volume matches closed forms on small Grassmannians") {
  Rng rng(20);
  // Lines in the plane: exact fraction is (2/pi) asin(delta).
  for (double delta : {0.15, 0.35, 0.7}) {
    Subspace center = sample_uniform(2, 1, rng);
    BallVolumeEstimate est = ball_volume_mc(center, delta, 40000, rng);
    double exact = (2.0 / std::numbers::pi) * std::asin(delta);
    CHECK(std::abs(est.fraction - exact) <
          4.0 * est.std_error + 0.02 * exact + 1e-6);
  }
  // Lines in R^3: exact fraction is 1 - sqrt(1 - delta^2).
  for (double delta : {0.2, 0.6}) {
    Subspace center = sample_uniform(3, 1, rng);
    BallVolumeEstimate est = ball_volume_mc(center, delta, 40000, rng);
    double exact = 1.0 - std::sqrt(1.0 - delta * delta);
    CHECK(std::abs(est.fraction - exact) <
          4.0 * est.std_error + 0.03 * exact + 1e-6);
  }
  // Planes in R^4 at small radius: leading order delta^4 / 3.
  {
    Subspace center = sample_uniform(4, 2, rng);
    double delta = 0.25;
    BallVolumeEstimate est = ball_volume_mc(center, delta, 60000, rng);
    double leading = std::pow(delta, 4) / 3.0;
    CHECK(std::abs(est.fraction - leading) <
          4.0 * est.std_error + 0.05 * leading + 1e-7);
  }
}

TEST_CASE("ball volume saturates at one for radius one and beyond") {
  Rng rng(21);
  Subspace center = sample_uniform(3, 1, rng);
  CHECK(ball_volume_mc(center, 1.0, 100, rng).fraction == 1.0);
  CHECK(ball_volume_mc(center, 1.5, 100, rng).fraction == 1.0);
}

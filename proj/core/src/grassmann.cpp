#include "grassdim/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "grassdim/errors.hpp"

namespace grassdim {

namespace {

constexpr double kOrthonormalityTol = 1e-9;

void check_shape(int n, int m) {
  if (n < 1 || n > 16) {
    throw std::invalid_argument("ambient dimension must be in [1, 16], got " +
                                std::to_string(n));
  }
  if (m < 1 || m > n) {
    throw std::invalid_argument("subspace dimension must be in [1, n], got " +
                                std::to_string(m));
  }
}

}  // namespace

Subspace::Subspace(Eigen::MatrixXd frame) : frame_(std::move(frame)) {
  check_shape(static_cast<int>(frame_.rows()), static_cast<int>(frame_.cols()));
  const Eigen::MatrixXd gram =
      frame_.transpose() * frame_ -
      Eigen::MatrixXd::Identity(frame_.cols(), frame_.cols());
  if (gram.cwiseAbs().maxCoeff() > kOrthonormalityTol) {
    throw std::invalid_argument(
        "frame columns are not orthonormal (max Gram deviation " +
        std::to_string(gram.cwiseAbs().maxCoeff()) + ")");
  }
}

Subspace Subspace::span_of(const Eigen::MatrixXd& vectors) {
  check_shape(static_cast<int>(vectors.rows()), static_cast<int>(vectors.cols()));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(vectors);
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(vectors.rows(), vectors.cols());
  const Eigen::MatrixXd r =
      qr.matrixQR().topRows(vectors.cols()).triangularView<Eigen::Upper>();
  for (int j = 0; j < r.cols(); ++j) {
    if (std::abs(r(j, j)) < 1e-12) {
      throw std::invalid_argument("span_of requires full column rank");
    }
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return Subspace(std::move(q));
}

double dpi_distance(const Subspace& v, const Subspace& w) {
  if (v.ambient_dim() != w.ambient_dim() || v.dim() != w.dim()) {
    throw std::invalid_argument("dpi_distance requires matching dimensions");
  }
  // P_V - P_W is symmetric; its operator norm is the max |eigenvalue|.
  const Eigen::MatrixXd diff = v.projection_matrix() - w.projection_matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

Subspace sample_uniform(int n, int m, Rng& rng) {
  check_shape(n, m);
  Eigen::MatrixXd g(n, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  // QR with R_jj > 0 maps the Gaussian ensemble to the uniform frame
  // distribution; rotation invariance is inherited from the Gaussians.
  return Subspace::span_of(g);
}

Subspace vertical_lift(const Subspace& v, int l) {
  if (l < 1) throw std::invalid_argument("vertical_lift needs l >= 1");
  const int n = v.ambient_dim() + l;
  const int m = v.dim() + l;
  check_shape(n, m);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, m);
  f.topLeftCorner(v.ambient_dim(), v.dim()) = v.frame();
  f.bottomRightCorner(l, l).setIdentity();
  return Subspace(std::move(f));
}

AlignedBasisPair aligned_bases(const Subspace& v, const Subspace& w) {
  if (v.ambient_dim() != w.ambient_dim() || v.dim() != w.dim()) {
    throw std::invalid_argument("aligned_bases requires matching dimensions");
  }
  const Eigen::MatrixXd overlap = v.frame().transpose() * w.frame();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-12) {
    throw DegeneratePairError(
        "subspaces contain orthogonal directions; no aligned bases exist");
  }
  AlignedBasisPair out;
  out.basis_v = v.frame() * svd.matrixU();
  out.basis_w = w.frame() * svd.matrixV();
  out.principal_cosines = svd.singularValues();
  return out;
}

namespace {

// Size-m subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> lex_subsets(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  for (;;) {
    out.push_back(idx);
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

PluckerPoint plucker_embed(const Subspace& v) {
  const int n = v.ambient_dim();
  const int m = v.dim();
  const auto subsets = lex_subsets(n, m);
  PluckerPoint p;
  p.ambient_dim = n;
  p.dim = m;
  p.coords.resize(static_cast<Eigen::Index>(subsets.size()));
  Eigen::MatrixXd minor(m, m);
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    for (int r = 0; r < m; ++r) minor.row(r) = v.frame().row(subsets[k][r]);
    p.coords(static_cast<Eigen::Index>(k)) = minor.determinant();
  }
  // Cauchy-Binet gives unit norm for an orthonormal frame already; the
  // explicit normalization only sweeps up rounding.
  p.coords.normalize();
  for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
    if (std::abs(p.coords(i)) > 1e-12) {
      if (p.coords(i) < 0) p.coords = -p.coords;
      break;
    }
  }
  return p;
}

double wedge_distance(const Subspace& v, const Subspace& w) {
  if (v.ambient_dim() != w.ambient_dim() || v.dim() != w.dim()) {
    throw std::invalid_argument("wedge_distance requires matching dimensions");
  }
  const PluckerPoint p = plucker_embed(v);
  const PluckerPoint q = plucker_embed(w);
  const double d_minus = (p.coords - q.coords).norm();
  const double d_plus = (p.coords + q.coords).norm();
  return std::min(d_minus, d_plus);
}

namespace {

// log Selberg integral S_m(alpha, beta, 1/2): the normalization of the
// squared principal sine density below.
double log_selberg_half(int m, double alpha, double beta) {
  const double gamma = 0.5;
  double s = 0.0;
  for (int j = 0; j < m; ++j) {
    s += std::lgamma(alpha + j * gamma) + std::lgamma(beta + j * gamma) +
         std::lgamma(1.0 + (j + 1) * gamma);
    s -= std::lgamma(alpha + beta + (m + j - 1) * gamma) +
         std::lgamma(1.0 + gamma);
  }
  return s;
}

// Small-delta estimator.  With y_i the squared principal sines between a
// uniform m-plane and a fixed one in R^n (m <= n-m), the joint density is
//   f(y) = (1/S_m) prod_i y_i^(alpha-1) (1-y_i)^(-1/2) |Vandermonde(y)|
// with alpha = (n-2m+1)/2, S_m the Selberg normalization.  The ball
// probability P(all y_i <= delta^2) becomes, after y_i = eps u_i^(1/alpha)
// (eps = delta^2), a bounded smooth integral over the unit cube, averaged
// here by Monte Carlo.  The eps prefactor carries the exact exponent:
// eps^(alpha m + m(m-1)/2) = delta^(m(n-m)).
BallVolumeEstimate ball_volume_small_delta(int n, int m, double delta,
                                           int samples, Rng& rng) {
  const double alpha = 0.5 * (n - 2 * m + 1);
  const double eps = delta * delta;
  const double log_norm = -log_selberg_half(m, alpha, 0.5);
  const double log_pref =
      (alpha * m + 0.5 * m * (m - 1)) * std::log(eps) - m * std::log(alpha);
  std::vector<double> y(static_cast<std::size_t>(m));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < m; ++i) {
      y[static_cast<std::size_t>(i)] =
          eps * std::pow(rng.uniform(), 1.0 / alpha);
    }
    double g = 1.0;
    for (int i = 0; i < m; ++i) {
      g /= std::sqrt(1.0 - y[static_cast<std::size_t>(i)]);
      for (int j = i + 1; j < m; ++j) {
        g *= std::abs(y[static_cast<std::size_t>(i)] -
                      y[static_cast<std::size_t>(j)]);
      }
    }
    // The Vandermonde factor carries eps^(m(m-1)/2) implicitly through the
    // y values; remove it so the prefactor can add it back exactly.
    g /= std::pow(eps, 0.5 * m * (m - 1));
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / samples;
  const double var =
      std::max(0.0, sum_sq / samples - mean * mean) / std::max(1, samples - 1);
  const double scale = std::exp(log_pref + log_norm);
  BallVolumeEstimate est;
  est.fraction = scale * mean;
  est.std_error = scale * std::sqrt(var);
  return est;
}

}  // namespace

BallVolumeEstimate ball_volume_mc(const Subspace& center, double delta,
                                  int samples, Rng& rng) {
  if (delta < 0) throw std::invalid_argument("ball radius must be >= 0");
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const int n = center.ambient_dim();
  const int m = center.dim();
  if (delta >= 1.0) return {1.0, 0.0};  // dpi_distance never exceeds 1
  const int m_eff = std::min(m, n - m);
  if (m_eff == 0) return {1.0, 0.0};  // G(n, n) and G(n, 0) are points
  if (delta <= 0.5) {
    // Orthocomplement duality: distances agree, so G(n, m) ~ G(n, n-m).
    return ball_volume_small_delta(n, m_eff, delta, samples, rng);
  }
  int hits = 0;
  for (int k = 0; k < samples; ++k) {
    const Subspace w = sample_uniform(n, m, rng);
    if (dpi_distance(w, center) <= delta) ++hits;
  }
  const double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(std::max(0.0, p * (1.0 - p)) / samples)};
}

}  // namespace grassdim

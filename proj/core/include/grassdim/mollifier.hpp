#pragma once

#include <vector>

#include <Eigen/Dense>

namespace grassdim {

/// Radial profile of the smoothing kernel Psi: a C^infinity bump that is
/// >= 1 on the closed unit ball, radially nonincreasing, and identically
/// zero at radii >= 2.  Normalized so the value at radius 1 is exactly 1.
double bump_profile(double r);

/// Kernel value Psi(x) at a point of R^n.
double bump_value(const Eigen::VectorXd& x);

/// Integral of Psi over R^n.  The rescaled kernel delta^-n Psi(./delta)
/// has the same integral for every delta > 0.
double bump_l1_norm(int n);

/// Surface area of the unit sphere S^{k-1} in R^k.
double sphere_area(int k);

/// Piecewise-linear radial function sampled uniformly on [0, r_max] and
/// identically zero beyond r_max.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(double r_max, std::vector<double> values);

  double r_max() const { return r_max_; }
  int resolution() const { return static_cast<int>(values_.size()); }

  /// Linear interpolation; 0 for r >= r_max.
  double operator()(double r) const;

  /// integral over R^m of the radial function: area(S^{m-1}) *
  /// int_0^{r_max} f(r)^p r^{m-1} dr, with p = 1 or 2.
  double integral_pow(int m, int p) const;

 private:
  double r_max_ = 0.0;
  std::vector<double> values_;
};

/// Radial density profile of the pushforward of the kernel on R^n under
/// orthogonal projection onto an m-plane (0 < m < n).  Integrating the
/// returned profile over R^m recovers the kernel's integral over R^n.
RadialTable projected_bump_profile(int n, int m, int resolution = 2049);

}  // namespace grassdim

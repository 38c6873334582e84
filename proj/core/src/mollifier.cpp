#include "grassdim/mollifier.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace grassdim {
namespace {

// Composite Simpson on [a, b] with an even number of intervals.
template <typename F>
double simpson(const F& f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

double bump_profile(double r) {
  r = std::abs(r);
  if (r >= 2.0) return 0.0;
  const double t = r * r / 4.0 - 1.0;  // in [-1, 0)
  // exp(4/3) * exp(1/t) equals exactly 1 at r = 1 and decays to 0 at r = 2
  // with all derivatives vanishing.
  return std::exp(4.0 / 3.0 + 1.0 / t);
}

double bump_value(const Eigen::VectorXd& x) { return bump_profile(x.norm()); }

double sphere_area(int k) {
  if (k < 1) throw std::invalid_argument("sphere_area: k must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k);
}

double bump_l1_norm(int n) {
  if (n < 1) throw std::invalid_argument("bump_l1_norm: n must be >= 1");
  const auto f = [n](double r) {
    return bump_profile(r) * std::pow(r, n - 1);
  };
  return sphere_area(n) * simpson(f, 0.0, 2.0, 4096);
}

RadialTable::RadialTable(double r_max, std::vector<double> values)
    : r_max_(r_max), values_(std::move(values)) {
  if (r_max_ <= 0.0 || values_.size() < 2)
    throw std::invalid_argument("RadialTable: need r_max > 0 and >= 2 nodes");
}

double RadialTable::operator()(double r) const {
  r = std::abs(r);
  if (r >= r_max_ || values_.empty()) return 0.0;
  const double t = r / r_max_ * (values_.size() - 1);
  const auto i = static_cast<std::size_t>(t);
  if (i + 1 >= values_.size()) return values_.back();
  const double frac = t - static_cast<double>(i);
  return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

double RadialTable::integral_pow(int m, int p) const {
  if (m < 1 || (p != 1 && p != 2))
    throw std::invalid_argument("RadialTable::integral_pow: bad arguments");
  const int n_nodes = static_cast<int>(values_.size());
  const double h = r_max_ / (n_nodes - 1);
  // Composite Simpson over the table nodes (trapezoid fix-up for a final
  // odd interval).
  auto g = [&](int i) {
    const double r = i * h;
    const double v = values_[static_cast<std::size_t>(i)];
    return (p == 1 ? v : v * v) * std::pow(r, m - 1);
  };
  double s = 0.0;
  int i = 0;
  for (; i + 2 < n_nodes; i += 2) s += (g(i) + 4.0 * g(i + 1) + g(i + 2)) * h / 3.0;
  if (i + 1 < n_nodes) s += 0.5 * (g(i) + g(i + 1)) * h;
  return sphere_area(m) * s;
}

RadialTable projected_bump_profile(int n, int m, int resolution) {
  if (m < 1 || m >= n)
    throw std::invalid_argument("projected_bump_profile: need 0 < m < n");
  if (resolution < 2)
    throw std::invalid_argument("projected_bump_profile: resolution < 2");
  const int k = n - m;  // fiber dimension
  const double area = sphere_area(k);
  std::vector<double> vals(static_cast<std::size_t>(resolution), 0.0);
  for (int i = 0; i < resolution; ++i) {
    const double r = 2.0 * i / (resolution - 1);
    const double rho_max_sq = 4.0 - r * r;
    if (rho_max_sq <= 0.0) continue;
    const double rho_max = std::sqrt(rho_max_sq);
    const auto f = [r, k](double rho) {
      return bump_profile(std::sqrt(r * r + rho * rho)) *
             std::pow(rho, k - 1);
    };
    vals[static_cast<std::size_t>(i)] = area * simpson(f, 0.0, rho_max, 1024);
  }
  return RadialTable(2.0, std::move(vals));
}

}  // namespace grassdim

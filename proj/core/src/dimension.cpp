#include "grassdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "grassdim/errors.hpp"
#include "grassdim/measures.hpp"
#include "grassdim/parallel.hpp"

namespace grassdim {
namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss += r * r;
    }
    fit.slope_stderr = std::sqrt(ss / (n - 2) / sxx);
  }
  return fit;
}

double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> slopes;
  slopes.reserve(x.size() * (x.size() - 1) / 2);
  for (std::size_t a = 0; a < x.size(); ++a)
    for (std::size_t b = a + 1; b < x.size(); ++b)
      if (x[b] != x[a]) slopes.push_back((y[b] - y[a]) / (x[b] - x[a]));
  if (slopes.empty()) return 0.0;
  std::sort(slopes.begin(), slopes.end());
  const std::size_t mid = slopes.size() / 2;
  return slopes.size() % 2 == 1 ? slopes[mid]
                                : 0.5 * (slopes[mid - 1] + slopes[mid]);
}

}  // namespace

std::int64_t box_count(const PointCloud& cloud, int level) {
  if (level < 0) throw std::invalid_argument("box_count: level must be >= 0");
  DyadicGrid grid{cloud.dim(), level};
  std::unordered_set<CellKey, CellKeyHash> seen;
  seen.reserve(static_cast<std::size_t>(cloud.size()));
  for (std::int64_t i = 0; i < cloud.size(); ++i)
    seen.insert(grid.cell_of(cloud.points.row(i).transpose()));
  return static_cast<std::int64_t>(seen.size());
}

DimensionEstimate boxdim_estimate(const PointCloud& cloud, int j_min, int j_max) {
  if (j_min < 0 || j_min >= j_max)
    throw std::invalid_argument("boxdim_estimate: need 0 <= j_min < j_max");
  const int levels = j_max - j_min + 1;
  std::vector<double> counts(static_cast<std::size_t>(levels), 0.0);
  parallel_for_indexed(static_cast<std::size_t>(levels), [&](std::size_t i) {
    counts[i] = static_cast<double>(box_count(cloud, j_min + static_cast<int>(i)));
  });
  const double upper = 0.1 * static_cast<double>(cloud.size());
  for (int i = 0; i < levels; ++i) {
    const double c = counts[static_cast<std::size_t>(i)];
    if (!(c > 10.0 && c < upper))
      throw SaturationError(
          "boxdim_estimate: occupied-cell count " + std::to_string(c) +
          " at level " + std::to_string(j_min + i) +
          " is outside (10, 0.1*points); the sample cannot support this scale");
  }
  std::vector<double> xs(static_cast<std::size_t>(levels)),
      ys(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    xs[static_cast<std::size_t>(i)] = j_min + i;
    ys[static_cast<std::size_t>(i)] = std::log2(counts[static_cast<std::size_t>(i)]);
  }
  const LineFit fit = least_squares(xs, ys);
  DimensionEstimate est;
  est.value = std::max(0.0, fit.slope);
  est.slope_stderr = fit.slope_stderr;
  est.method = "box";
  est.counts = counts;
  est.scale_levels.resize(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i)
    est.scale_levels[static_cast<std::size_t>(i)] = j_min + i;
  return est;
}

DimensionEstimate energy_slope_dim(const PointCloud& cloud,
                                   const std::vector<double>& s_grid) {
  const int n = cloud.dim();
  if (s_grid.empty())
    throw std::invalid_argument("energy_slope_dim: empty exponent grid");
  for (double s : s_grid)
    if (!(s > 0.0 && s < static_cast<double>(n)))
      throw std::invalid_argument(
          "energy_slope_dim: exponents must lie in (0, ambient_dim)");
  if (cloud.size() < 2)
    throw InsufficientRangeError("energy_slope_dim: need at least 2 points");

  // Diameter, for normalization (only shrink, never blow up small clouds).
  double diam2 = 0.0;
  for (std::int64_t i = 0; i < cloud.size(); ++i)
    for (std::int64_t j = i + 1; j < cloud.size(); ++j)
      diam2 = std::max(diam2,
                       (cloud.points.row(i) - cloud.points.row(j)).squaredNorm());
  if (diam2 == 0.0)
    throw InsufficientRangeError("energy_slope_dim: all points coincide");
  const double rescale = diam2 > 1.0 ? 1.0 / std::sqrt(diam2) : 1.0;

  // Pair mass per dyadic distance band: band j holds ordered-pair mass with
  // 2^{-j-1} < distance <= 2^{-j}.
  constexpr int kMaxBand = 120;
  std::vector<double> band_mass(kMaxBand + 1, 0.0);
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < cloud.size(); ++i) {
    for (std::int64_t j = i + 1; j < cloud.size(); ++j) {
      const double dist =
          (cloud.points.row(i) - cloud.points.row(j)).norm() * rescale;
      if (dist == 0.0) continue;  // duplicates carry no band information
      min_dist = std::min(min_dist, dist);
      const int band = std::min(
          kMaxBand, std::max(0, static_cast<int>(std::floor(-std::log2(dist)))));
      band_mass[static_cast<std::size_t>(band)] +=
          2.0 * cloud.weights[i] * cloud.weights[j];
    }
  }

  // Usable bands: skip the outermost band (diameter boundary effects) and
  // everything at or below 4x the minimum separation (atomic regime).
  const int deepest =
      static_cast<int>(std::floor(std::log2(1.0 / (4.0 * min_dist))));
  std::vector<int> bands;
  for (int j = 1; j <= std::min(deepest, kMaxBand); ++j)
    if (band_mass[static_cast<std::size_t>(j)] > 0.0) bands.push_back(j);
  if (bands.size() < 4)
    throw InsufficientRangeError(
        "energy_slope_dim: only " + std::to_string(bands.size()) +
        " usable distance bands; need at least 4");

  const double mass = cloud.total_mass();
  const double cap = 4.0 * mass * mass;
  std::vector<double> xs(bands.size()), ys(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i)
    xs[i] = static_cast<double>(bands[i]);

  DimensionEstimate est;
  est.method = "energy-slope";
  est.scale_levels = bands;
  est.counts.resize(bands.size());
  for (std::size_t i = 0; i < bands.size(); ++i)
    est.counts[i] = band_mass[static_cast<std::size_t>(bands[i])];

  double best = 0.0, best_stderr = 0.0;
  for (double s : s_grid) {
    double max_b = 0.0;
    for (std::size_t i = 0; i < bands.size(); ++i) {
      const double b = est.counts[i] * std::exp2(static_cast<double>(bands[i]) * s);
      max_b = std::max(max_b, b);
      ys[i] = std::log2(b);
    }
    if (max_b > cap) continue;
    if (theil_sen_slope(xs, ys) > 0.05) continue;
    if (s > best) {
      best = s;
      best_stderr = least_squares(xs, ys).slope_stderr;
    }
  }
  est.value = best;
  est.slope_stderr = best_stderr;
  return est;
}

DimensionEstimate l2_growth_dim(const PointCloud& cloud, const Subspace& v,
                                int j_min, int j_max) {
  if (j_min < 0 || j_min >= j_max)
    throw std::invalid_argument("l2_growth_dim: need 0 <= j_min < j_max");
  const PointCloud proj = pushforward(cloud, v);
  const int m = v.dim();
  const int levels = j_max - j_min + 1;

  DimensionEstimate est;
  est.method = "l2-growth";
  est.scale_levels.resize(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i)
    est.scale_levels[static_cast<std::size_t>(i)] = j_min + i;

  // A projection concentrated in one cell at the finest scale is a point
  // mass at these scales; its norm growth carries exponent exactly 0.
  if (box_count(proj, j_max) == 1) {
    est.counts.assign(static_cast<std::size_t>(levels), 1.0);
    est.value = 0.0;
    return est;
  }

  const double upper = 0.1 * static_cast<double>(proj.size());
  for (int j = j_min; j <= j_max; ++j) {
    const double c = static_cast<double>(box_count(proj, j));
    if (!(c > 10.0 && c < upper))
      throw SaturationError(
          "l2_growth_dim: projected occupied-cell count " + std::to_string(c) +
          " at level " + std::to_string(j) + " is outside (10, 0.1*points)");
  }

  std::vector<double> norms(static_cast<std::size_t>(levels), 0.0);
  parallel_for_indexed(static_cast<std::size_t>(levels), [&](std::size_t i) {
    const int j = j_min + static_cast<int>(i);
    const double delta = std::ldexp(1.0, -j);
    norms[i] = mollify(proj, delta, j + 2).l2_norm();
  });

  std::vector<double> xs(static_cast<std::size_t>(levels)),
      ys(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    xs[static_cast<std::size_t>(i)] = -(j_min + i);  // log2 of the scale
    ys[static_cast<std::size_t>(i)] =
        2.0 * std::log2(norms[static_cast<std::size_t>(i)]);
  }
  const LineFit fit = least_squares(xs, ys);
  est.value = std::max(0.0, static_cast<double>(m) + fit.slope);
  est.slope_stderr = fit.slope_stderr;
  est.counts = norms;
  return est;
}

}  // namespace grassdim

#include "grassdim/marstrand.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "grassdim/dimension.hpp"
#include "grassdim/errors.hpp"
#include "grassdim/measures.hpp"
#include "grassdim/parallel.hpp"

namespace grassdim {
namespace {

bool lex_less_rows(const Eigen::MatrixXd& pts, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    if (pts(a, c) < pts(b, c)) return true;
    if (pts(a, c) > pts(b, c)) return false;
  }
  return false;
}

}  // namespace

DeltaKSet verify_delta_k(const PointCloud& cloud, double delta, double k,
                         int ball_samples) {
  if (delta <= 0.0) throw std::invalid_argument("verify_delta_k: delta <= 0");
  if (k < 0.0) throw std::invalid_argument("verify_delta_k: k < 0");
  if (ball_samples < 1)
    throw std::invalid_argument("verify_delta_k: ball_samples < 1");
  const auto count = cloud.size();

  DeltaKSet out;
  out.cloud = cloud;
  out.cloud.weights = Eigen::VectorXd::Ones(count);
  out.delta = delta;
  out.k = k;

  // Exact pairwise separation and the diameter.
  double min_d2 = std::numeric_limits<double>::infinity();
  double max_d2 = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index j = i + 1; j < count; ++j) {
      const double d2 = (cloud.points.row(i) - cloud.points.row(j)).squaredNorm();
      min_d2 = std::min(min_d2, d2);
      max_d2 = std::max(max_d2, d2);
    }
  }
  out.separation_ok =
      count < 2 || min_d2 >= delta * delta * (1.0 - 1e-12);

  // Spread condition over point-centered balls at dyadic radii.  With many
  // points, centers are strided deterministically down to ball_samples.
  const double diameter = std::sqrt(max_d2);
  const Eigen::Index stride =
      std::max<Eigen::Index>(1, count / std::max(1, ball_samples));
  double worst = count > 0 ? 1.0 : 0.0;  // the center itself: 1 <= A * 1^k
  for (Eigen::Index i = 0; i < count; i += stride) {
    for (double r = delta; r < 2.0 * std::max(delta, diameter); r *= 2.0) {
      const double r2 = r * r;
      std::int64_t inside = 0;
      for (Eigen::Index j = 0; j < count; ++j)
        if ((cloud.points.row(j) - cloud.points.row(i)).squaredNorm() <= r2)
          ++inside;
      const double allowance = std::pow(r / delta, k);
      worst = std::max(worst, static_cast<double>(inside) / allowance);
      if (r >= diameter) break;
    }
  }
  out.spread_constant = worst;
  return out;
}

std::int64_t tube_count(const PointCloud& cloud, const Subspace& v, int level) {
  return box_count(pushforward(cloud, v), level);
}

namespace {

// Squared tube occupancies of one direction: buckets projected points by
// dyadic cell.  Returns (tube count, sum of squared occupancies).
std::pair<std::int64_t, std::uint64_t> tube_stats(const PointCloud& cloud,
                                                  const Subspace& v, int level) {
  const PointCloud proj = pushforward(cloud, v);
  DyadicGrid grid{proj.dim(), level};
  std::unordered_map<CellKey, std::uint64_t, CellKeyHash> buckets;
  buckets.reserve(static_cast<std::size_t>(proj.size()));
  for (Eigen::Index i = 0; i < proj.size(); ++i)
    ++buckets[grid.cell_of(proj.points.row(i).transpose())];
  std::uint64_t sq = 0;
  for (const auto& [cell, c] : buckets) sq += c * c;
  return {static_cast<std::int64_t>(buckets.size()), sq};
}

}  // namespace

IncidenceReport incidence_energy(const PointCloud& cloud, const DirectionSet& dirs,
                                 int level) {
  const std::size_t ndirs = dirs.subspaces.size();
  IncidenceReport rep;
  rep.point_count = cloud.size();
  rep.per_direction_tube_counts.resize(ndirs, 0);
  std::vector<std::uint64_t> sq(ndirs, 0);
  parallel_for_indexed(ndirs, [&](std::size_t i) {
    const auto [tubes, ssq] = tube_stats(cloud, dirs.subspaces[i], level);
    rep.per_direction_tube_counts[i] = tubes;
    sq[i] = ssq;
  });
  for (std::uint64_t v : sq) rep.energy += v;
  rep.energy_excess =
      rep.energy - static_cast<std::uint64_t>(cloud.size()) * ndirs;
  return rep;
}

IncidenceReport bad_direction_census(const PointCloud& cloud,
                                     const DirectionSet& dirs, int level,
                                     double tau) {
  const double delta = std::ldexp(1.0, -level);
  {
    const DeltaKSet check = verify_delta_k(cloud, delta, 0.0, 1);
    if (!check.separation_ok)
      throw GuardError(
          "bad_direction_census: the cloud is not delta-separated at level " +
          std::to_string(level) + " (spread constant measured " +
          std::to_string(check.spread_constant) + ")");
  }
  IncidenceReport rep = incidence_energy(cloud, dirs, level);
  rep.tau = tau;
  const int n = cloud.dim();
  const int m = dirs.subspaces.empty() ? 0 : dirs.subspaces.front().dim();
  rep.bound_rhs = std::pow(delta, tau - static_cast<double>((n - m) * m)) *
                  std::log(1.0 / delta);
  if (tau > 0.0) {
    const double threshold = std::pow(delta, tau) * static_cast<double>(cloud.size());
    for (std::int64_t tubes : rep.per_direction_tube_counts)
      if (static_cast<double>(tubes) <= threshold) ++rep.bad_count;
  }
  return rep;
}

double average_tube_count(const PointCloud& cloud, const DirectionSet& dirs,
                          int level, double tau, double beta) {
  if (!(tau < beta))
    throw std::invalid_argument("average_tube_count: need tau < beta");
  const double delta = std::ldexp(1.0, -level);
  const double required = std::pow(delta, -beta);
  if (static_cast<double>(dirs.subspaces.size()) < required)
    throw std::invalid_argument(
        "average_tube_count: need at least delta^-beta = " +
        std::to_string(required) + " directions, got " +
        std::to_string(dirs.subspaces.size()));
  std::vector<std::int64_t> counts(dirs.subspaces.size(), 0);
  parallel_for_indexed(dirs.subspaces.size(), [&](std::size_t i) {
    counts[i] = tube_count(cloud, dirs.subspaces[i], level);
  });
  double sum = 0.0;
  for (std::int64_t c : counts) sum += static_cast<double>(c);
  return sum / static_cast<double>(dirs.subspaces.size());
}

DeltaKSet extract_delta_set(const PointCloud& slab_cloud, const Subspace& v0,
                            int level) {
  if (slab_cloud.size() == 0)
    throw std::invalid_argument("extract_delta_set: empty slab");
  const double delta = std::ldexp(1.0, -level);
  const PointCloud proj = pushforward(slab_cloud, v0);
  DyadicGrid grid{proj.dim(), level};

  // Lexicographically smallest point of each occupied tube.
  std::unordered_map<CellKey, Eigen::Index, CellKeyHash> reps;
  for (Eigen::Index i = 0; i < slab_cloud.size(); ++i) {
    const CellKey key = grid.cell_of(proj.points.row(i).transpose());
    auto it = reps.find(key);
    if (it == reps.end() || lex_less_rows(slab_cloud.points, i, it->second))
      reps[key] = i;
  }
  std::vector<Eigen::Index> rows;
  rows.reserve(reps.size());
  for (const auto& [cell, row] : reps) rows.push_back(row);
  std::sort(rows.begin(), rows.end(), [&](Eigen::Index a, Eigen::Index b) {
    return lex_less_rows(slab_cloud.points, a, b);
  });

  // Greedy thinning in lexicographic order guarantees delta separation.
  std::vector<Eigen::Index> kept;
  for (Eigen::Index row : rows) {
    bool ok = true;
    for (Eigen::Index prev : kept) {
      if ((slab_cloud.points.row(row) - slab_cloud.points.row(prev)).squaredNorm() <
          delta * delta) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(row);
  }

  PointCloud thinned;
  thinned.points.resize(static_cast<Eigen::Index>(kept.size()), slab_cloud.dim());
  thinned.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t r = 0; r < kept.size(); ++r)
    thinned.points.row(static_cast<Eigen::Index>(r)) = slab_cloud.points.row(kept[r]);

  return verify_delta_k(thinned, delta, static_cast<double>(v0.dim()), 256);
}

DirectionSet build_direction_set(int n, int m, double delta, Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("build_direction_set: need 0 < delta < 1");
  const double exponent = static_cast<double>((n - m) * m);
  const double budget = 3.0 * std::pow(delta, -exponent);
  const std::int64_t candidates =
      std::min<std::int64_t>(300'000, static_cast<std::int64_t>(std::ceil(budget)));

  DirectionSet out;
  out.delta = delta;

  // Lines (and their duals, hyperplanes) admit a cheap distance test: the
  // projection distance between spans of unit vectors u, v is
  // sqrt(1 - (u.v)^2), so separation is dot^2 <= 1 - delta^2.
  const bool line_like = (m == 1) || (m == n - 1);
  if (line_like) {
    const double dot2_max = 1.0 - delta * delta;
    std::vector<Eigen::VectorXd> axes;
    for (std::int64_t c = 0; c < candidates; ++c) {
      Eigen::VectorXd u(n);
      for (int i = 0; i < n; ++i) u[i] = rng.normal();
      const double norm = u.norm();
      if (norm < 1e-12) continue;
      u /= norm;
      bool ok = true;
      for (const auto& v : axes) {
        const double dot = u.dot(v);
        if (dot * dot > dot2_max) {
          ok = false;
          break;
        }
      }
      if (ok) axes.push_back(std::move(u));
    }
    for (const auto& u : axes) {
      if (m == 1) {
        out.subspaces.emplace_back(u);
      } else {
        // Hyperplane orthogonal to u: the remaining columns of a full
        // orthonormal completion.
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
        Eigen::MatrixXd full = qr.householderQ();
        // Column 0 of full spans u up to sign; keep the rest.
        out.subspaces.emplace_back(Eigen::MatrixXd(full.rightCols(n - 1)));
      }
    }
  } else {
    for (std::int64_t c = 0; c < candidates; ++c) {
      const Subspace cand = sample_uniform(n, m, rng);
      bool ok = true;
      for (const auto& v : out.subspaces) {
        if (dpi_distance(cand, v) < delta) {
          ok = false;
          break;
        }
      }
      if (ok) out.subspaces.push_back(cand);
    }
  }
  out.separation_ok = true;  // enforced by construction
  return out;
}

}  // namespace grassdim

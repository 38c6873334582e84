#include "grassdim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "grassdim/errors.hpp"
#include "grassdim/mollifier.hpp"
#include "grassdim/parallel.hpp"

namespace grassdim {
namespace {

// Iterates an integer box [lo_0,hi_0] x ... x [lo_{d-1},hi_{d-1}]
// (inclusive) in row-major order, calling fn with the current multi-index.
template <typename Fn>
void for_each_box_index(const std::vector<int>& lo, const std::vector<int>& hi,
                        const Fn& fn) {
  const std::size_t d = lo.size();
  std::vector<int> cur(lo);
  for (std::size_t i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return;
  for (;;) {
    fn(cur);
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (cur[axis] < hi[axis]) {
        ++cur[axis];
        for (std::size_t j = axis + 1; j < d; ++j) cur[j] = lo[j];
        break;
      }
      if (axis == 0) return;
    }
  }
}

// Exact pair energy of two unit-density side-1 cells on a line at integer
// offset k >= 0: the double integral of |x - y|^{-s} over [0,1] x [k,k+1].
// One closed form covers the diagonal k = 0 as well (0^{2-s} = 0).
double line_pair_energy(std::int64_t k, double s) {
  const double a = 2.0 - s;
  const double kp = static_cast<double>(k) + 1.0;
  const double km = k > 0 ? static_cast<double>(k) - 1.0 : 0.0;
  const double mid = k > 0 ? std::pow(static_cast<double>(k), a) : 0.0;
  const double kmp = k > 1 ? std::pow(km, a) : (k == 1 ? 0.0 : 1.0);
  return (std::pow(kp, a) - 2.0 * mid + kmp) / ((1.0 - s) * (2.0 - s));
}

// Pair energies of touching unit cells in dimension d (offsets in
// {-1,0,1}^d, the diagonal included), computed once per (d, s) by a
// fixed-point refinement: each iteration splits both cells into 2^d
// children and re-sums, using the cell-center value for non-touching child
// pairs.  The diagonal's seed is the radial integral over the equal-volume
// ball; the iteration forgets the seed geometrically since s < d.
const std::vector<double>& touching_table(int d, double s) {
  static std::map<std::pair<int, double>, std::vector<double>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(d, s);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int noff = static_cast<int>(std::pow(3.0, d));
  auto decode = [d](int code, std::vector<int>& off) {
    for (int i = 0; i < d; ++i) {
      off[static_cast<std::size_t>(i)] = code % 3 - 1;
      code /= 3;
    }
  };
  auto far_value = [s](const std::vector<int>& off) {
    double r2 = 0.0;
    for (int c : off) r2 += static_cast<double>(c) * c;
    return std::pow(r2, -0.5 * s);
  };

  // Seed: cell centers off-diagonal, equal-volume-ball radial rate on it.
  const double vd = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  const double diag_seed = d * std::pow(vd, s / d) / (d - s);
  std::vector<double> table(static_cast<std::size_t>(noff));
  std::vector<int> off(static_cast<std::size_t>(d));
  for (int code = 0; code < noff; ++code) {
    decode(code, off);
    bool zero = true;
    for (int c : off) zero = zero && (c == 0);
    table[static_cast<std::size_t>(code)] = zero ? diag_seed : far_value(off);
  }

  const int ncorner = 1 << d;
  const double shrink = std::pow(2.0, s - 2.0 * d);
  std::vector<double> next(table.size());
  std::vector<int> ca(static_cast<std::size_t>(d)), child(static_cast<std::size_t>(d));
  for (int iter = 0; iter < 64; ++iter) {
    double max_change = 0.0;
    for (int code = 0; code < noff; ++code) {
      decode(code, off);
      double sum = 0.0;
      for (int a = 0; a < ncorner; ++a) {
        for (int i = 0; i < d; ++i) ca[static_cast<std::size_t>(i)] = (a >> i) & 1;
        for (int b = 0; b < ncorner; ++b) {
          bool touching = true;
          int child_code = 0, p3 = 1;
          for (int i = 0; i < d; ++i) {
            const int c = 2 * off[static_cast<std::size_t>(i)] +
                          ((b >> i) & 1) - ca[static_cast<std::size_t>(i)];
            child[static_cast<std::size_t>(i)] = c;
            if (c < -1 || c > 1) touching = false;
            child_code += (c + 1 + 3) % 3 * p3;  // valid only when touching
            p3 *= 3;
          }
          sum += touching ? table[static_cast<std::size_t>(child_code)]
                          : far_value(child);
        }
      }
      next[static_cast<std::size_t>(code)] = shrink * sum;
      max_change = std::max(max_change,
                            std::abs(next[static_cast<std::size_t>(code)] -
                                     table[static_cast<std::size_t>(code)]));
    }
    table.swap(next);
    if (max_change < 1e-13) break;
  }
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

GridMeasure discretize(const PointCloud& mu, int level) {
  if (level < 0) throw std::invalid_argument("discretize: level must be >= 0");
  const int n = mu.dim();
  GridMeasure out;
  out.grid = DyadicGrid{n, level};
  const double inv_vol = std::pow(2.0, static_cast<double>(level) * n);
  for (std::int64_t i = 0; i < mu.size(); ++i) {
    const Eigen::VectorXd x = mu.points.row(i).transpose();
    out.cells[out.grid.cell_of(x)] += mu.weights[i] * inv_vol;
  }
  return out;
}

PointCloud pushforward(const PointCloud& mu, const Subspace& v) {
  if (mu.dim() != v.ambient_dim())
    throw std::invalid_argument("pushforward: ambient dimensions disagree");
  PointCloud out;
  out.points = mu.points * v.frame();
  out.weights = mu.weights;
  return out;
}

double riesz_energy(const PointCloud& mu, double s) {
  if (s <= 0.0) throw std::invalid_argument("riesz_energy: s must be > 0");
  const auto n = mu.size();
  if (n < 2) return 0.0;
  std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
  parallel_for_indexed(static_cast<std::size_t>(n), [&](std::size_t i) {
    double acc = 0.0;
    const auto row = mu.points.row(static_cast<Eigen::Index>(i));
    for (auto j = static_cast<Eigen::Index>(i) + 1; j < n; ++j) {
      const double d2 = (mu.points.row(j) - row).squaredNorm();
      if (d2 == 0.0) {
        acc = std::numeric_limits<double>::infinity();
        break;
      }
      acc += mu.weights[static_cast<Eigen::Index>(i)] * mu.weights[j] *
             std::pow(d2, -0.5 * s);
    }
    partial[i] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return 2.0 * total;  // ordered pairs
}

double riesz_energy_grid(const GridMeasure& nu, double s) {
  const int d = nu.grid.dim;
  if (!(s > 0.0 && s < d))
    throw std::invalid_argument("riesz_energy_grid: need 0 < s < dim");
  const double delta = nu.grid.delta();
  const double scale = std::pow(delta, 2.0 * d - s);

  std::vector<CellKey> keys;
  std::vector<double> dens;
  keys.reserve(nu.cells.size());
  dens.reserve(nu.cells.size());
  for (const auto& [k, c] : nu.cells) {
    keys.push_back(k);
    dens.push_back(c);
  }
  const std::size_t count = keys.size();
  if (count == 0) return 0.0;

  if (d == 1) {
    std::vector<double> partial(count, 0.0);
    parallel_for_indexed(count, [&](std::size_t i) {
      double acc = dens[i] * dens[i] * line_pair_energy(0, s);
      for (std::size_t j = i + 1; j < count; ++j) {
        const std::int64_t k = std::abs(static_cast<std::int64_t>(keys[i].idx[0]) -
                                        static_cast<std::int64_t>(keys[j].idx[0]));
        acc += 2.0 * dens[i] * dens[j] * line_pair_energy(k, s);
      }
      partial[i] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return scale * total;
  }

  // Dimensions small enough for the 3^d refinement table use refined
  // touching-pair energies; beyond that, cell centers plus the radial
  // diagonal rate.
  const bool refined = d <= 4;
  const std::vector<double>* table = refined ? &touching_table(d, s) : nullptr;
  double diag;
  if (refined) {
    int code0 = 0, p3 = 1;
    for (int i = 0; i < d; ++i) {
      code0 += p3;  // offset 0 encodes digit 1 per axis
      p3 *= 3;
    }
    diag = (*table)[static_cast<std::size_t>(code0)];
  } else {
    const double vd =
        std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    diag = d * std::pow(vd, s / d) / (d - s);
  }

  std::vector<double> partial(count, 0.0);
  parallel_for_indexed(count, [&](std::size_t i) {
    double acc = dens[i] * dens[i] * diag;
    for (std::size_t j = i + 1; j < count; ++j) {
      bool touching = true;
      double r2 = 0.0;
      int code = 0, p3 = 1;
      for (int a = 0; a < d; ++a) {
        const int off = keys[j].idx[static_cast<std::size_t>(a)] -
                        keys[i].idx[static_cast<std::size_t>(a)];
        if (off < -1 || off > 1) touching = false;
        r2 += static_cast<double>(off) * off;
        if (touching) code += (off + 1) * p3;
        p3 *= 3;
      }
      const double pair = (touching && refined)
                              ? (*table)[static_cast<std::size_t>(code)]
                              : std::pow(r2, -0.5 * s);
      acc += 2.0 * dens[i] * dens[j] * pair;
    }
    partial[i] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return scale * total;
}

GridMeasure mollify(const PointCloud& mu, double delta, int eval_level) {
  const int n = mu.dim();
  if (delta <= 0.0) throw std::invalid_argument("mollify: delta must be > 0");
  const double h = std::ldexp(1.0, -eval_level);
  if (h > delta / 4.0 * (1.0 + 1e-12))
    throw ResolutionError("mollify: evaluation cells must be <= delta/4");
  GridMeasure out;
  out.grid = DyadicGrid{n, eval_level};
  const double inv_delta_n = std::pow(delta, -n);
  std::vector<int> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
  CellKey key;
  key.len = static_cast<std::int8_t>(n);
  for (std::int64_t i = 0; i < mu.size(); ++i) {
    const double w = mu.weights[i];
    for (int a = 0; a < n; ++a) {
      const double p = mu.points(i, a);
      lo[static_cast<std::size_t>(a)] =
          static_cast<int>(std::ceil((p - 2.0 * delta) / h - 0.5));
      hi[static_cast<std::size_t>(a)] =
          static_cast<int>(std::floor((p + 2.0 * delta) / h - 0.5));
    }
    for_each_box_index(lo, hi, [&](const std::vector<int>& idx) {
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double c = (idx[static_cast<std::size_t>(a)] + 0.5) * h;
        const double diff = c - mu.points(i, a);
        r2 += diff * diff;
      }
      const double val = w * inv_delta_n * bump_profile(std::sqrt(r2) / delta);
      if (val > 0.0) {
        for (int a = 0; a < n; ++a)
          key.idx[static_cast<std::size_t>(a)] =
              static_cast<std::int32_t>(idx[static_cast<std::size_t>(a)]);
        out.cells[key] += val;
      }
    });
  }
  return out;
}

namespace {

// Lexicographic order on cell keys, for reproducible iteration.
bool cell_key_less(const CellKey& a, const CellKey& b) {
  if (a.len != b.len) return a.len < b.len;
  for (int i = 0; i < a.len; ++i) {
    const auto ai = a.idx[static_cast<std::size_t>(i)];
    const auto bi = b.idx[static_cast<std::size_t>(i)];
    if (ai != bi) return ai < bi;
  }
  return false;
}

}  // namespace

CommutationReport commutation_check(const PointCloud& mu, const Subspace& v,
                                    double delta, int eval_level) {
  const int n = mu.dim();
  const int m = v.dim();
  if (n != v.ambient_dim())
    throw std::invalid_argument("commutation_check: dimensions disagree");
  if (m >= n)
    throw std::invalid_argument("commutation_check: need a proper subspace");
  const int fiber_dim = n - m;
  const double h = std::ldexp(1.0, -eval_level);
  if (h > delta / 4.0 * (1.0 + 1e-12))
    throw ResolutionError("commutation_check: evaluation cells must be <= delta/4");

  const PointCloud proj = pushforward(mu, v);
  const RadialTable psi = projected_bump_profile(n, m);

  // Candidate image cells: centers within the smoothed image's support,
  // inflated by one snapped-cell diagonal.
  const double margin = 2.0 * delta + h * (std::sqrt(static_cast<double>(n)) + 1.0);
  std::unordered_map<CellKey, bool, CellKeyHash> cell_set;
  {
    std::vector<int> lo(static_cast<std::size_t>(m)), hi(static_cast<std::size_t>(m));
    CellKey key;
    key.len = static_cast<std::int8_t>(m);
    for (std::int64_t i = 0; i < proj.size(); ++i) {
      for (int a = 0; a < m; ++a) {
        const double q = proj.points(i, a);
        lo[static_cast<std::size_t>(a)] =
            static_cast<int>(std::ceil((q - margin) / h - 0.5));
        hi[static_cast<std::size_t>(a)] =
            static_cast<int>(std::floor((q + margin) / h - 0.5));
      }
      for_each_box_index(lo, hi, [&](const std::vector<int>& idx) {
        for (int a = 0; a < m; ++a)
          key.idx[static_cast<std::size_t>(a)] =
              static_cast<std::int32_t>(idx[static_cast<std::size_t>(a)]);
        cell_set.emplace(key, true);
      });
    }
  }
  std::vector<CellKey> cells;
  cells.reserve(cell_set.size());
  for (const auto& [k, unused] : cell_set) cells.push_back(k);
  std::sort(cells.begin(), cells.end(), cell_key_less);

  // Orthonormal basis of the fiber directions (complement of v).
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v.frame());
  Eigen::MatrixXd full = qr.householderQ();
  const Eigen::MatrixXd fibers = full.rightCols(fiber_dim);

  // Fiber coordinate ranges covering the smoothed field's support.
  const Eigen::MatrixXd fiber_coords = mu.points * fibers;  // N x fiber_dim
  std::vector<double> zlo(static_cast<std::size_t>(fiber_dim));
  std::vector<int> steps(static_cast<std::size_t>(fiber_dim));
  std::vector<double> zstep(static_cast<std::size_t>(fiber_dim));
  double fiber_weight = 1.0;
  for (int a = 0; a < fiber_dim; ++a) {
    const double lo = fiber_coords.col(a).minCoeff() - 2.0 * delta - h;
    const double hi = fiber_coords.col(a).maxCoeff() + 2.0 * delta + h;
    const int count = std::max(1, static_cast<int>(std::ceil((hi - lo) / h)));
    zlo[static_cast<std::size_t>(a)] = lo;
    steps[static_cast<std::size_t>(a)] = count;
    zstep[static_cast<std::size_t>(a)] = (hi - lo) / count;
    fiber_weight *= (hi - lo) / count;
  }

  const double inv_delta_n = std::pow(delta, -n);
  const double inv_delta_m = std::pow(delta, -m);
  const Eigen::MatrixXd& frame = v.frame();

  std::vector<double> a_vals(cells.size(), 0.0), b_vals(cells.size(), 0.0);
  parallel_for_indexed(cells.size(), [&](std::size_t ci) {
    Eigen::VectorXd y(m);
    for (int a = 0; a < m; ++a)
      y[a] = (cells[ci].idx[static_cast<std::size_t>(a)] + 0.5) * h;

    // Project-then-smooth: the projected kernel profile at image distance.
    double aval = 0.0;
    for (std::int64_t i = 0; i < proj.size(); ++i) {
      const double r = (proj.points.row(i).transpose() - y).norm();
      aval += mu.weights[i] * inv_delta_m * psi(r / delta);
    }
    a_vals[ci] = aval;

    // Smooth-then-project: midpoint rule along the fiber through y, the
    // field evaluated at cell-snapped nodes (matching the discretized
    // field's resolution; this is the first-order quadrature).
    const Eigen::VectorXd base = frame * y;
    double bsum = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(fiber_dim), 0);
    Eigen::VectorXd x(n);
    for (;;) {
      x = base;
      for (int a = 0; a < fiber_dim; ++a) {
        const double z = zlo[static_cast<std::size_t>(a)] +
                         (idx[static_cast<std::size_t>(a)] + 0.5) *
                             zstep[static_cast<std::size_t>(a)];
        x += fibers.col(a) * z;
      }
      for (int c = 0; c < n; ++c)
        x[c] = (std::floor(x[c] / h) + 0.5) * h;
      double field = 0.0;
      for (std::int64_t i = 0; i < mu.size(); ++i) {
        const double r = (mu.points.row(i).transpose() - x).norm();
        field += mu.weights[i] * inv_delta_n * bump_profile(r / delta);
      }
      bsum += field;
      int axis = fiber_dim;
      bool done = true;
      while (axis > 0) {
        --axis;
        if (++idx[static_cast<std::size_t>(axis)] <
            steps[static_cast<std::size_t>(axis)]) {
          done = false;
          break;
        }
        idx[static_cast<std::size_t>(axis)] = 0;
      }
      if (done) break;
    }
    b_vals[ci] = bsum * fiber_weight;
  });

  const double cell_vol = std::pow(h, m);
  double a2 = 0.0, b2 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    a2 += a_vals[i] * a_vals[i];
    b2 += b_vals[i] * b_vals[i];
    const double diff = a_vals[i] - b_vals[i];
    d2 += diff * diff;
  }
  CommutationReport rep;
  rep.project_then_smooth_norm = std::sqrt(a2 * cell_vol);
  rep.smooth_then_project_norm = std::sqrt(b2 * cell_vol);
  rep.discrepancy = rep.project_then_smooth_norm > 0.0
                        ? std::sqrt(d2 * cell_vol) / rep.project_then_smooth_norm
                        : 0.0;
  rep.eval_level = eval_level;
  return rep;
}

SandwichReport sandwich_check(const PointCloud& mu, const Subspace& v,
                              int delta_level, int eval_level) {
  const int n = mu.dim();
  const int m = v.dim();
  if (n != v.ambient_dim())
    throw std::invalid_argument("sandwich_check: dimensions disagree");
  if (eval_level < delta_level + 2)
    throw ResolutionError("sandwich_check: evaluation level must exceed the "
                          "discretization level by at least 2");
  const double delta = std::ldexp(1.0, -delta_level);
  const double c = 4.0 * std::sqrt(static_cast<double>(n));

  const PointCloud proj = pushforward(mu, v);
  SandwichReport rep;
  rep.scale_factor = c;
  rep.image_smoothed = mollify(proj, delta, eval_level).l2_norm();
  rep.image_smoothed_coarse = mollify(proj, c * delta, eval_level).l2_norm();

  // Projection of the coarse discretization: split every occupied
  // delta-cell into evaluation-level subcells, project the subcell centers,
  // and bucket their masses on the image grid.
  const GridMeasure coarse = discretize(mu, delta_level);
  const int ratio = 1 << (eval_level - delta_level);
  const double h = std::ldexp(1.0, -eval_level);
  const double sub_mass_factor =
      std::pow(delta, n) / std::pow(static_cast<double>(ratio), n);
  GridMeasure image;
  image.grid = DyadicGrid{m, eval_level};
  const double inv_cell_vol = std::pow(h, -m);
  std::vector<int> lo(static_cast<std::size_t>(n), 0);
  std::vector<int> hi(static_cast<std::size_t>(n), ratio - 1);
  Eigen::VectorXd x(n), y(m);
  for (const auto& [cell, density] : coarse.cells) {
    const double sub_mass = density * sub_mass_factor;
    for_each_box_index(lo, hi, [&](const std::vector<int>& idx) {
      for (int a = 0; a < n; ++a)
        x[a] = cell.idx[static_cast<std::size_t>(a)] * delta +
               (idx[static_cast<std::size_t>(a)] + 0.5) * h;
      y = v.frame().transpose() * x;
      image.cells[image.grid.cell_of(y)] += sub_mass * inv_cell_vol;
    });
  }
  rep.discretized_projected = image.l2_norm();
  return rep;
}

std::vector<SlabPiece> slice_horizontal(const PointCloud& cloud,
                                        int vertical_dim, int level) {
  const int n = cloud.dim();
  if (vertical_dim < 1 || vertical_dim >= n)
    throw std::invalid_argument("slice_horizontal: need 0 < vertical_dim < n");
  if (level < 0) throw std::invalid_argument("slice_horizontal: level < 0");
  const int horiz = n - vertical_dim;
  const double scale = std::ldexp(1.0, level);

  std::map<std::vector<std::int32_t>, std::vector<std::int64_t>> groups;
  for (std::int64_t i = 0; i < cloud.size(); ++i) {
    std::vector<std::int32_t> idx(static_cast<std::size_t>(vertical_dim));
    for (int a = 0; a < vertical_dim; ++a)
      idx[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(
          std::floor(cloud.points(i, horiz + a) * scale));
    groups[idx].push_back(i);
  }

  std::vector<SlabPiece> out;
  out.reserve(groups.size());
  for (const auto& [idx, rows] : groups) {
    SlabPiece piece;
    piece.slab.ambient_dim = n;
    piece.slab.vertical_dim = vertical_dim;
    piece.slab.delta = std::ldexp(1.0, -level);
    piece.slab.index = idx;
    piece.shadow.points.resize(static_cast<Eigen::Index>(rows.size()), horiz);
    piece.shadow.weights.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      piece.shadow.points.row(static_cast<Eigen::Index>(r)) =
          cloud.points.row(rows[r]).head(horiz);
      piece.shadow.weights[static_cast<Eigen::Index>(r)] = cloud.weights[rows[r]];
    }
    out.push_back(std::move(piece));
  }
  return out;
}

double avg_projection_l2(const PointCloud& nu, int subspace_dim, double delta,
                         int num_dirs, Rng& rng) {
  if (num_dirs < 1)
    throw std::invalid_argument("avg_projection_l2: num_dirs must be >= 1");
  if (subspace_dim < 1 || subspace_dim > nu.dim())
    throw std::invalid_argument("avg_projection_l2: bad subspace dimension");
  const int eval_level =
      static_cast<int>(std::ceil(std::log2(1.0 / delta))) + 2;
  double acc = 0.0;
  for (int i = 0; i < num_dirs; ++i) {
    const Subspace v = sample_uniform(nu.dim(), subspace_dim, rng);
    const double norm = mollify(pushforward(nu, v), delta, eval_level).l2_norm();
    acc += norm * norm;
  }
  return acc / num_dirs;
}

}  // namespace grassdim

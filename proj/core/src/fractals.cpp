#include "grassdim/fractals.hpp"

#include <cmath>
#include <stdexcept>

namespace grassdim {
namespace {

constexpr std::int64_t kMaxPoints = 10'000'000;

IfsSystem axis_ifs(int n, double ratio,
                   const std::vector<Eigen::VectorXd>& translations) {
  IfsSystem sys;
  sys.ambient_dim = n;
  for (const auto& t : translations) {
    SimilarityMap map;
    map.ratio = ratio;
    map.rotation = Eigen::MatrixXd::Identity(n, n);
    map.translation = t;
    sys.maps.push_back(std::move(map));
  }
  return sys;
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

// Middle-thirds Cantor set in R^1.
IfsSystem cantor_third() { return axis_ifs(1, 1.0 / 3.0, {vec1(0.0), vec1(2.0 / 3.0)}); }

// Four-corner Cantor set (ratio 1/4) in R^2.
IfsSystem cantor_4corner() {
  return axis_ifs(2, 0.25,
                  {vec2(0.0, 0.0), vec2(0.75, 0.0), vec2(0.0, 0.75),
                   vec2(0.75, 0.75)});
}

// Eight-corner dust (ratio 1/4) in R^3; dimension log8/log4 = 1.5.
IfsSystem dust_3d() {
  std::vector<Eigen::VectorXd> ts;
  for (int c = 0; c < 8; ++c)
    ts.push_back(vec3(0.75 * (c & 1), 0.75 * ((c >> 1) & 1), 0.75 * ((c >> 2) & 1)));
  return axis_ifs(3, 0.25, ts);
}

// Dyadic net of [0,1] along the first axis of R^n.
IfsSystem segment_net(int n) {
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(n);
  t1[0] = 0.5;
  return axis_ifs(n, 0.5, {t0, t1});
}

// Dyadic net of [0,1] along the LAST axis of R^n.
IfsSystem vertical_net(int n) {
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd t1 = Eigen::VectorXd::Zero(n);
  t1[n - 1] = 0.5;
  return axis_ifs(n, 0.5, {t0, t1});
}

// Four-corner Cantor set placed in the z = 0 plane of R^3.
IfsSystem cantor_4corner_h3() {
  return axis_ifs(3, 0.25,
                  {vec3(0.0, 0.0, 0.0), vec3(0.75, 0.0, 0.0),
                   vec3(0.0, 0.75, 0.0), vec3(0.75, 0.75, 0.0)});
}

// Middle-thirds Cantor set on the x-axis of R^2.
IfsSystem cantor_third_h2() {
  return axis_ifs(2, 1.0 / 3.0, {vec2(0.0, 0.0), vec2(2.0 / 3.0, 0.0)});
}

PointCloud generate(IfsSystem sys, int depth) {
  sys.depth = depth;
  return ifs_generate(sys, Eigen::VectorXd::Zero(sys.ambient_dim));
}

}  // namespace

double IfsSystem::similarity_dimension() const {
  if (maps.empty())
    throw std::invalid_argument("similarity_dimension: no maps");
  for (const auto& m : maps)
    if (!(m.ratio > 0.0 && m.ratio < 1.0))
      throw std::invalid_argument("similarity_dimension: ratios must be in (0,1)");
  const auto f = [this](double s) {
    double sum = 0.0;
    for (const auto& m : maps) sum += std::pow(m.ratio, s);
    return sum - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0.0 && hi < 1024.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PointCloud ifs_generate(const IfsSystem& system, const Eigen::VectorXd& base_point) {
  if (system.maps.empty())
    throw std::invalid_argument("ifs_generate: no maps");
  if (system.depth < 0)
    throw std::invalid_argument("ifs_generate: depth must be >= 0");
  if (base_point.size() != system.ambient_dim)
    throw std::invalid_argument("ifs_generate: base point dimension mismatch");
  const auto branches = static_cast<std::int64_t>(system.maps.size());
  std::int64_t count = 1;
  for (int d = 0; d < system.depth; ++d) {
    count *= branches;
    if (count > kMaxPoints)
      throw std::invalid_argument("ifs_generate: maps^depth exceeds 10^7 points");
  }

  const int n = system.ambient_dim;
  Eigen::MatrixXd cur(1, n);
  cur.row(0) = base_point.transpose();
  for (int d = 0; d < system.depth; ++d) {
    Eigen::MatrixXd next(cur.rows() * branches, n);
    for (std::int64_t k = 0; k < branches; ++k) {
      const auto& map = system.maps[static_cast<std::size_t>(k)];
      // x -> r R x + t applied to all rows at once.
      next.middleRows(k * cur.rows(), cur.rows()) =
          (cur * map.rotation.transpose()) * map.ratio;
      next.middleRows(k * cur.rows(), cur.rows()).rowwise() +=
          map.translation.transpose();
    }
    cur = std::move(next);
  }
  return PointCloud::equal_weights(std::move(cur));
}

PointCloud product_cloud(const PointCloud& a, const PointCloud& b) {
  const int n = a.dim() + b.dim();
  if (n > 16)
    throw std::invalid_argument("product_cloud: combined dimension exceeds 16");
  const std::int64_t count = a.size() * b.size();
  if (count > kMaxPoints)
    throw std::invalid_argument("product_cloud: product exceeds 10^7 points");
  PointCloud out;
  out.points.resize(count, n);
  out.weights.resize(count);
  std::int64_t row = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    for (std::int64_t j = 0; j < b.size(); ++j, ++row) {
      out.points.row(row).head(a.dim()) = a.points.row(i);
      out.points.row(row).tail(b.dim()) = b.points.row(j);
      out.weights[row] = a.weights[i] * b.weights[j];
    }
  }
  return out;
}

Subspace FamilyDescriptor::sample(Rng& rng) const {
  if (kind == Kind::VerticalLift) {
    const Subspace horizontal =
        sample_uniform(ambient_dim - vertical_dim, subspace_dim - vertical_dim, rng);
    return vertical_lift(horizontal, vertical_dim);
  }
  // Planes inside the first (ambient_dim - 1) coordinates.
  const Subspace inner = sample_uniform(ambient_dim - 1, subspace_dim, rng);
  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(ambient_dim, subspace_dim);
  frame.topRows(ambient_dim - 1) = inner.frame();
  return Subspace(std::move(frame));
}

DegenerateExample degenerate_example(const std::string& kind) {
  DegenerateExample ex;
  if (kind == "vertical-line-in-R4-horizontal-family") {
    ex.cloud = generate(vertical_net(4), 8);
    ex.family.kind = FamilyDescriptor::Kind::HorizontalEmbed;
    ex.family.ambient_dim = 4;
    ex.family.subspace_dim = 2;
    ex.family.vertical_dim = 0;
    return ex;
  }
  if (kind == "segment-preserved-family") {
    ex.cloud = generate(vertical_net(3), 8);
    ex.family.kind = FamilyDescriptor::Kind::VerticalLift;
    ex.family.ambient_dim = 3;
    ex.family.subspace_dim = 2;
    ex.family.vertical_dim = 1;
    return ex;
  }
  throw std::invalid_argument("degenerate_example: unknown kind '" + kind + "'");
}

const std::vector<GeneratorInfo>& generator_manifest() {
  static const std::vector<GeneratorInfo> manifest = [] {
    const double dim_c = std::log(2.0) / std::log(3.0);
    std::vector<GeneratorInfo> list;
    auto add = [&list](std::string key, int n, double dim, int depth) {
      GeneratorInfo info;
      info.key = std::move(key);
      info.ambient_dim = n;
      info.reference_dim = dim;
      info.default_depth = depth;
      list.push_back(std::move(info));
    };
    add("cantor-third", 1, dim_c, 10);
    add("cantor-third-sq", 2, 2.0 * dim_c, 6);
    add("cantor-4corner", 2, 1.0, 5);
    add("dust-3d", 3, 1.5, 4);
    add("segment", 2, 1.0, 10);
    add("cantor-4corner-h3", 3, 1.0, 5);
    add("cantor-4corner-x-segment", 3, 2.0, 4);
    add("cantor-third-x-segment", 3, 1.0 + dim_c, 6);
    add("segment-v3", 3, 1.0, 8);
    add("vertical-line-r4", 4, 1.0, 8);

    for (auto& info : list) {
      if (info.key == "segment-v3") {
        info.has_family_override = true;
        info.family = degenerate_example("segment-preserved-family").family;
      } else if (info.key == "vertical-line-r4") {
        info.has_family_override = true;
        info.family =
            degenerate_example("vertical-line-in-R4-horizontal-family").family;
      }
    }
    return list;
  }();
  return manifest;
}

const GeneratorInfo* find_generator(const std::string& key) {
  for (const auto& info : generator_manifest())
    if (info.key == key) return &info;
  return nullptr;
}

PointCloud make_generator_cloud(const std::string& key, int depth) {
  const GeneratorInfo* info = find_generator(key);
  if (info == nullptr)
    throw std::invalid_argument("make_generator_cloud: unknown key '" + key + "'");
  const int d = depth < 0 ? info->default_depth : depth;
  if (d < 0) throw std::invalid_argument("make_generator_cloud: negative depth");

  if (key == "cantor-third") return generate(cantor_third(), d);
  if (key == "cantor-third-sq")
    return product_cloud(generate(cantor_third(), d), generate(cantor_third(), d));
  if (key == "cantor-4corner") return generate(cantor_4corner(), d);
  if (key == "dust-3d") return generate(dust_3d(), d);
  if (key == "segment") return generate(segment_net(2), d);
  if (key == "cantor-4corner-h3") return generate(cantor_4corner_h3(), d);
  if (key == "cantor-4corner-x-segment") {
    // First factor cells have side 4^-d, so the matching segment step is
    // 2^-2d — but cap the segment depth so the product stays inside the
    // generator point budget (the first factor has 4^d points).
    int seg_depth = 2 * d;
    while (seg_depth > 1 &&
           std::pow(4.0, d) * (std::pow(2.0, seg_depth) + 1.0) >
               static_cast<double>(kMaxPoints)) {
      --seg_depth;
    }
    return product_cloud(generate(cantor_4corner(), d),
                         generate(segment_net(1), seg_depth));
  }
  if (key == "cantor-third-x-segment") {
    // First factor cells have side 3^-d; match the segment step.
    const int seg_depth =
        static_cast<int>(std::ceil(d * std::log2(3.0)));
    return product_cloud(generate(cantor_third_h2(), d),
                         generate(segment_net(1), seg_depth));
  }
  if (key == "segment-v3") return generate(vertical_net(3), d);
  if (key == "vertical-line-r4") return generate(vertical_net(4), d);
  throw std::invalid_argument("make_generator_cloud: unhandled key '" + key + "'");
}

}  // namespace grassdim

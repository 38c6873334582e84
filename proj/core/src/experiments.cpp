#include "grassdim/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "grassdim/errors.hpp"
#include "grassdim/io.hpp"
#include "grassdim/measures.hpp"
#include "grassdim/parallel.hpp"
#include "grassdim/version.hpp"

namespace grassdim {
namespace {

using nlohmann::ordered_json;

constexpr double kExceptionalEps[] = {0.1, 0.15, 0.2, 0.3};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

long long parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' wants an integer, got '" + v + "'");
  }
}

double parse_real(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' wants a number, got '" + v + "'");
  }
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key))
      throw ConfigError("config key '" + key + "' appears twice");
    seen[key] = true;

    if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_int(value, key));
    } else if (key == "m") {
      cfg.m = static_cast<int>(parse_int(value, key));
    } else if (key == "l") {
      cfg.l = static_cast<int>(parse_int(value, key));
    } else if (key == "fractal_key") {
      cfg.fractal_key = value;
    } else if (key == "num_directions") {
      cfg.num_directions = static_cast<int>(parse_int(value, key));
    } else if (key == "levels") {
      const std::size_t colon = value.find(':');
      if (colon == std::string::npos)
        throw ConfigError("config key 'levels' wants 'j_min:j_max'");
      cfg.j_min = static_cast<int>(parse_int(trim(value.substr(0, colon)), key));
      cfg.j_max = static_cast<int>(parse_int(trim(value.substr(colon + 1)), key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "depth") {
      cfg.depth = static_cast<int>(parse_int(value, key));
    } else if (key == "sigma") {
      cfg.sigma = parse_real(value, key);
    } else if (key == "sigma_prime") {
      cfg.sigma_prime = parse_real(value, key);
    } else if (key == "tau") {
      cfg.tau = parse_real(value, key);
    } else if (key == "beta") {
      cfg.beta = parse_real(value, key);
    } else if (key == "output_path") {
      cfg.output_path = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }

  if (cfg.experiment.empty())
    throw ConfigError("config needs an 'experiment' key");
  if (!(0 < cfg.l && cfg.l < cfg.m && cfg.m < cfg.n && cfg.n <= 16))
    throw ConfigError("config dimensions must satisfy 0 < l < m < n <= 16 (got n=" +
                      std::to_string(cfg.n) + ", m=" + std::to_string(cfg.m) +
                      ", l=" + std::to_string(cfg.l) + ")");
  if (cfg.fractal_key.empty())
    throw ConfigError("config needs a 'fractal_key'");
  if (cfg.num_directions < 1)
    throw ConfigError("config needs num_directions >= 1");
  if (!(cfg.j_min < cfg.j_max) || cfg.j_min < 0)
    throw ConfigError("config needs levels j_min:j_max with 0 <= j_min < j_max");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

namespace {

FamilyDescriptor family_for(const ExperimentConfig& cfg, const GeneratorInfo& info) {
  if (info.has_family_override) return info.family;
  FamilyDescriptor fam;
  fam.kind = FamilyDescriptor::Kind::VerticalLift;
  fam.ambient_dim = cfg.n;
  fam.subspace_dim = cfg.m;
  fam.vertical_dim = cfg.l;
  return fam;
}

const GeneratorInfo& generator_for(const ExperimentConfig& cfg) {
  const GeneratorInfo* info = find_generator(cfg.fractal_key);
  if (info == nullptr)
    throw ConfigError("unknown fractal_key '" + cfg.fractal_key + "'");
  if (info->ambient_dim != cfg.n)
    throw ConfigError("fractal '" + cfg.fractal_key + "' lives in dimension " +
                      std::to_string(info->ambient_dim) + ", config says n=" +
                      std::to_string(cfg.n));
  return *info;
}

/// Box estimate of a projected cloud, with the point-mass case (all points
/// in one cell at every level) reported as dimension exactly 0.
DimensionEstimate projected_box_estimate(const PointCloud& proj, int j_min,
                                         int j_max) {
  if (box_count(proj, j_max) == 1) {
    DimensionEstimate est;
    est.method = "box";
    est.value = 0.0;
    for (int j = j_min; j <= j_max; ++j) {
      est.scale_levels.push_back(j);
      est.counts.push_back(1.0);
    }
    return est;
  }
  return boxdim_estimate(proj, j_min, j_max);
}

ExperimentReport run_sweep(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const GeneratorInfo& info = generator_for(cfg);
  const PointCloud cloud = make_generator_cloud(cfg.fractal_key, cfg.depth);
  const FamilyDescriptor family = family_for(cfg, info);

  const std::size_t count = static_cast<std::size_t>(cfg.num_directions);
  std::vector<std::optional<DirectionResult>> results(count);
  parallel_for_indexed(count, [&](std::size_t i) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
    Subspace v = family.sample(rng);
    DimensionEstimate est =
        projected_box_estimate(pushforward(cloud, v), cfg.j_min, cfg.j_max);
    results[i] = DirectionResult{std::move(v), std::move(est)};
  });

  ExperimentReport rep;
  rep.config = cfg;
  rep.version = kVersion;
  rep.per_direction.reserve(count);
  for (auto& r : results) rep.per_direction.push_back(std::move(*r));

  std::vector<double> values;
  values.reserve(count);
  for (const auto& r : rep.per_direction) values.push_back(r.estimate.value);
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  rep.empirical_sup = values.back();
  rep.median = k % 2 == 1 ? values[k / 2]
                          : 0.5 * (values[k / 2 - 1] + values[k / 2]);
  rep.interquartile_range =
      values[(3 * (k - 1)) / 4] - values[(k - 1) / 4];
  for (double eps : kExceptionalEps) {
    std::size_t below = 0;
    for (double v : values)
      if (v < rep.empirical_sup - eps) ++below;
    rep.exceptional_fractions.emplace_back(
        eps, static_cast<double>(below) / static_cast<double>(k));
  }
  rep.wall_time_ms = elapsed_ms(start);
  return rep;
}

double exceptional_fraction(const ExperimentReport& rep, double eps) {
  for (const auto& [e, f] : rep.exceptional_fractions)
    if (std::abs(e - eps) < 1e-12) return f;
  return 0.0;
}

}  // namespace

ExperimentReport run_preservation(const ExperimentConfig& cfg) {
  const GeneratorInfo& info = generator_for(cfg);
  if (info.reference_dim > static_cast<double>(cfg.m - cfg.l) + 1e-9)
    throw ConfigError(
        "fractal '" + cfg.fractal_key + "' has reference dimension " +
        std::to_string(info.reference_dim) +
        " > m - l; preservation needs reference <= m - l (use a constancy "
        "experiment instead)");
  ExperimentReport rep = run_sweep(cfg);
  rep.success = std::abs(rep.median - info.reference_dim) <= 0.1 &&
                exceptional_fraction(rep, 0.15) <= 0.1;
  return rep;
}

ExperimentReport run_constancy(const ExperimentConfig& cfg) {
  ExperimentReport rep = run_sweep(cfg);
  rep.success = exceptional_fraction(rep, 0.15) <= 0.1;
  return rep;
}

CensusReport run_marstrand_census(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  generator_for(cfg);  // validates key and n
  const PointCloud cloud = make_generator_cloud(cfg.fractal_key, cfg.depth);
  const int horiz = cfg.n - cfg.l;
  const int proj_dim = cfg.m - cfg.l;
  const Subspace v0(Eigen::MatrixXd::Identity(horiz, proj_dim));

  CensusReport rep;
  rep.config = cfg;
  rep.version = kVersion;
  for (int j = cfg.j_min; j <= cfg.j_max; ++j) {
    // Largest slab at this thickness carries the census.
    const auto pieces = slice_horizontal(cloud, cfg.l, j);
    const SlabPiece* best = &pieces.front();
    for (const auto& p : pieces)
      if (p.shadow.size() > best->shadow.size()) best = &p;

    const DeltaKSet dset = extract_delta_set(best->shadow, v0, j);
    if (!dset.separation_ok)
      throw GuardError("census: extracted set failed separation at level " +
                       std::to_string(j) + " (spread constant " +
                       std::to_string(dset.spread_constant) + ")");

    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(j));
    const DirectionSet dirs =
        build_direction_set(horiz, proj_dim, std::ldexp(1.0, -j), rng);

    const IncidenceReport census =
        bad_direction_census(dset.cloud, dirs, j, cfg.tau);
    const double mean =
        average_tube_count(dset.cloud, dirs, j, cfg.tau, cfg.beta);

    CensusRow row;
    row.level = j;
    row.delta = std::ldexp(1.0, -j);
    row.point_count = dset.cloud.size();
    row.direction_count = static_cast<std::int64_t>(dirs.subspaces.size());
    row.bad_count = census.bad_count;
    row.bound_rhs = census.bound_rhs;
    row.mean_tube_count = mean;
    row.spread_constant = dset.spread_constant;
    rep.rows.push_back(row);
  }
  rep.wall_time_ms = elapsed_ms(start);
  if (!cfg.output_path.empty())
    write_text_file(cfg.output_path, census_to_json(rep) + "\n");
  return rep;
}

namespace {

ordered_json config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = cfg.experiment;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["l"] = cfg.l;
  j["fractal_key"] = cfg.fractal_key;
  j["num_directions"] = cfg.num_directions;
  j["levels"] = {cfg.j_min, cfg.j_max};
  j["seed"] = cfg.seed;
  j["depth"] = cfg.depth;
  j["sigma"] = cfg.sigma;
  j["sigma_prime"] = cfg.sigma_prime;
  j["tau"] = cfg.tau;
  j["beta"] = cfg.beta;
  j["output_path"] = cfg.output_path;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.experiment = j.at("experiment").get<std::string>();
  cfg.n = j.at("n").get<int>();
  cfg.m = j.at("m").get<int>();
  cfg.l = j.at("l").get<int>();
  cfg.fractal_key = j.at("fractal_key").get<std::string>();
  cfg.num_directions = j.at("num_directions").get<int>();
  cfg.j_min = j.at("levels")[0].get<int>();
  cfg.j_max = j.at("levels")[1].get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.depth = j.at("depth").get<int>();
  cfg.sigma = j.at("sigma").get<double>();
  cfg.sigma_prime = j.at("sigma_prime").get<double>();
  cfg.tau = j.at("tau").get<double>();
  cfg.beta = j.at("beta").get<double>();
  cfg.output_path = j.at("output_path").get<std::string>();
  return cfg;
}

ordered_json estimate_to_json_obj(const DimensionEstimate& est) {
  ordered_json j;
  j["method"] = est.method;
  j["value"] = est.value;
  j["slope_stderr"] = est.slope_stderr;
  j["scale_levels"] = est.scale_levels;
  j["counts"] = est.counts;
  return j;
}

DimensionEstimate estimate_from_json(const nlohmann::json& j) {
  DimensionEstimate est;
  est.method = j.at("method").get<std::string>();
  est.value = j.at("value").get<double>();
  est.slope_stderr = j.at("slope_stderr").get<double>();
  est.scale_levels = j.at("scale_levels").get<std::vector<int>>();
  est.counts = j.at("counts").get<std::vector<double>>();
  return est;
}

std::vector<double> frame_rowmajor(const Subspace& v) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(v.ambient_dim() * v.dim()));
  for (int r = 0; r < v.ambient_dim(); ++r)
    for (int c = 0; c < v.dim(); ++c) out.push_back(v.frame()(r, c));
  return out;
}

}  // namespace

std::string report_to_json(const ExperimentReport& rep, bool include_wall_time) {
  ordered_json j;
  j["config"] = config_to_json(rep.config);
  j["version"] = rep.version;
  ordered_json dirs = ordered_json::array();
  for (const auto& r : rep.per_direction) {
    ordered_json d;
    d["ambient_dim"] = r.subspace.ambient_dim();
    d["dim"] = r.subspace.dim();
    d["frame"] = frame_rowmajor(r.subspace);
    d["estimate"] = estimate_to_json_obj(r.estimate);
    dirs.push_back(std::move(d));
  }
  j["per_direction"] = std::move(dirs);
  j["empirical_sup"] = rep.empirical_sup;
  j["median"] = rep.median;
  j["interquartile_range"] = rep.interquartile_range;
  ordered_json fracs = ordered_json::array();
  for (const auto& [eps, frac] : rep.exceptional_fractions)
    fracs.push_back({{"epsilon", eps}, {"fraction", frac}});
  j["exceptional_fractions"] = std::move(fracs);
  j["success"] = rep.success;
  if (include_wall_time) j["wall_time_ms"] = rep.wall_time_ms;
  return j.dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad report JSON: ") + e.what());
  }
  ExperimentReport rep;
  rep.config = config_from_json(j.at("config"));
  rep.version = j.at("version").get<std::string>();
  for (const auto& d : j.at("per_direction")) {
    const int n = d.at("ambient_dim").get<int>();
    const int m = d.at("dim").get<int>();
    const auto vals = d.at("frame").get<std::vector<double>>();
    Eigen::MatrixXd f(n, m);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < m; ++c)
        f(r, c) = vals[static_cast<std::size_t>(r * m + c)];
    rep.per_direction.push_back(
        DirectionResult{Subspace(std::move(f)), estimate_from_json(d.at("estimate"))});
  }
  rep.empirical_sup = j.at("empirical_sup").get<double>();
  rep.median = j.at("median").get<double>();
  rep.interquartile_range = j.at("interquartile_range").get<double>();
  for (const auto& f : j.at("exceptional_fractions"))
    rep.exceptional_fractions.emplace_back(f.at("epsilon").get<double>(),
                                           f.at("fraction").get<double>());
  rep.success = j.at("success").get<bool>();
  if (j.contains("wall_time_ms"))
    rep.wall_time_ms = j.at("wall_time_ms").get<double>();
  return rep;
}

std::string census_to_json(const CensusReport& rep, bool include_wall_time) {
  ordered_json j;
  j["config"] = config_to_json(rep.config);
  j["version"] = rep.version;
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows) {
    ordered_json row;
    row["level"] = r.level;
    row["delta"] = r.delta;
    row["point_count"] = r.point_count;
    row["direction_count"] = r.direction_count;
    row["bad_count"] = r.bad_count;
    row["bound_rhs"] = r.bound_rhs;
    row["mean_tube_count"] = r.mean_tube_count;
    row["spread_constant"] = r.spread_constant;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  if (include_wall_time) j["wall_time_ms"] = rep.wall_time_ms;
  return j.dump(2);
}

std::string run_experiment(const ExperimentConfig& cfg) {
  std::string out;
  if (cfg.experiment == "preservation" || cfg.experiment == "constancy") {
    const ExperimentReport rep = cfg.experiment == "preservation"
                                     ? run_preservation(cfg)
                                     : run_constancy(cfg);
    out = report_to_json(rep);
    if (!cfg.output_path.empty()) write_text_file(cfg.output_path, out + "\n");
  } else if (cfg.experiment == "marstrand-census") {
    out = census_to_json(run_marstrand_census(cfg));
    // run_marstrand_census persists to output_path itself.
  } else {
    throw ConfigError("unknown experiment '" + cfg.experiment +
                      "' (want preservation | constancy | marstrand-census)");
  }
  return out;
}

}  // namespace grassdim

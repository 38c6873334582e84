#include "grassdim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "grassdim/errors.hpp"
#include "grassdim/io.hpp"
#include "grassdim/parallel.hpp"
#include "grassdim/version.hpp"
#include "helpers.hpp"

using namespace grassdim;

namespace {

std::string temp_path(const std::string& stem) {
  return (std::filesystem::temp_directory_path() / stem).string();
}

const char* kFullConfig =
    "# sweep setup\n"
    "experiment = preservation   # trailing comment\n"
    "n = 3\n"
    "  m = 2  \n"
    "l=1\n"
    "fractal_key = cantor-4corner-h3\n"
    "num_directions = 40\n"
    "levels = 5:9\n"
    "seed = 17\n"
    "depth = 7\n"
    "sigma = 0.25\n"
    "sigma_prime = 0.125\n"
    "tau = 0.4\n"
    "beta = 0.8\n"
    "\n"
    "output_path = /tmp/report.json\n";

ExperimentConfig make_config(const std::string& experiment,
                             const std::string& key, int n, int m, int l,
                             int directions, int j_min, int j_max,
                             std::uint64_t seed, int depth) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.fractal_key = key;
  cfg.n = n;
  cfg.m = m;
  cfg.l = l;
  cfg.num_directions = directions;
  cfg.j_min = j_min;
  cfg.j_max = j_max;
  cfg.seed = seed;
  cfg.depth = depth;
  return cfg;
}

}  // namespace

TEST_CASE("config parser reads every key and strips comments") {
  const ExperimentConfig cfg = parse_config_text(kFullConfig);
  CHECK(cfg.experiment == "preservation");
  CHECK(cfg.n == 3);
  CHECK(cfg.m == 2);
  CHECK(cfg.l == 1);
  CHECK(cfg.fractal_key == "cantor-4corner-h3");
  CHECK(cfg.num_directions == 40);
  CHECK(cfg.j_min == 5);
  CHECK(cfg.j_max == 9);
  CHECK(cfg.seed == 17);
  CHECK(cfg.depth == 7);
  CHECK(cfg.sigma == 0.25);
  CHECK(cfg.sigma_prime == 0.125);
  CHECK(cfg.tau == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(cfg.beta == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(cfg.output_path == "/tmp/report.json");
}

TEST_CASE("config parser fills documented defaults") {
  const ExperimentConfig cfg = parse_config_text(
      "experiment = constancy\n"
      "n = 3\nm = 2\nl = 1\n"
      "fractal_key = segment-v3\n"
      "num_directions = 4\n"
      "levels = 2:5\n");
  CHECK(cfg.seed == 0);
  CHECK(cfg.depth == -1);
  CHECK(cfg.sigma == 0.0);
  CHECK(cfg.sigma_prime == 0.0);
  CHECK(cfg.tau == 0.5);
  CHECK(cfg.beta == 0.75);
  CHECK(cfg.output_path.empty());
}

TEST_CASE("config parser rejects malformed input") {
  const std::string base =
      "experiment = constancy\n"
      "n = 3\nm = 2\nl = 1\n"
      "fractal_key = segment-v3\n"
      "num_directions = 4\n"
      "levels = 2:5\n";

  SUBCASE("line without an equals sign") {
    CHECK_THROWS_WITH_AS(parse_config_text(base + "stray line\n"),
                         doctest::Contains("not 'key = value'"), ConfigError);
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_WITH_AS(parse_config_text(base + "n = 4\n"),
                         doctest::Contains("appears twice"), ConfigError);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_WITH_AS(parse_config_text(base + "volume = 3\n"),
                         doctest::Contains("unknown config key"), ConfigError);
  }
  SUBCASE("non-integer value") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            "experiment = constancy\nn = three\nm = 2\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = 2:5\n"),
        doctest::Contains("wants an integer"), ConfigError);
  }
  SUBCASE("missing experiment") {
    CHECK_THROWS_WITH_AS(
        parse_config_text("n = 3\nm = 2\nl = 1\nfractal_key = segment-v3\n"
                          "num_directions = 4\nlevels = 2:5\n"),
        doctest::Contains("'experiment'"), ConfigError);
  }
  SUBCASE("dimension chain must be strict") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            "experiment = constancy\nn = 3\nm = 2\nl = 2\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = 2:5\n"),
        doctest::Contains("0 < l < m < n <= 16"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            "experiment = constancy\nn = 17\nm = 3\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = 2:5\n"),
        ConfigError);
  }
  SUBCASE("missing fractal key") {
    CHECK_THROWS_WITH_AS(
        parse_config_text("experiment = constancy\nn = 3\nm = 2\nl = 1\n"
                          "num_directions = 4\nlevels = 2:5\n"),
        doctest::Contains("'fractal_key'"), ConfigError);
  }
  SUBCASE("num_directions must be positive") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            "experiment = constancy\nn = 3\nm = 2\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 0\nlevels = 2:5\n"),
        doctest::Contains("num_directions >= 1"), ConfigError);
  }
  SUBCASE("levels must look like j_min:j_max") {
    CHECK_THROWS_WITH_AS(
        parse_config_text(
            "experiment = constancy\nn = 3\nm = 2\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = 5\n"),
        doctest::Contains("j_min:j_max"), ConfigError);
  }
  SUBCASE("levels must increase and start at zero or later") {
    CHECK_THROWS_AS(
        parse_config_text(
            "experiment = constancy\nn = 3\nm = 2\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = 7:4\n"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            "experiment = constancy\nn = 3\nm = 2\nl = 1\n"
            "fractal_key = segment-v3\nnum_directions = 4\nlevels = -1:3\n"),
        ConfigError);
  }
}

TEST_CASE("config file round trip and missing file") {
  const std::string path = temp_path("grassdim_cfg_roundtrip.cfg");
  write_text_file(path, kFullConfig);
  const ExperimentConfig a = parse_config_file(path);
  const ExperimentConfig b = parse_config_text(kFullConfig);
  CHECK(a.experiment == b.experiment);
  CHECK(a.num_directions == b.num_directions);
  CHECK(a.output_path == b.output_path);
  std::remove(path.c_str());
  CHECK_THROWS_AS(parse_config_file(temp_path("grassdim_no_such_file.cfg")),
                  ConfigError);
}

TEST_CASE("sweep rejects mismatched or unknown generators") {
  SUBCASE("generator lives in another dimension") {
    const auto cfg =
        make_config("constancy", "cantor-third", 3, 2, 1, 4, 3, 6, 1, -1);
    CHECK_THROWS_WITH_AS(run_constancy(cfg),
                         doctest::Contains("lives in dimension"), ConfigError);
  }
  SUBCASE("unknown generator key") {
    const auto cfg =
        make_config("constancy", "no-such-fractal", 3, 2, 1, 4, 3, 6, 1, -1);
    CHECK_THROWS_WITH_AS(run_constancy(cfg),
                         doctest::Contains("unknown fractal_key"), ConfigError);
  }
  SUBCASE("preservation needs reference dimension at most m - l") {
    const auto cfg = make_config("preservation", "cantor-4corner-x-segment", 3,
                                 2, 1, 4, 3, 6, 1, -1);
    CHECK_THROWS_WITH_AS(run_preservation(cfg),
                         doctest::Contains("reference"), ConfigError);
  }
}

TEST_CASE("preservation sweep concentrates on a preserved segment") {
  const auto cfg = make_config("preservation", "segment-v3", 3, 2, 1,
                               /*directions=*/16, 4, 7, /*seed=*/2,
                               /*depth=*/12);
  const ExperimentReport rep = run_preservation(cfg);

  CHECK(rep.version == std::string(kVersion));
  CHECK(rep.per_direction.size() == 16);
  CHECK(rep.wall_time_ms > 0.0);
  for (const auto& r : rep.per_direction) {
    // Sampled planes all contain the vertical axis, so the projected net is
    // an isometric copy of the segment.
    CHECK(r.subspace.ambient_dim() == 3);
    CHECK(r.subspace.dim() == 2);
    const Eigen::Vector3d e3 = Eigen::Vector3d::Unit(2);
    const Eigen::Vector3d back =
        r.subspace.frame() * (r.subspace.frame().transpose() * e3);
    CHECK((back - e3).norm() <= 1e-9);
    CHECK(r.estimate.method == "box");
    CHECK(r.estimate.value >= 0.85);
    CHECK(r.estimate.value <= 1.15);
    REQUIRE(r.estimate.scale_levels.size() == 4);
    CHECK(r.estimate.scale_levels.front() == 4);
    CHECK(r.estimate.scale_levels.back() == 7);
  }

  CHECK(std::abs(rep.median - 1.0) <= 0.1);
  CHECK(rep.empirical_sup >= rep.median);
  CHECK(rep.interquartile_range >= 0.0);
  CHECK(rep.success);

  REQUIRE(rep.exceptional_fractions.size() == 4);
  const double want_eps[] = {0.1, 0.15, 0.2, 0.3};
  for (int i = 0; i < 4; ++i) {
    CHECK(rep.exceptional_fractions[i].first == want_eps[i]);
    if (i > 0)
      CHECK(rep.exceptional_fractions[i].second <=
            rep.exceptional_fractions[i - 1].second);
  }
}

TEST_CASE("constancy sweep sees a degenerate family exactly") {
  // Every plane of the override family is horizontal, so the vertical line
  // projects to a single point and each estimate is exactly zero.
  const auto cfg = make_config("constancy", "vertical-line-r4", 4, 2, 1,
                               /*directions=*/12, 3, 6, /*seed=*/5,
                               /*depth=*/-1);
  const ExperimentReport rep = run_constancy(cfg);

  CHECK(rep.per_direction.size() == 12);
  for (const auto& r : rep.per_direction) {
    CHECK(r.subspace.ambient_dim() == 4);
    CHECK(r.subspace.dim() == 2);
    CHECK(r.subspace.frame().row(3).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.estimate.value == 0.0);
    for (double c : r.estimate.counts) CHECK(c == 1.0);
  }
  CHECK(rep.empirical_sup == 0.0);
  CHECK(rep.median == 0.0);
  CHECK(rep.interquartile_range == 0.0);
  for (const auto& [eps, frac] : rep.exceptional_fractions) {
    (void)eps;
    CHECK(frac == 0.0);
  }
  CHECK(rep.success);
}

TEST_CASE("direction streams only depend on the direction index") {
  const auto small = make_config("constancy", "segment-v3", 3, 2, 1,
                                 /*directions=*/6, 4, 7, /*seed=*/11,
                                 /*depth=*/12);
  auto large = small;
  large.num_directions = 10;

  const ExperimentReport a = run_constancy(small);
  const ExperimentReport b = run_constancy(large);
  REQUIRE(a.per_direction.size() == 6);
  REQUIRE(b.per_direction.size() == 10);
  for (int i = 0; i < 6; ++i) {
    const auto& ra = a.per_direction[static_cast<std::size_t>(i)];
    const auto& rb = b.per_direction[static_cast<std::size_t>(i)];
    CHECK((ra.subspace.frame() - rb.subspace.frame()).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(ra.estimate.value == rb.estimate.value);
    CHECK(ra.estimate.counts == rb.estimate.counts);
  }
}

TEST_CASE("sweep reports are byte-stable across worker counts") {
  const auto cfg = make_config("constancy", "segment-v3", 3, 2, 1,
                               /*directions=*/10, 4, 7, /*seed=*/11,
                               /*depth=*/12);

  setenv("GRASSDIM_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const std::string serial = report_to_json(run_constancy(cfg), false);

  setenv("GRASSDIM_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  const std::string threaded = report_to_json(run_constancy(cfg), false);
  unsetenv("GRASSDIM_THREADS");

  CHECK(serial == threaded);
}

TEST_CASE("sweep report JSON round trips byte for byte") {
  const auto cfg = make_config("constancy", "vertical-line-r4", 4, 2, 1,
                               /*directions=*/5, 3, 5, /*seed=*/9,
                               /*depth=*/-1);
  const ExperimentReport rep = run_constancy(cfg);

  const std::string without = report_to_json(rep, false);
  const ExperimentReport back = report_from_json(without);
  CHECK(report_to_json(back, false) == without);
  CHECK(back.wall_time_ms == 0.0);

  const std::string with = report_to_json(rep, true);
  const ExperimentReport timed = report_from_json(with);
  CHECK(timed.wall_time_ms == rep.wall_time_ms);
  CHECK(timed.config.fractal_key == "vertical-line-r4");
  CHECK(timed.per_direction.size() == rep.per_direction.size());

  CHECK_THROWS_AS(report_from_json("{not json"), ConfigError);
}

TEST_CASE("census slices, extracts and sweeps the direction sets") {
  auto cfg = make_config("marstrand-census", "cantor-4corner-h3", 3, 2, 1,
                         /*directions=*/1, 3, 5, /*seed=*/3, /*depth=*/6);
  const std::string out_path = temp_path("grassdim_census_report.json");
  cfg.output_path = out_path;

  const CensusReport rep = run_marstrand_census(cfg);
  CHECK(rep.version == std::string(kVersion));
  REQUIRE(rep.rows.size() == 3);

  // The planar four-corner shadow occupies 2^ceil(j/2) cells along the
  // first axis, and the lexicographic representatives stay separated.
  const std::int64_t want_points[] = {4, 4, 8};
  for (int i = 0; i < 3; ++i) {
    const CensusRow& row = rep.rows[static_cast<std::size_t>(i)];
    const int j = 3 + i;
    const double delta = std::ldexp(1.0, -j);
    CHECK(row.level == j);
    CHECK(row.delta == delta);
    CHECK(row.point_count == want_points[i]);
    CHECK(row.direction_count >= 3);
    CHECK(static_cast<double>(row.direction_count) >=
          std::pow(delta, -0.75) - 1.0);
    CHECK(row.bad_count >= 0);
    CHECK(row.bad_count <= row.direction_count);
    // Shadow lives in the plane and tubes have codimension one, so the
    // threshold bound is delta^(tau - 1) * log(1/delta).
    CHECK(row.bound_rhs ==
          doctest::Approx(std::pow(delta, cfg.tau - 1.0) * std::log(1.0 / delta))
              .epsilon(1e-12));
    CHECK(row.mean_tube_count >= 1.0);
    CHECK(row.mean_tube_count <= static_cast<double>(row.point_count));
    CHECK(row.spread_constant >= 1.0);
  }

  const std::string persisted = read_text_file(out_path);
  CHECK(persisted == census_to_json(rep, true) + "\n");
  const auto parsed = nlohmann::json::parse(persisted);
  CHECK(parsed.at("version").get<std::string>() == std::string(kVersion));
  CHECK(parsed.at("rows").size() == 3);
  CHECK(parsed.contains("wall_time_ms"));
  std::remove(out_path.c_str());
}

TEST_CASE("experiment dispatch runs by name and persists reports") {
  auto cfg = make_config("constancy", "vertical-line-r4", 4, 2, 1,
                         /*directions=*/4, 3, 5, /*seed=*/7, /*depth=*/-1);
  const std::string out_path = temp_path("grassdim_dispatch_report.json");
  cfg.output_path = out_path;

  const std::string out = run_experiment(cfg);
  const auto parsed = nlohmann::json::parse(out);
  CHECK(parsed.at("success").get<bool>());
  CHECK(parsed.at("median").get<double>() == 0.0);
  CHECK(read_text_file(out_path) == out + "\n");
  std::remove(out_path.c_str());

  cfg.output_path.clear();
  cfg.experiment = "preservation";
  const std::string pres = run_experiment(cfg);
  CHECK(nlohmann::json::parse(pres).at("config").at("experiment") ==
        "preservation");

  cfg.experiment = "frobnicate";
  CHECK_THROWS_WITH_AS(run_experiment(cfg),
                       doctest::Contains("unknown experiment"), ConfigError);
}

// grassdim — command-line front end for the dimension/projection toolkit.
//
// Subcommands:
//   sample-grassmannian   draw uniform random subspaces, emit JSON
//   project               push a point cloud forward through a subspace
//   boxdim                box-counting dimension estimate of a cloud
//   energy                Riesz s-energy of a cloud
//   marstrand             single-scale bad-direction census of a cloud
//   experiment run <cfg>  run a named experiment from a config file
//   generate <key>        materialize a named fractal generator as a cloud
//
// Exit codes: 0 success, 1 configuration/usage error, 2 numerical-guard
// failure (saturation, insufficient range, resolution, separation).

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <grassdim/dimension.hpp>
#include <grassdim/errors.hpp>
#include <grassdim/experiments.hpp>
#include <grassdim/fractals.hpp>
#include <grassdim/grassmann.hpp>
#include <grassdim/io.hpp>
#include <grassdim/marstrand.hpp>
#include <grassdim/measures.hpp>
#include <grassdim/rng.hpp>
#include <grassdim/version.hpp>

namespace {

using nlohmann::ordered_json;

struct LevelRange {
  int lo = 0;
  int hi = 0;
};

LevelRange parse_levels(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw grassdim::ConfigError("--levels expects the form a:b, got '" + text + "'");
  }
  LevelRange range;
  try {
    range.lo = std::stoi(text.substr(0, colon));
    range.hi = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw grassdim::ConfigError("--levels expects integers a:b, got '" + text + "'");
  }
  return range;
}

int run_sample_grassmannian(int n, int m, int count, std::uint64_t seed,
                            const std::string& out) {
  if (n <= 0 || m <= 0 || m >= n) {
    throw grassdim::ConfigError("sample-grassmannian requires 0 < m < n");
  }
  if (count < 1) {
    throw grassdim::ConfigError("--count must be at least 1");
  }
  grassdim::Rng rng(seed);
  std::string text;
  if (count == 1) {
    text = grassdim::subspace_to_json(grassdim::sample_uniform(n, m, rng));
  } else {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < count; ++i) {
      arr.push_back(ordered_json::parse(
          grassdim::subspace_to_json(grassdim::sample_uniform(n, m, rng))));
    }
    text = arr.dump(2);
  }
  if (out.empty()) {
    std::cout << text << "\n";
  } else {
    grassdim::write_text_file(out, text);
  }
  return 0;
}

int run_project(const std::string& input, const std::string& subspace_path,
                const std::string& out) {
  grassdim::PointCloud cloud = grassdim::read_cloud(input);
  grassdim::Subspace v = grassdim::read_subspace(subspace_path);
  grassdim::write_cloud(grassdim::pushforward(cloud, v), out);
  return 0;
}

int run_boxdim(const std::string& input, const std::string& levels) {
  grassdim::PointCloud cloud = grassdim::read_cloud(input);
  LevelRange range = parse_levels(levels);
  grassdim::DimensionEstimate est =
      grassdim::boxdim_estimate(cloud, range.lo, range.hi);
  std::cout << grassdim::estimate_to_json(est) << "\n";
  return 0;
}

int run_energy(const std::string& input, double s) {
  grassdim::PointCloud cloud = grassdim::read_cloud(input);
  double value = grassdim::riesz_energy(cloud, s);
  ordered_json j;
  j["s"] = s;
  j["energy"] = value;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_marstrand(const std::string& input, int m, int level, double tau,
                  double beta, std::uint64_t seed) {
  grassdim::PointCloud cloud = grassdim::read_cloud(input);
  cloud.weights.setOnes(cloud.size());
  const int n = cloud.dim();
  if (m <= 0 || m >= n) {
    throw grassdim::ConfigError("marstrand requires 0 < m < cloud dimension");
  }
  const double delta = std::ldexp(1.0, -level);
  grassdim::Rng rng(seed);
  grassdim::DirectionSet dirs = grassdim::build_direction_set(n, m, delta, rng);
  grassdim::IncidenceReport census =
      grassdim::bad_direction_census(cloud, dirs, level, tau);
  double mean_tubes =
      grassdim::average_tube_count(cloud, dirs, level, tau, beta);
  grassdim::DeltaKSet certificate =
      grassdim::verify_delta_k(cloud, delta, m, 64);
  ordered_json j;
  j["level"] = level;
  j["delta"] = delta;
  j["point_count"] = census.point_count;
  j["direction_count"] = static_cast<std::int64_t>(dirs.subspaces.size());
  j["bad_count"] = census.bad_count;
  j["tau"] = tau;
  j["bound_rhs"] = census.bound_rhs;
  j["mean_tube_count"] = mean_tubes;
  j["spread_constant"] = certificate.spread_constant;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_experiment_cmd(const std::string& config_path) {
  grassdim::ExperimentConfig cfg = grassdim::parse_config_file(config_path);
  std::cout << grassdim::run_experiment(cfg) << "\n";
  return 0;
}

int run_generate(const std::string& key, int depth, const std::string& out) {
  grassdim::PointCloud cloud = grassdim::make_generator_cloud(key, depth);
  grassdim::write_cloud(cloud, out);
  std::cerr << "wrote " << cloud.size() << " points to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grassdim: projection and fractal-dimension experiments"};
  app.set_version_flag("--version", std::string(grassdim::kVersion));
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // sample-grassmannian
  auto* sample = app.add_subcommand("sample-grassmannian",
                                    "Draw uniform random m-planes in R^n");
  int sg_n = 0, sg_m = 0, sg_count = 1;
  std::uint64_t sg_seed = 0;
  std::string sg_out;
  sample->add_option("--n", sg_n, "ambient dimension")->required();
  sample->add_option("--m", sg_m, "subspace dimension")->required();
  sample->add_option("--count", sg_count, "number of samples");
  sample->add_option("--seed", sg_seed, "rng seed");
  sample->add_option("--out", sg_out, "output path (default: stdout)");

  // project
  auto* project = app.add_subcommand("project",
                                     "Project a cloud into subspace coordinates");
  std::string pr_input, pr_subspace, pr_out;
  project->add_option("--input", pr_input, "input cloud (.csv or .gdpc)")->required();
  project->add_option("--subspace", pr_subspace, "subspace JSON file")->required();
  project->add_option("--out", pr_out, "output cloud path")->required();

  // boxdim
  auto* boxdim = app.add_subcommand("boxdim", "Box-counting dimension estimate");
  std::string bd_input, bd_levels;
  boxdim->add_option("--input", bd_input, "input cloud")->required();
  boxdim->add_option("--levels", bd_levels, "dyadic level range a:b")->required();

  // energy
  auto* energy = app.add_subcommand("energy", "Riesz s-energy of a cloud");
  std::string en_input;
  double en_s = 0.5;
  energy->add_option("--input", en_input, "input cloud")->required();
  energy->add_option("--s", en_s, "energy exponent s > 0")->required();

  // marstrand
  auto* marstrand = app.add_subcommand(
      "marstrand", "Bad-direction census of a cloud at one dyadic scale");
  std::string ms_input;
  int ms_m = 1, ms_level = 4;
  double ms_tau = 0.5, ms_beta = 0.75;
  std::uint64_t ms_seed = 0;
  marstrand->add_option("--input", ms_input, "input cloud (unit weights assumed)")
      ->required();
  marstrand->add_option("--m", ms_m, "projection subspace dimension")->required();
  marstrand->add_option("--level", ms_level, "dyadic level j (delta = 2^-j)")
      ->required();
  marstrand->add_option("--tau", ms_tau, "badness threshold exponent");
  marstrand->add_option("--beta", ms_beta, "direction-set richness exponent");
  marstrand->add_option("--seed", ms_seed, "rng seed");

  // experiment run
  auto* experiment = app.add_subcommand("experiment", "Experiment harness");
  experiment->require_subcommand(1);
  auto* exp_run = experiment->add_subcommand("run", "Run an experiment config");
  std::string ex_config;
  exp_run->add_option("config", ex_config, "config file path")->required();

  // generate
  auto* generate = app.add_subcommand("generate", "Materialize a named generator");
  std::string gn_key, gn_out;
  int gn_depth = -1;
  generate->add_option("key", gn_key, "generator key")->required();
  generate->add_option("--depth", gn_depth, "iteration depth (default: per key)");
  generate->add_option("--out", gn_out, "output cloud path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's fine-grained exit codes: anything but a clean
    // help/version printout is a usage error.
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sample->parsed()) {
      return run_sample_grassmannian(sg_n, sg_m, sg_count, sg_seed, sg_out);
    }
    if (project->parsed()) {
      return run_project(pr_input, pr_subspace, pr_out);
    }
    if (boxdim->parsed()) {
      return run_boxdim(bd_input, bd_levels);
    }
    if (energy->parsed()) {
      return run_energy(en_input, en_s);
    }
    if (marstrand->parsed()) {
      return run_marstrand(ms_input, ms_m, ms_level, ms_tau, ms_beta, ms_seed);
    }
    if (experiment->parsed()) {
      return run_experiment_cmd(ex_config);
    }
    if (generate->parsed()) {
      return run_generate(gn_key, gn_depth, gn_out);
    }
  } catch (const grassdim::GuardError& e) {
    std::cerr << "guard failure: " << e.what() << "\n";
    return 2;
  } catch (const grassdim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return 1;
}

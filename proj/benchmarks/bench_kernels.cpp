// Microbenchmarks for the hot kernels: dyadic box counting, Riesz energy,
// tube bucketing, Grassmannian distances and mollification.

#include <benchmark/benchmark.h>

#include <grassdim/dimension.hpp>
#include <grassdim/fractals.hpp>
#include <grassdim/grassmann.hpp>
#include <grassdim/marstrand.hpp>
#include <grassdim/measures.hpp>
#include <grassdim/rng.hpp>

namespace {

grassdim::PointCloud random_cloud(int dim, int count, std::uint64_t seed) {
  grassdim::Rng rng(seed);
  Eigen::MatrixXd pts(count, dim);
  for (int i = 0; i < count; ++i)
    for (int d = 0; d < dim; ++d) pts(i, d) = rng.uniform();
  return grassdim::PointCloud::equal_weights(pts);
}

void BM_BoxCount(benchmark::State& state) {
  const auto cloud = grassdim::make_generator_cloud("cantor-4corner", 6);
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(grassdim::box_count(cloud, level));
  state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_BoxCount)->Arg(6)->Arg(10);

void BM_RieszEnergy(benchmark::State& state) {
  const auto cloud = random_cloud(3, static_cast<int>(state.range(0)), 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(grassdim::riesz_energy(cloud, 1.0));
  state.SetItemsProcessed(state.iterations() * cloud.size() * cloud.size());
}
BENCHMARK(BM_RieszEnergy)->Arg(256)->Arg(1024);

void BM_TubeCount(benchmark::State& state) {
  const auto cloud = random_cloud(3, 4096, 11);
  grassdim::Rng rng(13);
  const auto v = grassdim::sample_uniform(3, 2, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(grassdim::tube_count(cloud, v, 6));
  state.SetItemsProcessed(state.iterations() * cloud.size());
}
BENCHMARK(BM_TubeCount);

void BM_DpiDistance(benchmark::State& state) {
  grassdim::Rng rng(17);
  const auto v = grassdim::sample_uniform(4, 2, rng);
  const auto w = grassdim::sample_uniform(4, 2, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(grassdim::dpi_distance(v, w));
}
BENCHMARK(BM_DpiDistance);

void BM_Mollify(benchmark::State& state) {
  const auto cloud = random_cloud(2, 64, 23);
  for (auto _ : state)
    benchmark::DoNotOptimize(grassdim::mollify(cloud, 0.25, 5));
}
BENCHMARK(BM_Mollify);

void BM_DirectionSet(benchmark::State& state) {
  for (auto _ : state) {
    grassdim::Rng rng(29);
    benchmark::DoNotOptimize(grassdim::build_direction_set(3, 2, 1.0 / 32, rng));
  }
}
BENCHMARK(BM_DirectionSet);

}  // namespace

BENCHMARK_MAIN();

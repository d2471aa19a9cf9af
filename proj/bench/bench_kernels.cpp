// Serial reference kernels against their OpenMP versions.

#include "lvr/kernels.hpp"
#include "lvr/features.hpp"
#include "lvr/registration.hpp"
#include "lvr/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace lvr;

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double extent) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  PointCloud c(n);
  for (Vec3& p : c) p = {u(rng), u(rng), u(rng)};
  return c;
}

FeatureMatrix random_features(Eigen::Index n, std::uint64_t seed) {
  FeatureMatrix m(n, kLocalDim);
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) = random_unit_vector(kLocalDim, seed + i).transpose();
  return m;
}

template <bool Serial>
void BM_ConsistencyMatrix(benchmark::State& state) {
  SyntheticCorrespondenceConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  const auto p = make_correspondence_problem(cfg);
  PointCloud src, dst;
  for (const auto& c : p.correspondences) {
    src.push_back(c.source);
    dst.push_back(c.target);
  }
  for (auto _ : state) {
    auto m = Serial ? kernels::consistency_matrix_serial(src, dst, 0.5) : kernels::consistency_matrix(src, dst, 0.5);
    benchmark::DoNotOptimize(m.data());
  }
}

template <bool Serial>
void BM_FeatureDistances(benchmark::State& state) {
  const FeatureMatrix a = random_features(state.range(0), 1);
  const FeatureMatrix b = random_features(state.range(0), 100000);
  for (auto _ : state) {
    auto d = Serial ? kernels::feature_distances_serial(a, b) : kernels::feature_distances(a, b);
    benchmark::DoNotOptimize(d.data());
  }
}

template <bool Serial>
void BM_NearestNeighbors(benchmark::State& state) {
  const PointCloud q = random_cloud(static_cast<std::size_t>(state.range(0)), 1, 20.0);
  const PointCloud c = random_cloud(4096, 2, 20.0);
  for (auto _ : state) {
    auto nn = Serial ? kernels::nearest_neighbors_serial(q, c) : kernels::nearest_neighbors(q, c);
    benchmark::DoNotOptimize(nn.data());
  }
}

template <bool Serial>
void BM_TraverseRays(benchmark::State& state) {
  const PointCloud e = random_cloud(static_cast<std::size_t>(state.range(0)), 3, 30.0);
  const Vec3 origin = Vec3::Zero();
  for (auto _ : state) {
    auto r = Serial ? kernels::traverse_rays_serial(origin, e, 0.2, 60.0) : kernels::traverse_rays(origin, e, 0.2, 60.0);
    benchmark::DoNotOptimize(r.skipped.data());
  }
}

void BM_RegisterSpectral(benchmark::State& state) {
  SyntheticCorrespondenceConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  const auto p = make_correspondence_problem(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(register_spectral(p.correspondences, {}).kept_count);
}

void BM_RegisterRansac10k(benchmark::State& state) {
  SyntheticCorrespondenceConfig cfg;
  cfg.n = static_cast<std::size_t>(state.range(0));
  const auto p = make_correspondence_problem(cfg);
  RansacConfig rc;
  rc.iterations = 10000;
  for (auto _ : state) benchmark::DoNotOptimize(register_ransac(p.correspondences, rc).kept_count);
}

}  // namespace

BENCHMARK(BM_ConsistencyMatrix<true>)->Name("consistency_matrix/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_ConsistencyMatrix<false>)->Name("consistency_matrix/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_FeatureDistances<true>)->Name("feature_distances/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_FeatureDistances<false>)->Name("feature_distances/omp")->Arg(128)->Arg(512);
BENCHMARK(BM_NearestNeighbors<true>)->Name("nearest_neighbors/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_NearestNeighbors<false>)->Name("nearest_neighbors/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_TraverseRays<true>)->Name("traverse_rays/serial")->Arg(1024)->Arg(6144);
BENCHMARK(BM_TraverseRays<false>)->Name("traverse_rays/omp")->Arg(1024)->Arg(6144);
BENCHMARK(BM_RegisterSpectral)->Name("register/spectral")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegisterRansac10k)->Name("register/ransac_10k")->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP versions. The Arg is the
// execution path: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "rfdm/forest.hpp"
#include "rfdm/importance.hpp"
#include "rfdm/manifold.hpp"
#include "rfdm/metric.hpp"
#include "rfdm/random.hpp"

using namespace rfdm;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.normal();
  return m;
}

FeatureMatrix genotypes(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n * p);
  for (auto& x : v) x = static_cast<double>(rng.below(3));
  return FeatureMatrix(n, p, std::move(v));
}

struct ForestFixture {
  FeatureMatrix x = genotypes(200, 100, 1);
  DistanceMatrix d = euclidean_distances(gaussian(200, 20, 2));
  Forest forest;
  ForestFixture() {
    ForestParams p;
    p.n_trees = 100;
    p.seed = 3;
    forest = grow_forest(x, d, p);
  }
};

const ForestFixture& fixture() {
  static const ForestFixture f;
  return f;
}

void BM_EuclideanDistances(benchmark::State& state) {
  const Eigen::MatrixXd y = gaussian(400, 400, 4);
  for (auto _ : state) benchmark::DoNotOptimize(euclidean_distances(y, exec_of(state)));
}

void BM_SpdDistances(benchmark::State& state) {
  Rng rng(5);
  std::vector<Eigen::MatrixXd> m;
  for (int i = 0; i < 100; ++i) {
    const Eigen::MatrixXd g = gaussian(10, 12, rng.next_u64());
    m.push_back(g * g.transpose() / 12.0 + 0.1 * Eigen::MatrixXd::Identity(10, 10));
  }
  for (auto _ : state) benchmark::DoNotOptimize(spd_distances(m, exec_of(state)));
}

void BM_GrowForest(benchmark::State& state) {
  const auto& f = fixture();
  ForestParams p;
  p.n_trees = 50;
  p.seed = 6;
  for (auto _ : state) benchmark::DoNotOptimize(grow_forest(f.x, f.d, p, exec_of(state)));
}

void BM_Proximity(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(proximity(f.forest, exec_of(state)));
}

void BM_PairwiseInteraction(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(pairwise_interaction(f.forest, InteractionVariant::squared, exec_of(state)));
}

void BM_TrteProximity(benchmark::State& state) {
  const Eigen::MatrixXd y = gaussian(200, 10, 7);
  TrteParams p;
  for (auto _ : state) benchmark::DoNotOptimize(trte_proximity(y, p, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_EuclideanDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpdDistances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GrowForest)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Proximity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairwiseInteraction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrteProximity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <numeric>

#include "srcpool/eval.hpp"
#include "srcpool/generators.hpp"
#include "srcpool/linalg.hpp"
#include "srcpool/registry.hpp"
#include "srcpool/rng.hpp"
#include "srcpool/training.hpp"

using namespace srcpool;

namespace {

Graph sensor_with_signal(Index n) {
  const Graph g = build_sensor(n, 7);
  return g.with_features(signal_matrix(g));
}

// One pool() call per iteration; arg 0 indexes operator_ids().
void BM_Pool(benchmark::State& state) {
  const std::string_view id = operator_ids()[static_cast<std::size_t>(state.range(0))];
  const Graph g = sensor_with_signal(state.range(1));
  const auto op = make_operator(id, {}, {g.num_nodes(), g.num_features()});
  for (auto _ : state) benchmark::DoNotOptimize(pool(g, *op));
  state.SetLabel(std::string(id));
}
BENCHMARK(BM_Pool)->ArgsProduct({{0, 1, 2, 3, 4, 5, 6, 7}, {64, 256}})->Unit(benchmark::kMicrosecond);

void BM_KronReduction(benchmark::State& state) {
  const Index n = state.range(0);
  const Matrix l = laplacian(build_sensor(n, 3));
  std::vector<Index> keep(static_cast<std::size_t>(n / 2));
  std::iota(keep.begin(), keep.end(), 0);
  for (auto& k : keep) k *= 2;
  for (auto _ : state) benchmark::DoNotOptimize(kron_reduction(l, keep));
}
BENCHMARK(BM_KronReduction)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_Sparsemax(benchmark::State& state) {
  Rng rng(1);
  Matrix m(256, state.range(0));
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(sparsemax_rows(m));
}
BENCHMARK(BM_Sparsemax)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

// A few spectral-loss training epochs of a dense trainable operator.
void BM_TrainEpochs(benchmark::State& state) {
  const std::string_view id = state.range(0) == 0 ? "mincut" : "diffpool";
  const Graph g = sensor_with_signal(64);
  TrainConfig cfg = spectral_train_defaults();
  cfg.max_epochs = 10;
  cfg.patience = 10;
  for (auto _ : state) {
    auto op = make_operator(id, {}, {g.num_nodes(), g.num_features()});
    benchmark::DoNotOptimize(train(dynamic_cast<TrainablePooling&>(*op), g, cfg));
  }
  state.SetLabel(std::string(id));
}
BENCHMARK(BM_TrainEpochs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_StorageProbe(benchmark::State& state) {
  const std::vector<Index> sizes{static_cast<Index>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(storage_probe("topk", sizes, 0.1, 1));
}
BENCHMARK(BM_StorageProbe)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

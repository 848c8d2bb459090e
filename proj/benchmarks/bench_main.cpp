// Microbenchmarks for the hot paths: graph generation, centrality, and one
// simulation epoch. Run with --benchmark_min_time=... as usual.

#include <benchmark/benchmark.h>

#include "maxspan/centrality.hpp"
#include "maxspan/fedsim.hpp"
#include "maxspan/placement.hpp"

using namespace maxspan;

namespace {

GraphSpec dg_spec(int n, double radius, std::uint64_t seed) {
  GraphSpec s;
  s.family = GraphFamily::DirectedGeometric;
  s.n = n;
  s.radius = radius;
  s.seed = seed;
  return s;
}

void BM_GenerateDG(benchmark::State& state) {
  const GraphSpec spec = dg_spec(static_cast<int>(state.range(0)), 0.3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(generate(spec).graph.edge_count());
}
BENCHMARK(BM_GenerateDG)->Arg(25)->Arg(100)->Arg(400);

void BM_Betweenness(benchmark::State& state) {
  const auto g =
      generate_strongly_connected(dg_spec(static_cast<int>(state.range(0)), 0.4, 2), 100000).graph;
  for (auto _ : state) benchmark::DoNotOptimize(betweenness_centrality(g).scores[0]);
}
BENCHMARK(BM_Betweenness)->Arg(25)->Arg(100);

void BM_Eigenvector(benchmark::State& state) {
  const auto g =
      generate_strongly_connected(dg_spec(static_cast<int>(state.range(0)), 0.4, 2), 100000).graph;
  for (auto _ : state) benchmark::DoNotOptimize(eigenvector_centrality(g).scores[0]);
}
BENCHMARK(BM_Eigenvector)->Arg(25)->Arg(100);

void BM_MaxspanPlace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto g = generate_strongly_connected(dg_spec(n, 0.3, 3), 100000).graph;
  for (auto _ : state) benchmark::DoNotOptimize(maxspan_place(g, n / 5, n, 7)[0]);
}
BENCHMARK(BM_MaxspanPlace)->Arg(25)->Arg(100);

void BM_SimEpoch(benchmark::State& state) {
  const auto g = generate_strongly_connected(dg_spec(25, 0.3, 4), 100000).graph;
  BlobTaskParams params;
  SoftmaxTask st = make_blob_task(params, 5);
  SimConfig sim;
  partition_data(st, 25, sim.partition, 6, sim.batch_size);
  const Task task = st;
  std::vector<NodeState> nodes;
  for (int i = 0; i < 25; ++i) nodes.push_back(initial_state(task, sim, i, Role::Honest));
  int epoch = 0;
  for (auto _ : state) {
    const auto snapshot = nodes;
    ++epoch;
    for (int i = 0; i < 25; ++i)
      nodes[static_cast<std::size_t>(i)] =
          honest_step(task, g, sim.alpha, snapshot, i, epoch_batch(task, sim, i, epoch));
    benchmark::DoNotOptimize(nodes[0].x[0]);
  }
}
BENCHMARK(BM_SimEpoch);

}  // namespace

BENCHMARK_MAIN();

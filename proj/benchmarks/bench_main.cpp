#include <benchmark/benchmark.h>

#include "mtlnet/experiments.hpp"
#include "mtlnet/mtl.hpp"

using namespace mtlnet;

static void BM_PropagationParams(benchmark::State& state) {
  const CableSpec cable = CableSpec::default_cable(static_cast<int>(state.range(0)));
  const FrequencyGrid grid = FrequencyGrid::plc_default();
  for (auto _ : state) benchmark::DoNotOptimize(line_propagation_params(cable, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}
BENCHMARK(BM_PropagationParams)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ReduceToPort(benchmark::State& state) {
  EnsembleConfig cfg;
  cfg.min_nodes = cfg.max_nodes = static_cast<std::size_t>(state.range(0));
  const NetworkSolver solver(generate_random_network(cfg, 0), cfg.grid);
  for (auto _ : state) benchmark::DoNotOptimize(solver.reduce_to_port(kReceiverPort));
}
BENCHMARK(BM_ReduceToPort)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_EndToEndCtf(benchmark::State& state) {
  EnsembleConfig cfg;
  cfg.min_nodes = cfg.max_nodes = 8;
  const NetworkTopology net = generate_random_network(cfg, 0);
  const NetworkSolver solver(net, cfg.grid);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.end_to_end_ctf(kTransmitterPort, "n0", CtfReference::source_emf));
  }
}
BENCHMARK(BM_EndToEndCtf)->Unit(benchmark::kMillisecond);

static void BM_TimeDomain(benchmark::State& state) {
  EnsembleConfig cfg;
  const MatrixSpectrum y = reduce_to_port(generate_random_network(cfg, 0), kReceiverPort, cfg.grid).y_in;
  for (auto _ : state) benchmark::DoNotOptimize(to_time_domain(y));
}
BENCHMARK(BM_TimeDomain)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();

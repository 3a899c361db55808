#include <benchmark/benchmark.h>

#include <vector>

#include "mems4/branch.hpp"
#include "mems4/certify.hpp"
#include "mems4/radial_operator.hpp"
#include "mems4/subsolution.hpp"

using namespace mems4;

namespace {

OperatorMatrix op_for(int dim, std::size_t nodes) { return assemble_bilaplacian(build_grid(nodes, 1.5, Dimension(dim))); }

void BM_Assemble(benchmark::State& st) {
  const GridPtr g = build_grid(static_cast<std::size_t>(st.range(0)), 1.5, Dimension(9));
  for (auto _ : st) benchmark::DoNotOptimize(assemble_bilaplacian(g));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Assemble)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_BandedSolve(benchmark::State& st) {
  const OperatorMatrix op = op_for(9, static_cast<std::size_t>(st.range(0)));
  const std::vector<double> f(op.grid().size(), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(op.solve(f));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_BandedSolve)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_Nu1(benchmark::State& st) {
  const OperatorMatrix op = op_for(3, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(nu1(op));
}
BENCHMARK(BM_Nu1)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_MinimalSolution(benchmark::State& st) {
  const OperatorMatrix op = op_for(17, 1024);
  const double lambda = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(minimal_solution(op, lambda));
}
BENCHMARK(BM_MinimalSolution)->Arg(100)->Arg(1000)->Arg(1340)->Unit(benchmark::kMillisecond);

void BM_PullIn(benchmark::State& st) {
  const OperatorMatrix op = op_for(static_cast<int>(st.range(0)), 1024);
  for (auto _ : st) benchmark::DoNotOptimize(pull_in_voltage(op));
}
BENCHMARK(BM_PullIn)->Arg(3)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_GreenMatrix(benchmark::State& st) {
  const OperatorMatrix op = op_for(9, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(green_matrix(op));
}
BENCHMARK(BM_GreenMatrix)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CertifyHjh(benchmark::State& st) {
  const Dimension d(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(certify_hjh(d));
}
BENCHMARK(BM_CertifyHjh)->Arg(9)->Arg(17)->Arg(30);

void BM_Replay(benchmark::State& st) {
  const Certificate c = certify_hjh(Dimension(20));
  for (auto _ : st) benchmark::DoNotOptimize(replay(c));
}
BENCHMARK(BM_Replay);

void BM_Thresholds(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(certify_thresholds(Dimension(1), Dimension(40)));
}
BENCHMARK(BM_Thresholds);

void BM_W3Search(benchmark::State& st) {
  const auto fam = wm_family({Rational(3)});
  for (auto _ : st) benchmark::DoNotOptimize(subsolution_search(Dimension(17), fam, std::nullopt, {}));
}
BENCHMARK(BM_W3Search)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

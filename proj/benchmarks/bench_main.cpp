#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "symdyn/entropy.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/noninv.hpp"
#include "symdyn/partitions.hpp"
#include "symdyn/prediction.hpp"
#include "symdyn/subshifts.hpp"

using namespace symdyn;

namespace {

const Alphabet kBinary = Alphabet::from_chars("01");

void BM_GoldenLanguage(benchmark::State& state) {
  ForbiddenWordShift golden(kBinary, {kBinary.encode("11")});
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(golden.words(n, std::size_t{1} << 24));
}
BENCHMARK(BM_GoldenLanguage)->Arg(12)->Arg(20);

void BM_SpectralEntropy(benchmark::State& state) {
  FullShift full(kBinary);
  auto graph = sft_approximation(full, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sft_entropy_exact(graph));
}
BENCHMARK(BM_SpectralEntropy)->Arg(4)->Arg(8);

void BM_SturmianComplexity(benchmark::State& state) {
  SturmianShift s(Rational::make(377, 610));
  for (auto _ : state) benchmark::DoNotOptimize(complexity(s, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_SturmianComplexity)->Arg(30)->Arg(200);

void BM_PastBranching(benchmark::State& state) {
  SturmianShift s(Rational::make(233, 610));
  for (auto _ : state) benchmark::DoNotOptimize(past_branching(s, static_cast<std::size_t>(state.range(0)), 8));
}
BENCHMARK(BM_PastBranching)->Arg(16)->Arg(64);

void BM_ProductComplexity(benchmark::State& state) {
  ProductShift p(std::make_shared<const SturmianShift>(Rational::make(377, 610)),
                 std::make_shared<const FullShift>(kBinary));
  for (auto _ : state) benchmark::DoNotOptimize(complexity(p, static_cast<std::size_t>(state.range(0)), 1 << 21));
}
BENCHMARK(BM_ProductComplexity)->Arg(10)->Arg(14);

void BM_BuildStageOne(benchmark::State& state) {
  ConstructionSchedule schedule;
  for (auto _ : state) benchmark::DoNotOptimize(build_stage(schedule.x0, schedule, 0));
}
BENCHMARK(BM_BuildStageOne);

void BM_LazySymbolAccess(benchmark::State& state) {
  NoninvGenerator g{ConstructionSchedule{}};
  std::mt19937_64 rng(7);
  std::uint64_t span = g.stage(2).length;
  for (auto _ : state) benchmark::DoNotOptimize(g.symbol_at(2, rng() % span));
}
BENCHMARK(BM_LazySymbolAccess);

void BM_SeparatedCount(benchmark::State& state) {
  auto stream = prefix_stream(ConstructionSchedule{}, 100000);
  for (auto _ : state) benchmark::DoNotOptimize(separated_count(*stream, 60, 0.1, 100000 - 59));
}
BENCHMARK(BM_SeparatedCount)->Unit(benchmark::kMillisecond);

void BM_RohlinDistance(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto sample = std::make_shared<const WeightedSample>(WeightedSample::uniform(n));
  std::mt19937_64 rng(3);
  std::vector<std::size_t> a(n), b(n);
  for (auto& v : a) v = rng() % 16;
  for (auto& v : b) v = rng() % 16;
  Partition p(sample, a), q(sample, b);
  for (auto _ : state) benchmark::DoNotOptimize(rohlin_distance(p, q));
}
BENCHMARK(BM_RohlinDistance)->Arg(64)->Arg(4096);

void BM_MarkerSearch(benchmark::State& state) {
  MarkerParams params{static_cast<unsigned>(state.range(0)), 1, 3, 2.0 / static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(search_marker_family(params));
}
BENCHMARK(BM_MarkerSearch)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

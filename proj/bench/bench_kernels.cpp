// Serial reference versus OpenMP path for each data-parallel kernel.
// Arg 0 is the serial path, arg 1 the parallel one.
#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "sensemt/curation.hpp"
#include "sensemt/evaluation.hpp"
#include "sensemt/retrieval.hpp"
#include "sensemt/sense_index.hpp"

using namespace sensemt;

namespace {

struct Workload {
  testing::SyntheticWorld world;
  std::string corpus_text;
  SenseIndex index;
  std::vector<EvalItem> items;
  std::map<std::string, std::string, std::less<>> hyps;
};

const Workload& workload() {
  static const Workload w = [] {
    Workload w{testing::make_synthetic_world(20000, 2000, 99), {}, {}, {}, {}};
    w.corpus_text = serialize_corpus(w.world.corpus);
    w.index = build_index(w.world.corpus, "bench");
    w.items = w.world.items;
    for (std::size_t i = 0; i < w.items.size(); ++i)
      w.hyps[w.items[i].id] = i % 3 ? w.items[i].good.front() : std::string("el nada");
    return w;
  }();
  return w;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_Parse(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(parse_annotated_corpus(w.corpus_text, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * w.world.corpus.size());
}

void BM_BuildIndex(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(build_index(w.world.corpus, "bench", exec_of(state)));
  state.SetItemsProcessed(state.iterations() * w.world.corpus.size());
}

void BM_Coverage(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(coverage_report(w.world.corpus, w.index, 3, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * w.world.corpus.size());
}

void BM_Score(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state) benchmark::DoNotOptimize(score_corpus(w.world.corpus, w.index, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * w.world.corpus.size());
}

void BM_Evaluate(benchmark::State& state) {
  const auto& w = workload();
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_run(w.hyps, w.items, MissPolicy::exclude, {}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * w.items.size());
}

}  // namespace

BENCHMARK(BM_Parse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildIndex)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Coverage)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Score)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

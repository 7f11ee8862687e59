#include <benchmark/benchmark.h>

#include <memory>

#include "qmine/session.hpp"
#include "qmine/workload.hpp"

namespace {

using namespace qmine;

std::shared_ptr<const TransactionDB> shared_db() {
  static const auto db = [] {
    GeneratorParams p;
    p.items = 50;
    p.transactions = 5000;
    p.seed = 2024;
    return std::make_shared<const TransactionDB>(generate_db(p));
  }();
  return db;
}

void BM_Materialize(benchmark::State& state) {
  SetConjunct all;
  all.min_support = static_cast<Count>(state.range(0));
  std::size_t sets = 0;
  for (auto _ : state) {
    const MineResult r = mine_set_conjunct(*shared_db(), all);
    sets = r.sets.size();
    benchmark::DoNotOptimize(sets);
  }
  state.counters["sets"] = static_cast<double>(sets);
}
BENCHMARK(BM_Materialize)->Arg(400)->Arg(200)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CountSupports(benchmark::State& state) {
  std::vector<Itemset> pairs;
  for (Item a = 0; a < 50; ++a)
    for (Item b = a + 1; b < 50; ++b) pairs.push_back(Itemset{a, b});
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_supports(shared_db()->transactions(), pairs, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(shared_db()->size()));
}
BENCHMARK(BM_CountSupports)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Plan(benchmark::State& state) {
  const std::string text =
      "(body(1) | head(2)) & !(body(3) & support >= 40) & (confidence >= 0.4 | head(5)) & !body(7)";
  for (auto _ : state) benchmark::DoNotOptimize(to_disjoint_dnf(parse_query(text)));
}
BENCHMARK(BM_Plan);

// Runs the same query in a fresh session for each strategy; the
// post-processing session is opened once outside the timed loop.
void query_bench(benchmark::State& state, Strategy strategy, const std::string& text) {
  SessionConfig cfg;
  cfg.strategy = strategy;
  cfg.floor_support = 100;
  auto session = std::make_unique<Session>(shared_db(), cfg);
  for (auto _ : state) {
    if (strategy == Strategy::incremental) {
      state.PauseTiming();
      session = std::make_unique<Session>(shared_db(), cfg);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(session->run(text));
  }
}

const std::string kSelective = "body(0) & head(1) & confidence >= 0.3";
const std::string kOpen = "confidence >= 0.9";

BENCHMARK_CAPTURE(query_bench, integrated_selective, Strategy::integrated, kSelective)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(query_bench, postprocess_selective, Strategy::postprocess, kSelective)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(query_bench, incremental_selective, Strategy::incremental, kSelective)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(query_bench, integrated_open, Strategy::integrated, kOpen)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(query_bench, postprocess_open, Strategy::postprocess, kOpen)->Unit(benchmark::kMillisecond);

void BM_IncrementalRepeat(benchmark::State& state) {
  SessionConfig cfg;
  cfg.strategy = Strategy::incremental;
  cfg.floor_support = 100;
  Session session(shared_db(), cfg);
  session.run(kSelective);
  for (auto _ : state) benchmark::DoNotOptimize(session.run(kSelective));
}
BENCHMARK(BM_IncrementalRepeat)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

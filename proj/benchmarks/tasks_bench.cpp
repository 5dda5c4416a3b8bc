#include <benchmark/benchmark.h>

#include <string>

#include "gtvm/corpus/corpus.hpp"

using namespace gtvm;

namespace {

void BM_Task(benchmark::State& state, const char* task, const char* variant, rules::MatcherKind matcher) {
  const int n = static_cast<int>(state.range(0));
  const std::string fixture = "random:" + std::to_string(n) + ":" + std::to_string(n * 2) + ":3:1";
  for (auto _ : state) {
    state.PauseTiming();
    auto space = corpus::build_fixture(fixture);
    state.ResumeTiming();
    auto r = corpus::run_task(task, variant, std::move(space), matcher);
    benchmark::DoNotOptimize(r.report.log.size());
  }
}

constexpr auto kInc = rules::MatcherKind::Incremental;
constexpr auto kLs = rules::MatcherKind::LocalSearch;

}  // namespace

BENCHMARK_CAPTURE(BM_Task, count_asm_inc, "2.2", "asm", kInc)->Range(16, 128);
BENCHMARK_CAPTURE(BM_Task, count_asm_ls, "2.2", "asm", kLs)->Range(16, 128);
BENCHMARK_CAPTURE(BM_Task, reverse_gt_inc, "2.3", "gt", kInc)->Range(16, 128);
BENCHMARK_CAPTURE(BM_Task, migrate_copy_inc, "2.4", "copy", kInc)->Range(16, 128);
BENCHMARK_CAPTURE(BM_Task, closure_all_asm_inc, "2.6", "all-asm", kInc)->Range(8, 32);
BENCHMARK_CAPTURE(BM_Task, closure_all_asm_ls, "2.6", "all-asm", kLs)->Range(8, 32);
BENCHMARK_CAPTURE(BM_Task, closure_iter_gt_inc, "2.6", "iter-gt", kInc)->Range(8, 32);

#include <benchmark/benchmark.h>

#include <random>

#include "gtvm/corpus/corpus.hpp"
#include "gtvm/matcher_inc/rete.hpp"
#include "gtvm/matcher_ls/local_search.hpp"

using namespace gtvm;

namespace {

model::ModelSpace graph(int nodes) { return corpus::random_fixture({nodes, nodes * 2, 17, nodes / 10}); }

void BM_LocalSearchCount(benchmark::State& state, const char* pattern) {
  auto s = graph(static_cast<int>(state.range(0)));
  auto p = corpus::load_programs({"graphPatterns"}, s.types());
  ls::LocalSearchMatcher m(p.library, s);
  for (auto _ : state) benchmark::DoNotOptimize(m.count(pattern));
}

void BM_ReteBuild(benchmark::State& state, const char* pattern) {
  auto s = graph(static_cast<int>(state.range(0)));
  auto p = corpus::load_programs({"graphPatterns"}, s.types());
  for (auto _ : state) {
    rete::ReteNetwork net(p.library, s);
    benchmark::DoNotOptimize(net.count(net.register_pattern(pattern)));
  }
}

// Edge insertions followed by a count: the incremental case.
void BM_ReteUpdate(benchmark::State& state) {
  auto s = graph(static_cast<int>(state.range(0)));
  auto p = corpus::load_programs({"graphPatterns"}, s.types());
  rete::ReteNetwork net(p.library, s);
  auto h = net.register_pattern("graphPatterns.circleOfThreeNode");
  auto nodes = s.elements_of_type(s.types().get("graph1.Node"));
  auto graph_id = s.elements_of_type(s.types().get("graph1.Graph")).at(0);
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    auto e = s.new_entity(s.types().get("graph1.Edge"), graph_id);
    s.new_relation(s.types().get("graph1.Graph.edges"), graph_id, e);
    s.new_relation(s.types().get("graph1.Edge.src"), e, nodes[rng() % nodes.size()]);
    s.new_relation(s.types().get("graph1.Edge.trg"), e, nodes[rng() % nodes.size()]);
    benchmark::DoNotOptimize(net.count(h));
    s.remove(e);
  }
}

void BM_LocalSearchAfterUpdate(benchmark::State& state) {
  auto s = graph(static_cast<int>(state.range(0)));
  auto p = corpus::load_programs({"graphPatterns"}, s.types());
  ls::LocalSearchMatcher m(p.library, s);
  auto nodes = s.elements_of_type(s.types().get("graph1.Node"));
  auto graph_id = s.elements_of_type(s.types().get("graph1.Graph")).at(0);
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    auto e = s.new_entity(s.types().get("graph1.Edge"), graph_id);
    s.new_relation(s.types().get("graph1.Graph.edges"), graph_id, e);
    s.new_relation(s.types().get("graph1.Edge.src"), e, nodes[rng() % nodes.size()]);
    s.new_relation(s.types().get("graph1.Edge.trg"), e, nodes[rng() % nodes.size()]);
    benchmark::DoNotOptimize(m.count("graphPatterns.circleOfThreeNode"));
    s.remove(e);
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_LocalSearchCount, circles, "graphPatterns.circleOfThreeNode")->Range(16, 256);
BENCHMARK_CAPTURE(BM_LocalSearchCount, dangling, "graphPatterns.danglingEdge")->Range(16, 256);
BENCHMARK_CAPTURE(BM_LocalSearchCount, transitive, "graphPatterns.transitiveConnected")->Range(8, 32);
BENCHMARK_CAPTURE(BM_ReteBuild, circles, "graphPatterns.circleOfThreeNode")->Range(16, 256);
BENCHMARK(BM_ReteUpdate)->Range(16, 256);
BENCHMARK(BM_LocalSearchAfterUpdate)->Range(16, 256);

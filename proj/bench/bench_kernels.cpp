// Serial reference vs OpenMP kernels on a large fabric.

#include <benchmark/benchmark.h>

#include <random>

#include "atm/codec.hpp"
#include "atm/evolution.hpp"
#include "atm/orchestrator.hpp"
#include "atm/request.hpp"

namespace {

using namespace atm;

Fabric make_fabric(std::size_t side, std::size_t records) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> kw(0, 63), nt(1, 4), value(0, 1000);
  RecordRegistrar registrar;
  std::vector<Record> out;
  for (std::size_t i = 0; i < records; ++i) {
    RawRecord raw;
    raw.id = "r" + std::to_string(i);
    for (int t = nt(rng); t > 0; --t) raw.tags.push_back("k" + std::to_string(kw(rng)));
    raw.fields.emplace_back("value", std::int64_t{value(rng)});
    out.push_back(registrar.register_record(raw));
  }
  Fabric f = build_fabric(Topology{static_cast<int>(side), static_cast<int>(side)}, 1);
  f.place_records(out, PlacementPolicy::KeywordHash);
  return f;
}

const Fabric& shared_fabric() {
  static const Fabric f = make_fabric(16, 100000);
  return f;
}

Request make_request(const std::string& text) {
  RequestCompiler c;
  return c.compile(parse_program(text).requests.at(0));
}

ExecPolicy policy(const benchmark::State& state) { return state.range(0) ? ExecPolicy::Parallel : ExecPolicy::Serial; }

void BM_CentralEvaluation(benchmark::State& state) {
  const Fabric& f = shared_fabric();
  Request r = make_request("MATCH ANY(k1, k2, k3) WHERE value > 200 APPLY avg(value);");
  for (auto _ : state) benchmark::DoNotOptimize(run_centralized(f, r, policy(state)));
}

void BM_FabricRequest(benchmark::State& state) {
  // A DPU handles each request id once, so every iteration needs a fresh id.
  auto ast = parse_program("MATCH ANY(k1, k2, k3) WHERE value > 200 APPLY avg(value);").requests.at(0);
  RequestCompiler compiler;
  Fabric f = shared_fabric();
  for (auto _ : state) {
    Request r = compiler.compile(ast);
    benchmark::DoNotOptimize(run_request(f, r, RoutingPolicy::FloodSpanningTree, policy(state)));
  }
}

void BM_RelationOracle(benchmark::State& state) {
  const Fabric& f = shared_fabric();
  for (auto _ : state) benchmark::DoNotOptimize(relation_oracle(f, 0.3, policy(state)));
}

void BM_GossipEpochs(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    Fabric f = shared_fabric();
    state.ResumeTiming();
    benchmark::DoNotOptimize(evolve(f, 0.3, 8, policy(state)));
  }
}

BENCHMARK(BM_CentralEvaluation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FabricRequest)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RelationOracle)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GossipEpochs)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

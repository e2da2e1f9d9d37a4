// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails. Every tolerance and workload size is fixed here.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "atm/evolution.hpp"
#include "atm/orchestrator.hpp"
#include "support/fixtures.hpp"
#include "support/programs.hpp"

namespace fs = std::filesystem;
using namespace atm;

namespace {

constexpr std::size_t kOracleTriples = 500;
constexpr std::size_t kMaxRecords = 1000;
constexpr double kRelTol = 1e-9;
constexpr double kOracleBudgetSeconds = 60.0;
constexpr std::size_t kZeroMatchEvery = 10;  // every tenth triple uses an unknown keyword
constexpr std::size_t kSweepRecords = 1000;
constexpr std::size_t kEvolutionFabrics = 100;
constexpr std::size_t kRoundTripPrograms = 1000;
constexpr std::size_t kInvalidPrograms = 100;

/// Tallies checks and remembers the first failure.
struct Verdict {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::string first;

  void expect(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what();
  }
  bool passed() const { return failures == 0 && checks > 0; }
};

int report(int n, const std::string& name, const Verdict& v, const std::string& detail) {
  std::cout << "criterion " << n << " " << (v.passed() ? "PASS" : "FAIL") << " " << name << ": " << detail;
  if (!v.passed()) std::cout << " (" << v.failures << " of " << v.checks << " checks failed; first: " << v.first << ")";
  std::cout << std::endl;
  return v.passed() ? 0 : 1;
}

std::string describe(const Payload& p) { return to_json(p).dump(); }

// Criteria 1, 2, 3 and 9 share one set of randomized triples --------------

struct SharedStats {
  Verdict oracle, conservation, independence, multicast;
  std::size_t zero_match = 0;
  std::size_t stale = 0;
  std::size_t fallbacks = 0;
  std::size_t real_payloads = 0;
  double oracle_seconds = 0.0;
};

/// True when no stored record carries any request keyword, so no digest can
/// satisfy the request in either match mode. (Under ALL, a digest may cover
/// keywords spread over several records, so record-level ALL matching is not
/// the right test.)
bool no_keyword_present(const Fabric& f, const Request& r) {
  for (const auto* rec : f.all_records()) {
    for (const auto& kw : r.keywords) {
      if (rec->keywords.count(kw)) return false;
    }
  }
  return true;
}

SharedStats run_shared_triples() {
  SharedStats s;
  std::mt19937_64 rng(20240601);
  const std::array grids{Topology{4, 4}, Topology{8, 8}, Topology{4, 4, 4}};
  const std::array placements{PlacementPolicy::RoundRobin, PlacementPolicy::KeywordHash, PlacementPolicy::Affinity};
  for (std::size_t t = 0; t < kOracleTriples; ++t) {
    const Topology& grid = grids[rng() % grids.size()];
    const auto placement = placements[rng() % placements.size()];
    const auto extraction = rng() % 4 == 0 ? ExtractionPolicy::TagsPlusTextTokens : ExtractionPolicy::ExplicitTags;
    const std::size_t n = rng() % (kMaxRecords + 1);
    auto raw = testing::random_dataset(rng, n);
    std::string text = testing::random_request_text(rng);
    if (t % kZeroMatchEvery == 0) text = "MATCH ANY(nomatch" + std::to_string(t) + ") APPLY count;";
    Request request = testing::compile_one(text);
    auto records = testing::register_all(raw, extraction);

    // Most records arrive first; relations evolve for a while; a late batch
    // then lands so that cached digests are outdated.
    Fabric fabric = build_fabric(grid, t);
    const std::size_t early = records.size() * 4 / 5;
    fabric.place_records({records.begin(), records.begin() + static_cast<std::ptrdiff_t>(early)}, placement);
    evolve(fabric, 0.2, static_cast<std::uint32_t>(rng() % (grid.diameter() + 1)));
    fabric.place_records({records.begin() + static_cast<std::ptrdiff_t>(early), records.end()}, placement);

    const std::string where = text + " on " + grid.str() + " with " + std::to_string(n) + " records";
    const auto n_dpus = static_cast<std::uint32_t>(grid.size());

    Fabric walk_fabric = fabric, flood_fabric = fabric, multicast_fabric = fabric;
    auto started = std::chrono::steady_clock::now();
    auto baseline = run_centralized(fabric, request);
    auto walk = run_request(walk_fabric, request, RoutingPolicy::SerpentineWalk);
    s.oracle_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    auto flood = run_request(flood_fabric, request, RoutingPolicy::FloodSpanningTree);

    // 1: fabric payload equals the centralized payload.
    if (std::holds_alternative<double>(baseline.result.payload)) ++s.real_payloads;
    s.oracle.expect(payload_equivalent(walk.result.payload, baseline.result.payload, kRelTol), [&] {
      return where + ": fabric " + describe(walk.result.payload) + " vs central " + describe(baseline.result.payload);
    });

    // 2: counters add up to the DPU count; zero-match is fully empty.
    const bool zero = no_keyword_present(fabric, request);
    if (zero) ++s.zero_match;
    for (const auto* out : {&walk, &flood}) {
      const auto& r = out->result;
      s.conservation.expect(r.counters.processing + r.counters.rejection == n_dpus,
                            [&] { return where + ": counters do not add up"; });
      if (zero) {
        s.conservation.expect(r.counters.processing == 0 && r.counters.rejection == n_dpus && r.confirmations == 0 &&
                                  out->confirmations.empty() && r.status == ResultStatus::NoRelevantData,
                              [&] { return where + ": zero-match request produced activity"; });
      }
    }

    // 3: walk and flood agree exactly.
    s.independence.expect(walk.result.counters == flood.result.counters && walk.result.payload == flood.result.payload,
                          [&] { return where + ": walk and flood differ"; });

    // 9: multicast on outdated caches still equals broadcast, and leaves the
    // stores exactly as broadcast does.
    const bool stale = multicast_cache_stale(fabric);
    if (stale) ++s.stale;
    auto mc = run_request(multicast_fabric, request, RoutingPolicy::RelationMulticast);
    if (mc.fallback) ++s.fallbacks;
    s.multicast.expect(payload_equivalent(mc.result.payload, walk.result.payload, 0.0) &&
                           mc.result.counters.processing + mc.result.counters.rejection == mc.packet.visited.size() &&
                           multicast_fabric.dpus() == walk_fabric.dpus(),
                       [&] {
                         return where + ": multicast " + describe(mc.result.payload) + " vs broadcast " +
                                describe(walk.result.payload);
                       });
  }
  s.oracle.expect(s.oracle_seconds < kOracleBudgetSeconds, [&] {
    return "oracle runs took " + std::to_string(s.oracle_seconds) + " s";
  });
  s.conservation.expect(s.zero_match > 0, [] { return "no zero-match request was generated"; });
  s.multicast.expect(s.stale > 0, [] { return "no run had outdated caches"; });
  return s;
}

// 4: fixture D1 ----------------------------------------------------------------

Verdict fixture_regression(std::string& detail) {
  Verdict v;
  Fabric f = testing::d1_fabric();
  RequestCompiler c;
  auto run = [&](const std::string& text) { return run_request(f, testing::compile_one(c, text), RoutingPolicy::SerpentineWalk); };
  auto q1 = run("MATCH ANY(temp) WHERE value > 29 APPLY count;");
  v.expect(q1.result.payload == Payload{std::int64_t{2}} && q1.result.counters == Counters{2, 2},
           [&] { return "Q1 " + describe(q1.result.payload); });
  auto sum = run("MATCH ANY(temp) APPLY sum(value);");
  v.expect(sum.result.payload == Payload{std::int64_t{93}}, [&] { return "sum " + describe(sum.result.payload); });
  auto oslo = run("MATCH ANY(sensor) WHERE city == \"Oslo\" APPLY search;");
  v.expect(oslo.result.payload == Payload{IdList{"r1", "r3", "r8"}}, [&] { return "search " + describe(oslo.result.payload); });
  auto scale = run("MATCH ANY(temp) WHERE value < 30 APPLY scale(value, 2);");
  v.expect(scale.result.payload == Payload{std::int64_t{1}}, [&] { return "scale " + describe(scale.result.payload); });
  auto after = run("MATCH ANY(temp) APPLY sum(value);");
  v.expect(after.result.payload == Payload{std::int64_t{121}}, [&] { return "sum after scale " + describe(after.result.payload); });
  detail = "count 2 (2,2), sum 93, [r1,r3,r8], scale 1, sum 121";
  return v;
}

// 5: selectivity sweep ---------------------------------------------------------

Verdict selectivity_sweep(std::string& detail) {
  Verdict v;
  // Record i carries tag "s<p>" whenever i falls in the first p percent, so
  // each request's match set is nested inside the previous one.
  const std::vector<int> percents{100, 90, 80, 70, 60, 50, 40, 30, 20, 10, 5, 2, 1};
  std::mt19937_64 rng(55);
  auto raw = testing::random_dataset(rng, kSweepRecords);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i].tags.clear();
    for (int p : percents) {
      if (i * 100 < kSweepRecords * static_cast<std::size_t>(p)) raw[i].tags.push_back("s" + std::to_string(p));
    }
    raw[i].tags.push_back("any");
  }
  Fabric fabric = build_fabric(Topology{8, 8}, 5);
  fabric.place_records(testing::register_all(raw), PlacementPolicy::RoundRobin);

  std::ostringstream series;
  for (const char* op : {"search", "count"}) {
    std::optional<std::uint64_t> prev_fabric, first_baseline;
    series << op << ":";
    for (int p : percents) {
      Request r = testing::compile_one("MATCH ANY(s" + std::to_string(p) + ") APPLY " + op + ";");
      Fabric copy = fabric;
      auto fab = run_request(copy, r, RoutingPolicy::SerpentineWalk);
      auto base = run_centralized(fabric, r);
      const auto fb = fab.metrics.payload_bytes, bb = base.metrics.payload_bytes;
      series << " " << p << "%=" << fb;
      if (!first_baseline) first_baseline = bb;
      v.expect(bb == *first_baseline, [&] { return std::string(op) + ": baseline changed at " + std::to_string(p) + "%"; });
      if (prev_fabric) {
        v.expect(fb <= *prev_fabric, [&] { return std::string(op) + ": payload grew at " + std::to_string(p) + "%"; });
      }
      if (p <= 50) {
        v.expect(fb < bb, [&] { return std::string(op) + ": not below baseline at " + std::to_string(p) + "%"; });
      }
      prev_fabric = fb;
    }
    series << "; ";
  }
  series << "baseline=" << run_centralized(fabric, testing::compile_one("MATCH ANY(any) APPLY count;")).metrics.payload_bytes;
  detail = series.str();
  return v;
}

// 6: evolution fixpoint --------------------------------------------------------

Verdict evolution_fixpoint(std::string& detail) {
  Verdict v;
  std::mt19937_64 rng(66);
  const std::vector<Topology> shapes{Topology{2, 2}, Topology{3, 3}, Topology{4, 4}, Topology{2, 7},
                                     Topology{6, 6}, Topology{2, 3, 2}, Topology{3, 3, 3}, Topology{1, 9}};
  std::size_t edges = 0;
  for (std::size_t i = 0; i < kEvolutionFabrics; ++i) {
    const Topology& t = shapes[rng() % shapes.size()];
    testing::WorkloadShape shape;
    shape.vocabulary = 4 + rng() % 30;
    auto raw = testing::random_dataset(rng, t.size() * (1 + rng() % 4), shape);
    Fabric f = build_fabric(t, i);
    f.place_records(testing::register_all(raw), PlacementPolicy::KeywordHash);
    const double theta = 0.05 + 0.9 * static_cast<double>(rng() % 1000) / 1000.0;
    auto result = evolve_until_stable(f, theta);
    auto oracle = relation_oracle(f, theta);
    const std::string where = t.str() + " theta " + std::to_string(theta);
    v.expect(result.last_change_epoch() <= t.diameter(), [&] { return where + ": still changing after the diameter"; });
    v.expect(result.graph.same_edges(oracle), [&] { return where + ": differs from the all-pairs oracle"; });
    for (const auto& e : result.graph.edges) {
      v.expect(e.formed_at_epoch >= t.distance(e.a, e.b), [&] { return where + ": edge formed too early"; });
    }
    edges += result.graph.edges.size();
  }
  detail = std::to_string(kEvolutionFabrics) + " fabrics, " + std::to_string(edges) + " edges";
  return v;
}

// 7: CLI determinism -----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict cli_determinism(std::string& detail) {
  Verdict v;
  fs::path dir = fs::temp_directory_path() / ("atm_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::mt19937_64 rng(77);
  {
    std::ofstream data(dir / "data.jsonl");
    for (const auto& r : testing::random_dataset(rng, 600)) data << dump_raw_record(r) << '\n';
    std::ofstream script(dir / "script.atm");
    for (int i = 0; i < 12; ++i) script << testing::random_request_text(rng) << '\n';
  }
  const std::string d1 = testing::data_path("d1.jsonl"), q1 = testing::data_path("q1.atm");
  const std::vector<std::string> invocations{
      "run --topology 2x2 --placement round-robin --routing walk --dataset " + d1 + " --script " + q1 + " --seed 7",
      "run --topology 4x4x4 --placement affinity --routing flood --dataset data.jsonl --script script.atm --seed 3",
      "run --topology 8x8 --placement keyword-hash --routing multicast --epochs 5 --extraction tags+text "
      "--dataset data.jsonl --script script.atm --seed 11",
  };
  for (const auto& args : invocations) {
    std::string outputs[2][2];
    for (int run = 0; run < 2; ++run) {
      const std::string trace = "t" + std::to_string(run) + ".jsonl", metrics = "m" + std::to_string(run) + ".json";
      std::string cmd = "cd '" + dir.string() + "' && '" + ATM_CLI_PATH + "' " + args + " --trace " + trace +
                        " --metrics " + metrics + " > /dev/null";
      int rc = std::system(cmd.c_str());
      v.expect(rc == 0, [&] { return "exit status " + std::to_string(rc) + " for: " + args; });
      outputs[run][0] = slurp(dir / trace);
      outputs[run][1] = slurp(dir / metrics);
    }
    v.expect(!outputs[0][0].empty() && outputs[0][0] == outputs[1][0], [&] { return "trace differs for: " + args; });
    v.expect(!outputs[0][1].empty() && outputs[0][1] == outputs[1][1], [&] { return "metrics differ for: " + args; });
  }
  fs::remove_all(dir);
  detail = std::to_string(invocations.size()) + " invocations run twice, traces and metrics compared byte for byte";
  return v;
}

// 8: parser round trip ---------------------------------------------------------

Verdict parser_round_trip(std::string& detail) {
  Verdict v;
  testing::ProgramGenerator gen(88);
  std::size_t requests = 0;
  for (std::size_t i = 0; i < kRoundTripPrograms; ++i) {
    auto program = gen.program();
    requests += program.size();
    std::string text = pretty_print(program);
    auto back = parse_program(text);
    bool same = back.ok() && back.requests.size() == program.size();
    for (std::size_t k = 0; same && k < program.size(); ++k) same = structurally_equal(program[k], back.requests[k]);
    v.expect(same, [&] { return "round trip failed for: " + text; });
  }
  for (std::size_t i = 0; i < kInvalidPrograms; ++i) {
    std::vector<RequestAst> one{gen.request()};
    std::string broken = testing::break_program(pretty_print(one), gen.rng());
    auto r = parse_program(broken);
    const auto lines = 1 + static_cast<std::uint32_t>(std::count(broken.begin(), broken.end(), '\n'));
    v.expect(!r.ok() && r.error->line >= 1 && r.error->line <= lines && r.error->column >= 1 &&
                 r.error->column <= broken.size() + 1,
             [&] { return "no positioned error for: " + broken; });
  }
  detail = std::to_string(kRoundTripPrograms) + " programs (" + std::to_string(requests) + " requests) reparsed, " +
           std::to_string(kInvalidPrograms) + " invalid programs rejected with positions";
  return v;
}

}  // namespace

int main() {
  int failed = 0;
  auto shared = run_shared_triples();
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2f s", shared.oracle_seconds);
  failed += report(1, "oracle equivalence", shared.oracle,
                   std::to_string(kOracleTriples) + " triples, " + std::to_string(shared.real_payloads) +
                       " real payloads, fabric+central time " + timing);
  failed += report(2, "counter conservation", shared.conservation,
                   "walk and flood on every triple, " + std::to_string(shared.zero_match) + " zero-match requests");
  failed += report(3, "routing-mode independence", shared.independence, "walk vs flood counters and payloads");

  std::string detail;
  auto v4 = fixture_regression(detail);
  failed += report(4, "fixture regression", v4, detail);
  auto v5 = selectivity_sweep(detail);
  failed += report(5, "data movement", v5, detail);
  auto v6 = evolution_fixpoint(detail);
  failed += report(6, "evolution fixpoint", v6, detail);
  auto v7 = cli_determinism(detail);
  failed += report(7, "determinism", v7, detail);
  auto v8 = parser_round_trip(detail);
  failed += report(8, "parser round trip", v8, detail);

  failed += report(9, "multicast safety", shared.multicast,
                   std::to_string(shared.stale) + " runs on outdated caches, " + std::to_string(shared.fallbacks) +
                       " fallback rebroadcasts");
  return failed == 0 ? 0 : 1;
}

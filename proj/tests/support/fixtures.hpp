#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "atm/codec.hpp"
#include "atm/fabric.hpp"
#include "atm/orchestrator.hpp"
#include "atm/request.hpp"

namespace atm::testing {

inline std::string data_path(const std::string& name) { return std::string(ATM_DATA_DIR) + "/" + name; }

inline std::vector<RawRecord> d1_raw() { return load_dataset(data_path("d1.jsonl")); }

inline std::vector<Record> register_all(const std::vector<RawRecord>& raw,
                                        ExtractionPolicy policy = ExtractionPolicy::ExplicitTags) {
  RecordRegistrar registrar(policy);
  std::vector<Record> out;
  for (const auto& r : raw) out.push_back(registrar.register_record(r));
  return out;
}

/// Fixture D1 on 2x2 with round-robin placement.
inline Fabric d1_fabric(ExtractionPolicy policy = ExtractionPolicy::ExplicitTags,
                        PlacementPolicy placement = PlacementPolicy::RoundRobin) {
  Fabric fabric = build_fabric(Topology{2, 2}, 7);
  fabric.place_records(register_all(d1_raw(), policy), placement);
  return fabric;
}

/// Parses and compiles exactly one request.
inline Request compile_one(RequestCompiler& compiler, const std::string& text) {
  auto parsed = parse_program(text);
  if (!parsed.ok()) throw std::runtime_error("parse error: " + parsed.error->str());
  if (parsed.requests.size() != 1) throw std::runtime_error("expected one request");
  return compiler.compile(parsed.requests.front());
}

inline Request compile_one(const std::string& text) {
  RequestCompiler compiler;
  return compile_one(compiler, text);
}

// Random workload generation -------------------------------------------------

struct WorkloadShape {
  std::size_t vocabulary = 24;
  std::vector<std::string> cities{"oslo", "pune", "kyiv", "lima", "rome"};
};

inline std::string keyword_name(std::size_t i) { return "k" + std::to_string(i); }

/// Records with 1-3 tags drawn from the vocabulary. "value" and "code" are
/// integers, "score" is a real multiple of 0.25 and "city" is text; each
/// field is present with some probability.
inline std::vector<RawRecord> random_dataset(std::mt19937_64& rng, std::size_t n, const WorkloadShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> kw(0, shape.vocabulary - 1);
  std::uniform_int_distribution<int> ntags(1, 3);
  std::uniform_int_distribution<std::int64_t> value(-50, 200);
  std::uniform_int_distribution<int> quarter(-400, 800);
  std::uniform_int_distribution<std::size_t> city(0, shape.cities.size() - 1);
  std::bernoulli_distribution present(0.8);
  std::vector<RawRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RawRecord r;
    char buf[32];
    std::snprintf(buf, sizeof buf, "rec%05zu", i);
    r.id = buf;
    int t = ntags(rng);
    for (int k = 0; k < t; ++k) r.tags.push_back(keyword_name(kw(rng)));
    if (present(rng)) r.fields.emplace_back("value", value(rng));
    if (present(rng)) r.fields.emplace_back("score", quarter(rng) * 0.25);
    if (present(rng)) r.fields.emplace_back("city", shape.cities[city(rng)]);
    if (std::bernoulli_distribution(0.3)(rng)) r.fields.emplace_back("code", value(rng));
    out.push_back(std::move(r));
  }
  return out;
}

/// Source text of a random valid request over the workload vocabulary.
inline std::string random_request_text(std::mt19937_64& rng, const WorkloadShape& shape = {}) {
  std::uniform_int_distribution<std::size_t> kw(0, shape.vocabulary + 1);  // two past the end never match
  std::uniform_int_distribution<int> nkw(1, 3);
  std::uniform_int_distribution<int> nconds(0, 2);
  std::uniform_int_distribution<int> pick(0, 99);
  std::string text = std::string("MATCH ") + (pick(rng) < 70 ? "ANY(" : "ALL(");
  int count = nkw(rng);
  for (int i = 0; i < count; ++i) {
    if (i) text += ", ";
    std::size_t k = kw(rng);
    text += k < shape.vocabulary ? keyword_name(k) : "nomatch" + std::to_string(k);
  }
  text += ")";
  static const char* kCmp[] = {"==", "!=", "<", "<=", ">", ">="};
  int nc = nconds(rng);
  for (int i = 0; i < nc; ++i) {
    text += i ? " AND " : " WHERE ";
    int which = pick(rng) % 4;
    std::string cmp = kCmp[pick(rng) % 6];
    switch (which) {
      case 0: text += "value " + cmp + " " + std::to_string(pick(rng) * 2 - 50); break;
      case 1: text += "score " + cmp + " " + render_literal(FieldValue{(pick(rng) * 8 - 100) * 0.25}); break;
      case 2:
        text += std::string("city ") + (pick(rng) % 2 ? "==" : "!=") + " \"" +
                shape.cities[pick(rng) % shape.cities.size()] + "\"";
        break;
      default: text += "code " + cmp + " " + std::to_string(pick(rng) * 2); break;
    }
  }
  static const char* kFields[] = {"value", "score", "code", "city"};
  const char* field = kFields[pick(rng) % 4];
  switch (pick(rng) % 7) {
    case 0: text += " APPLY search;"; break;
    case 1: text += " APPLY count;"; break;
    case 2: text += std::string(" APPLY sum(") + field + ");"; break;
    case 3: text += std::string(" APPLY min(") + field + ");"; break;
    case 4: text += std::string(" APPLY max(") + field + ");"; break;
    case 5: text += std::string(" APPLY avg(") + field + ");"; break;
    default:
      text += std::string(" APPLY scale(") + field + ", " + (pick(rng) % 2 ? "3" : "0.5") + ");";
      break;
  }
  return text;
}

/// Brute-force oracle: records (by id) that satisfy match mode and conditions.
inline std::vector<const Record*> brute_force_select(const Fabric& fabric, const Request& request) {
  std::vector<const Record*> out;
  for (const auto* r : fabric.all_records()) {
    bool any = false, all = true;
    for (const auto& kw : request.keywords) {
      bool has = r->keywords.count(kw) > 0;
      any = any || has;
      all = all && has;
    }
    if (!(request.mode == MatchMode::Any ? any : all)) continue;
    bool ok = true;
    for (const auto& c : request.conditions) {
      auto it = r->fields.find(c.field);
      if (it == r->fields.end()) {
        ok = false;
        break;
      }
      auto cmp = compare(it->second, c.cmp, c.literal);
      if (!cmp || !*cmp) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(r);
  }
  return out;
}

}  // namespace atm::testing

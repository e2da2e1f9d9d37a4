#include "atm/fabric.hpp"

#include <algorithm>

namespace atm {

void KnowledgeIndex::add(const Record& record) {
  for (const auto& kw : record.keywords) by_keyword_[kw].insert(record.id);
}

KeywordSet KnowledgeIndex::digest() const {
  KeywordSet out;
  for (const auto& [kw, ids] : by_keyword_) out.insert(out.end(), kw);
  return out;
}

const std::set<std::string>* KnowledgeIndex::records_for(const std::string& keyword) const {
  auto it = by_keyword_.find(keyword);
  return it == by_keyword_.end() ? nullptr : &it->second;
}

KnowledgeIndex KnowledgeIndex::rebuild(const std::map<std::string, Record>& store) {
  KnowledgeIndex index;
  for (const auto& [id, record] : store) index.add(record);
  return index;
}

std::string_view to_string(FsmState state) {
  switch (state) {
    case FsmState::Idle: return "Idle";
    case FsmState::Matching: return "Matching";
    case FsmState::PreparingView: return "PreparingView";
    case FsmState::Executing: return "Executing";
    case FsmState::Reporting: return "Reporting";
  }
  return "?";
}

void DpuState::put(Record record) {
  bool grows = false;
  for (const auto& kw : record.keywords) grows = grows || !index.contains(kw);
  index.add(record);
  if (grows) ++digest_version;
  std::string id = record.id;
  store.insert_or_assign(std::move(id), std::move(record));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

bool RelationGraph::same_edges(const RelationGraph& other) const {
  if (edges.size() != other.edges.size()) return false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& x = edges[i];
    const auto& y = other.edges[i];
    if (x.a != y.a || x.b != y.b || x.weight != y.weight) return false;
  }
  return true;
}

const RelationEdge* RelationGraph::find(const DpuId& a, const DpuId& b) const {
  const DpuId& lo = std::min(a, b);
  const DpuId& hi = std::max(a, b);
  for (const auto& e : edges) {
    if (e.a == lo && e.b == hi) return &e;
  }
  return nullptr;
}

Fabric::Fabric(Topology topology, std::uint64_t seed)
    : topology_(std::move(topology)), seed_(seed), initiator_(topology_.origin()) {
  dpus_.reserve(topology_.size());
  for (const auto& id : topology_.all()) {
    DpuState state;
    state.id = id;
    dpus_.push_back(std::move(state));
  }
}

Fabric build_fabric(const Topology& topology, std::uint64_t seed) { return Fabric(topology, seed); }

DpuState& Fabric::dpu(const DpuId& id) { return dpus_[topology_.index_of(id)]; }
const DpuState& Fabric::dpu(const DpuId& id) const { return dpus_[topology_.index_of(id)]; }

std::size_t Fabric::record_count() const {
  std::size_t n = 0;
  for (const auto& d : dpus_) n += d.store.size();
  return n;
}

std::vector<const Record*> Fabric::all_records() const {
  std::vector<const Record*> out;
  out.reserve(record_count());
  for (const auto& d : dpus_) {
    for (const auto& [id, record] : d.store) out.push_back(&record);
  }
  std::sort(out.begin(), out.end(), [](const Record* a, const Record* b) { return a->id < b->id; });
  return out;
}

Assignment Fabric::place_records(const std::vector<Record>& records, const PlacementOptions& options) {
  const std::size_t total = record_count() + records.size();
  const std::size_t count = dpus_.size();
  std::size_t capacity = options.capacity.value_or((2 * total + count - 1) / count);
  if (options.policy == PlacementPolicy::Affinity && total > capacity * count) {
    throw PlacementError("capacity exceeded: " + std::to_string(total) + " records, " +
                         std::to_string(capacity * count) + " slots");
  }
  Assignment assignment;
  for (const auto& record : records) {
    if (assignment.contains(record.id)) throw PlacementError("duplicate record id '" + record.id + "'");
    DpuId target = place_one(record, options, capacity);
    assignment.emplace(record.id, target);
    dpu(target).put(record);
  }
  ++ingest_generation_;
  epochs_since_ingest_ = 0;
  return assignment;
}

DpuId Fabric::place_one(const Record& record, const PlacementOptions& options, std::size_t capacity) {
  const std::size_t count = dpus_.size();
  switch (options.policy) {
    case PlacementPolicy::RoundRobin: {
      DpuId id = topology_.at(round_robin_cursor_);
      round_robin_cursor_ = (round_robin_cursor_ + 1) % count;
      return id;
    }
    case PlacementPolicy::KeywordHash: {
      const std::string& smallest = *record.keywords.begin();
      return topology_.at(fnv1a64(smallest) % count);
    }
    case PlacementPolicy::Affinity: {
      std::optional<std::size_t> best;
      std::size_t best_shared = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const auto& d = dpus_[i];
        if (d.store.size() >= capacity) continue;
        std::size_t shared = 0;
        for (const auto& kw : record.keywords) shared += d.index.contains(kw) ? 1 : 0;
        if (shared > best_shared) {
          best = i;
          best_shared = shared;
        }
      }
      if (best) return topology_.at(*best);
      for (std::size_t step = 0; step < count; ++step) {
        std::size_t i = (round_robin_cursor_ + step) % count;
        if (dpus_[i].store.size() < capacity) {
          round_robin_cursor_ = (i + 1) % count;
          return topology_.at(i);
        }
      }
      throw PlacementError("capacity exceeded: no DPU can take record '" + record.id + "'");
    }
  }
  throw PlacementError("unknown placement policy");
}

std::string_view to_string(PlacementPolicy policy) {
  switch (policy) {
    case PlacementPolicy::RoundRobin: return "round-robin";
    case PlacementPolicy::KeywordHash: return "keyword-hash";
    case PlacementPolicy::Affinity: return "affinity";
  }
  return "?";
}

std::optional<PlacementPolicy> parse_placement(std::string_view text) {
  if (text == "round-robin") return PlacementPolicy::RoundRobin;
  if (text == "keyword-hash") return PlacementPolicy::KeywordHash;
  if (text == "affinity") return PlacementPolicy::Affinity;
  return std::nullopt;
}

}  // namespace atm

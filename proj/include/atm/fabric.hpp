#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "atm/record.hpp"
#include "atm/topology.hpp"

namespace atm {

class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-DPU keyword -> local record ids.
class KnowledgeIndex {
 public:
  void add(const Record& record);
  void clear() { by_keyword_.clear(); }

  KeywordSet digest() const;
  const std::set<std::string>* records_for(const std::string& keyword) const;
  bool contains(const std::string& keyword) const { return by_keyword_.contains(keyword); }
  std::size_t keyword_count() const { return by_keyword_.size(); }

  static KnowledgeIndex rebuild(const std::map<std::string, Record>& store);

  bool operator==(const KnowledgeIndex&) const = default;

 private:
  std::map<std::string, std::set<std::string>> by_keyword_;
};

enum class FsmState { Idle, Matching, PreparingView, Executing, Reporting };

std::string_view to_string(FsmState state);

/// A peer digest learned through gossip, tagged with the peer's digest version.
struct GossipEntry {
  KeywordSet digest;
  std::uint64_t version = 0;

  bool operator==(const GossipEntry&) const = default;
};

struct DpuState {
  DpuId id;
  std::map<std::string, Record> store;
  KnowledgeIndex index;
  FsmState fsm = FsmState::Idle;
  std::optional<std::uint64_t> accepted_request;
  std::set<std::uint64_t> handled_requests;
  /// Incremented whenever the digest grows.
  std::uint64_t digest_version = 0;
  std::map<DpuId, double> relations;
  std::map<DpuId, GossipEntry> gossip;

  KeywordSet digest() const { return index.digest(); }

  /// Stores a record locally and updates the index. Touches nothing else.
  void put(Record record);

  bool operator==(const DpuState&) const = default;
};

enum class PlacementPolicy { RoundRobin, KeywordHash, Affinity };

struct PlacementOptions {
  PlacementPolicy policy = PlacementPolicy::RoundRobin;
  /// Affinity only; defaults to ceil(2 * total records / dpu count).
  std::optional<std::size_t> capacity;
};

using Assignment = std::map<std::string, DpuId>;

std::uint64_t fnv1a64(std::string_view bytes);

struct RelationEdge {
  DpuId a;  // a < b
  DpuId b;
  double weight = 0.0;
  std::uint32_t formed_at_epoch = 0;
};

struct RelationGraph {
  std::vector<RelationEdge> edges;  // sorted by (a, b)

  /// Same edges and weights; formation epochs are not compared.
  bool same_edges(const RelationGraph& other) const;
  const RelationEdge* find(const DpuId& a, const DpuId& b) const;
};

/// The persistent processing space: a mesh of DPUs with one initiator port.
class Fabric {
 public:
  Fabric(Topology topology, std::uint64_t seed);

  const Topology& topology() const { return topology_; }
  std::uint64_t seed() const { return seed_; }
  const DpuId& initiator() const { return initiator_; }

  std::size_t size() const { return dpus_.size(); }
  DpuState& dpu(const DpuId& id);
  const DpuState& dpu(const DpuId& id) const;
  std::vector<DpuState>& dpus() { return dpus_; }
  const std::vector<DpuState>& dpus() const { return dpus_; }

  std::size_t record_count() const;
  /// Every record in the fabric, ordered by id.
  std::vector<const Record*> all_records() const;

  /// Ingest through the initiator port.
  Assignment place_records(const std::vector<Record>& records, const PlacementOptions& options);
  Assignment place_records(const std::vector<Record>& records, PlacementPolicy policy) {
    return place_records(records, PlacementOptions{policy, std::nullopt});
  }

  KeywordSet knowledge_digest(const DpuId& id) const { return dpu(id).digest(); }

  // Initiator-side bookkeeping; no per-DPU metadata lives here.
  std::uint64_t ingest_generation() const { return ingest_generation_; }
  std::uint32_t epochs_run() const { return epochs_run_; }
  std::uint32_t epochs_since_ingest() const { return epochs_since_ingest_; }
  void note_epoch() {
    ++epochs_run_;
    ++epochs_since_ingest_;
  }

  RelationGraph& relations() { return relations_; }
  const RelationGraph& relations() const { return relations_; }

 private:
  DpuId place_one(const Record& record, const PlacementOptions& options, std::size_t capacity);

  Topology topology_;
  std::uint64_t seed_;
  DpuId initiator_;
  std::vector<DpuState> dpus_;
  std::size_t round_robin_cursor_ = 0;
  std::uint64_t ingest_generation_ = 0;
  std::uint32_t epochs_run_ = 0;
  std::uint32_t epochs_since_ingest_ = 0;
  RelationGraph relations_;
};

Fabric build_fabric(const Topology& topology, std::uint64_t seed);

std::string_view to_string(PlacementPolicy policy);
std::optional<PlacementPolicy> parse_placement(std::string_view text);

}  // namespace atm

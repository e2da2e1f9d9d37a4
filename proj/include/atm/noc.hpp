#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atm/topology.hpp"

namespace atm {

class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RoutingPolicy { SerpentineWalk, FloodSpanningTree, RelationMulticast };

std::string_view to_string(RoutingPolicy policy);
std::optional<RoutingPolicy> parse_routing(std::string_view text);

/// Mesh neighbours at Manhattan distance 1, sorted by coordinate tuple.
std::vector<DpuId> neighbors(const Topology& topology, const DpuId& dpu);

/// Boustrophedon walk starting at the origin. 3D walks snake plane by plane,
/// reversing every other plane so consecutive DPUs stay adjacent.
std::vector<DpuId> plan_walk(const Topology& topology);

/// BFS tree: child -> parent. Children are discovered in sorted neighbour order.
struct SpanningTree {
  DpuId root;
  std::map<DpuId, DpuId> parent;
  std::map<DpuId, std::vector<DpuId>> children;
  std::vector<DpuId> bfs_order;

  std::size_t edge_count() const { return parent.size(); }
};

SpanningTree spanning_tree(const Topology& topology, const DpuId& root);

/// Dimension-ordered path from `from` to `to`, inclusive of both ends.
/// Empty when from == to.
std::vector<DpuId> route_back(const Topology& topology, const DpuId& from, const DpuId& to);

struct RequestPacket {
  std::uint64_t request_id = 0;
  std::uint32_t processing_count = 0;
  std::uint32_t rejection_count = 0;
  std::uint32_t hop_count = 0;
  std::vector<DpuId> visited;
};

struct ConfirmationPacket {
  std::uint64_t request_id = 0;
  DpuId dpu_id;
  std::uint64_t forecast_ticks = 0;
  std::uint64_t matched_estimate = 0;
};

enum class EventKind { Inject, Hop, Deliver, Confirm, Result, Eject };

std::string_view to_string(EventKind kind);

/// nullopt is the initiator.
using Endpoint = std::optional<DpuId>;

struct TraceEvent {
  std::uint64_t tick = 0;
  EventKind kind = EventKind::Hop;
  Endpoint from;
  Endpoint to;
  std::uint64_t request = 0;
  std::uint64_t bytes = 0;
  std::uint64_t seq = 0;  // emission order, final tie-break only

  bool is_link() const { return kind != EventKind::Deliver; }
};

/// Orders events by (tick, source, kind), then destination and emission order.
void sort_trace(std::vector<TraceEvent>& events, const Topology& topology);

/// Byte sizes of protocol packets.
namespace wire {
inline constexpr std::uint64_t kHeaderBytes = 16;
inline constexpr std::uint64_t kConfirmationBytes = 32;
inline constexpr std::uint64_t kCounterReportBytes = 16;
}  // namespace wire

}  // namespace atm

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atm/dpu.hpp"
#include "atm/exec.hpp"
#include "atm/fabric.hpp"
#include "atm/noc.hpp"
#include "atm/request.hpp"

namespace atm {

enum class ResultStatus { Ok, NoRelevantData };

std::string_view to_string(ResultStatus status);

struct Counters {
  std::uint32_t processing = 0;
  std::uint32_t rejection = 0;

  bool operator==(const Counters&) const = default;
};

struct FinalResult {
  std::uint64_t request_id = 0;
  ResultStatus status = ResultStatus::NoRelevantData;
  Payload payload;
  Counters counters;
  std::uint32_t confirmations = 0;
};

struct Metrics {
  std::uint64_t payload_bytes = 0;
  std::uint64_t byte_hops = 0;
  std::uint64_t hops = 0;
  std::uint64_t packets = 0;
  std::uint64_t completion_tick = 0;

  bool operator==(const Metrics&) const = default;
};

/// Per delivered DPU: when the packet arrived and how long it worked.
struct DeliveryRecord {
  DpuId dpu;
  std::uint64_t arrival_tick = 0;
  bool accepted = false;
  std::uint64_t busy_ticks = 0;
  std::uint64_t forecast_ticks = 0;
};

struct RunOutcome {
  FinalResult result;
  Metrics metrics;
  std::vector<TraceEvent> trace;
  RequestPacket packet;
  std::vector<ConfirmationPacket> confirmations;
  std::vector<PartialResult> partials;  // row-major DPU order
  std::vector<FsmTransition> fsm_log;
  std::vector<DeliveryRecord> deliveries;
  std::uint64_t skipped_records = 0;
  RoutingPolicy routing = RoutingPolicy::SerpentineWalk;
  // Multicast only.
  std::size_t multicast_targets = 0;
  bool cache_stale = false;
  bool fallback = false;
};

/// Scatter/gather at the initiator. Partials are merged in row-major DPU order.
Payload aggregate(BlockKind block, const std::vector<PartialResult>& partials);

/// Full request lifecycle on the fabric. Scale mutations are committed.
/// Throws ProtocolViolation on double delivery or an illegal FSM edge.
RunOutcome run_request(Fabric& fabric, const Request& request, RoutingPolicy routing,
                       ExecPolicy exec = ExecPolicy::Parallel,
                       const BlockRegistry& registry = BlockRegistry::standard());

/// DPUs the relation-multicast round would address, given the gossip memory
/// of the initiator-attached DPU. Unknown DPUs are always included.
std::vector<DpuId> multicast_targets(const Fabric& fabric, const Request& request);

/// True when the initiator-attached DPU may hold outdated peer digests.
bool multicast_cache_stale(const Fabric& fabric);

struct BaselineOutcome {
  FinalResult result;
  Metrics metrics;
};

/// CPU-centric execution: every record travels to a central core at the
/// initiator port, which then evaluates the request. Does not mutate.
BaselineOutcome run_centralized(const Fabric& fabric, const Request& request,
                                ExecPolicy exec = ExecPolicy::Parallel);

struct Ratio {
  std::optional<double> value;  // nullopt = not applicable
};

struct Comparison {
  Metrics fabric;
  Metrics baseline;
  Ratio payload_bytes;
  Ratio byte_hops;
  Ratio hops;
  Ratio packets;
  Ratio completion_tick;
};

Comparison compare(const Metrics& fabric_metrics, const Metrics& baseline_metrics);

/// Bytes of a request packet on the wire.
std::uint64_t request_packet_bytes(const Request& request);

/// Payload equality: exact for ids/integers, relative tolerance for reals.
bool payload_equivalent(const Payload& a, const Payload& b, double rel_tol = 1e-9);

}  // namespace atm

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "atm/blocks.hpp"
#include "atm/fabric.hpp"
#include "atm/noc.hpp"
#include "atm/request.hpp"

namespace atm {

enum class DecisionReason { KeywordMatch, NoRelevantKeyword };

struct Decision {
  bool accept = false;
  DecisionReason reason = DecisionReason::NoRelevantKeyword;

  bool operator==(const Decision&) const = default;
};

/// Accept/reject from the DPU's own digest. Conditions are not consulted.
Decision decide(const DpuState& dpu, const Request& request);
Decision decide(const KeywordSet& digest, const Request& request);

struct View {
  std::vector<std::string> ids;  // sorted
  std::size_t candidate_count = 0;
};

/// Local records that satisfy the match mode and every condition. Missing
/// fields and kind mismatches exclude a record.
View prepare_view(const DpuState& dpu, const Request& request);

/// Ids of local records satisfying the match mode only.
std::vector<std::string> candidates(const DpuState& dpu, const Request& request);

bool record_matches(const Record& record, const Request& request);
bool conditions_hold(const Record& record, const Request& request);

struct EmptyPayload {
  bool operator==(const EmptyPayload&) const = default;
};

struct SumCount {
  double sum = 0.0;
  std::uint64_t count = 0;

  bool operator==(const SumCount&) const = default;
};

using IdList = std::vector<std::string>;

/// Partial and final result payloads.
using Payload = std::variant<EmptyPayload, IdList, std::int64_t, double, SumCount>;

std::string_view payload_kind(const Payload& payload);
std::uint64_t payload_bytes(const Payload& payload);

struct PartialResult {
  std::uint64_t request_id = 0;
  DpuId dpu_id;
  Payload payload;
  std::uint64_t skipped = 0;  // view records without a usable field value

  std::uint64_t wire_bytes() const { return wire::kHeaderBytes + payload_bytes(payload); }
};

const FunctionalBlock& select_block(const Request& request, const BlockRegistry& registry);

/// Applies a block to a prepared view. Only scale mutates the store.
PartialResult execute_block(DpuState& dpu, const FunctionalBlock& block, const View& view,
                            const Request& request);

/// One tick per candidate record plus two ticks of fixed overhead.
std::uint64_t forecast(std::size_t candidate_count);
std::uint64_t forecast(const DpuState& dpu, const Request& request);

struct FsmTransition {
  std::uint64_t request_id = 0;
  DpuId dpu;
  FsmState from = FsmState::Idle;
  FsmState to = FsmState::Idle;
};

bool transition_allowed(FsmState from, FsmState to);

/// Moves the automaton; throws ProtocolViolation on an illegal edge.
void transition(DpuState& dpu, FsmState to, std::uint64_t request_id, std::vector<FsmTransition>* log);

/// Idle -> Matching -> (Idle | PreparingView). Throws on double delivery.
Decision begin_request(DpuState& dpu, const Request& request, std::vector<FsmTransition>* log);

/// Counter update for one decision. Throws if the DPU was already visited.
std::optional<ConfirmationPacket> apply_decision(RequestPacket& packet, const DpuId& dpu,
                                                 const Decision& decision, std::size_t candidate_count);

std::optional<ConfirmationPacket> on_request_packet(DpuState& dpu, RequestPacket& packet,
                                                    const Request& request,
                                                    std::vector<FsmTransition>* log = nullptr);

struct LocalWork {
  View view;
  PartialResult partial;
  std::uint64_t busy_ticks = 0;  // decision + execution + reporting
};

/// PreparingView -> Executing -> Reporting -> Idle for an accepted request.
LocalWork complete_request(DpuState& dpu, const Request& request, const BlockRegistry& registry,
                           std::vector<FsmTransition>* log);

}  // namespace atm

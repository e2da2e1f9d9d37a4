#include "atm/dpu.hpp"

#include <algorithm>
#include <limits>

namespace atm {

Decision decide(const KeywordSet& digest, const Request& request) {
  bool accept = false;
  if (request.mode == MatchMode::Any) {
    accept = std::any_of(request.keywords.begin(), request.keywords.end(),
                         [&](const std::string& kw) { return digest.contains(kw); });
  } else {
    accept = std::all_of(request.keywords.begin(), request.keywords.end(),
                         [&](const std::string& kw) { return digest.contains(kw); });
  }
  return {accept, accept ? DecisionReason::KeywordMatch : DecisionReason::NoRelevantKeyword};
}

Decision decide(const DpuState& dpu, const Request& request) {
  bool accept = false;
  const auto has = [&](const std::string& kw) { return dpu.index.contains(kw); };
  if (request.mode == MatchMode::Any) {
    accept = std::any_of(request.keywords.begin(), request.keywords.end(), has);
  } else {
    accept = std::all_of(request.keywords.begin(), request.keywords.end(), has);
  }
  return {accept, accept ? DecisionReason::KeywordMatch : DecisionReason::NoRelevantKeyword};
}

bool record_matches(const Record& record, const Request& request) {
  const auto has = [&](const std::string& kw) { return record.keywords.contains(kw); };
  if (request.mode == MatchMode::Any) {
    return std::any_of(request.keywords.begin(), request.keywords.end(), has);
  }
  return std::all_of(request.keywords.begin(), request.keywords.end(), has);
}

bool conditions_hold(const Record& record, const Request& request) {
  for (const auto& c : request.conditions) {
    auto it = record.fields.find(c.field);
    if (it == record.fields.end()) return false;
    auto holds = compare(it->second, c.cmp, c.literal);
    if (!holds || !*holds) return false;
  }
  return true;
}

std::vector<std::string> candidates(const DpuState& dpu, const Request& request) {
  std::set<std::string> ids;
  if (request.mode == MatchMode::Any) {
    for (const auto& kw : request.keywords) {
      if (const auto* hit = dpu.index.records_for(kw)) ids.insert(hit->begin(), hit->end());
    }
  } else {
    bool first = true;
    for (const auto& kw : request.keywords) {
      const auto* hit = dpu.index.records_for(kw);
      if (!hit) return {};
      if (first) {
        ids = *hit;
        first = false;
      } else {
        std::set<std::string> both;
        std::set_intersection(ids.begin(), ids.end(), hit->begin(), hit->end(),
                              std::inserter(both, both.end()));
        ids = std::move(both);
      }
    }
  }
  return {ids.begin(), ids.end()};
}

View prepare_view(const DpuState& dpu, const Request& request) {
  View view;
  auto ids = candidates(dpu, request);
  view.candidate_count = ids.size();
  for (auto& id : ids) {
    if (conditions_hold(dpu.store.at(id), request)) view.ids.push_back(std::move(id));
  }
  return view;
}

std::string_view payload_kind(const Payload& payload) {
  switch (payload.index()) {
    case 0: return "empty";
    case 1: return "ids";
    case 2: return "int";
    case 3: return "real";
    case 4: return "sumcount";
  }
  return "?";
}

std::uint64_t payload_bytes(const Payload& payload) {
  switch (payload.index()) {
    case 0: return 0;
    case 1: {
      std::uint64_t n = 0;
      for (const auto& id : std::get<IdList>(payload)) n += id.size() + 1;
      return n;
    }
    case 2:
    case 3: return 8;
    case 4: return 16;
  }
  return 0;
}

const FunctionalBlock& select_block(const Request& request, const BlockRegistry& registry) {
  return registry.get(request.block);
}

namespace {

Payload fold_extreme(const std::vector<const FieldValue*>& values, bool want_min) {
  if (values.empty()) return EmptyPayload{};
  bool all_integer = std::all_of(values.begin(), values.end(),
                                 [](const FieldValue* v) { return kind_of(*v) == ValueKind::Integer; });
  if (all_integer) {
    std::int64_t best = std::get<std::int64_t>(*values.front());
    for (const auto* v : values) {
      auto x = std::get<std::int64_t>(*v);
      best = want_min ? std::min(best, x) : std::max(best, x);
    }
    return best;
  }
  double best = *as_real(*values.front());
  for (const auto* v : values) {
    double x = *as_real(*v);
    best = want_min ? std::min(best, x) : std::max(best, x);
  }
  return best;
}

}  // namespace

PartialResult execute_block(DpuState& dpu, const FunctionalBlock& block, const View& view,
                            const Request& request) {
  PartialResult result;
  result.request_id = request.id;
  result.dpu_id = dpu.id;

  switch (block.kind) {
    case BlockKind::Search:
      result.payload = IdList(view.ids);
      return result;
    case BlockKind::Count:
      result.payload = static_cast<std::int64_t>(view.ids.size());
      return result;
    case BlockKind::Scale: {
      const std::string& field = *request.field();
      const FieldValue& factor = *request.factor();
      std::int64_t updated = 0;
      for (const auto& id : view.ids) {
        auto& fields = dpu.store.at(id).fields;
        auto it = fields.find(field);
        if (it == fields.end() || !is_numeric(it->second)) {
          ++result.skipped;
          continue;
        }
        if (kind_of(it->second) == ValueKind::Integer && kind_of(factor) == ValueKind::Integer) {
          auto product = checked_mul(std::get<std::int64_t>(it->second), std::get<std::int64_t>(factor));
          if (!product) {
            ++result.skipped;  // would leave the 64-bit range; value kept
            continue;
          }
          it->second = *product;
        } else {
          it->second = *as_real(it->second) * *as_real(factor);
        }
        ++updated;
      }
      result.payload = updated;
      return result;
    }
    default: break;
  }

  const std::string& field = *request.field();
  std::vector<const FieldValue*> values;
  values.reserve(view.ids.size());
  for (const auto& id : view.ids) {
    const auto& fields = dpu.store.at(id).fields;
    auto it = fields.find(field);
    if (it == fields.end() || !is_numeric(it->second)) {
      ++result.skipped;
      continue;
    }
    values.push_back(&it->second);
  }

  switch (block.kind) {
    case BlockKind::Sum: {
      bool all_integer = std::all_of(values.begin(), values.end(),
                                     [](const FieldValue* v) { return kind_of(*v) == ValueKind::Integer; });
      if (all_integer) {
        IntegerSum acc;
        for (const auto* v : values) acc.add(std::get<std::int64_t>(*v));
        if (auto exact = acc.exact()) {
          result.payload = *exact;
        } else {
          result.payload = acc.approx();
        }
      } else {
        double acc = 0.0;
        for (const auto* v : values) acc += *as_real(*v);
        result.payload = acc;
      }
      break;
    }
    case BlockKind::Min: result.payload = fold_extreme(values, true); break;
    case BlockKind::Max: result.payload = fold_extreme(values, false); break;
    case BlockKind::Avg: {
      SumCount sc;
      for (const auto* v : values) sc.sum += *as_real(*v);
      sc.count = values.size();
      result.payload = sc;
      break;
    }
    default: break;
  }
  return result;
}

std::uint64_t forecast(std::size_t candidate_count) { return candidate_count + 2; }

std::uint64_t forecast(const DpuState& dpu, const Request& request) {
  return forecast(candidates(dpu, request).size());
}

bool transition_allowed(FsmState from, FsmState to) {
  switch (from) {
    case FsmState::Idle: return to == FsmState::Matching;
    case FsmState::Matching: return to == FsmState::Idle || to == FsmState::PreparingView;
    case FsmState::PreparingView: return to == FsmState::Executing;
    case FsmState::Executing: return to == FsmState::Reporting;
    case FsmState::Reporting: return to == FsmState::Idle;
  }
  return false;
}

void transition(DpuState& dpu, FsmState to, std::uint64_t request_id, std::vector<FsmTransition>* log) {
  if (!transition_allowed(dpu.fsm, to)) {
    throw ProtocolViolation("illegal transition " + std::string(to_string(dpu.fsm)) + " -> " +
                            std::string(to_string(to)) + " at DPU " + dpu.id.str());
  }
  if (to == FsmState::Executing && dpu.accepted_request != request_id) {
    throw ProtocolViolation("DPU " + dpu.id.str() + " executing request " + std::to_string(request_id) +
                            " without accepting it");
  }
  if (log) log->push_back({request_id, dpu.id, dpu.fsm, to});
  dpu.fsm = to;
}

Decision begin_request(DpuState& dpu, const Request& request, std::vector<FsmTransition>* log) {
  if (dpu.handled_requests.contains(request.id)) {
    throw ProtocolViolation("double delivery of request " + std::to_string(request.id) + " to DPU " +
                            dpu.id.str());
  }
  if (dpu.fsm != FsmState::Idle) {
    throw ProtocolViolation("DPU " + dpu.id.str() + " busy in state " + std::string(to_string(dpu.fsm)));
  }
  transition(dpu, FsmState::Matching, request.id, log);
  dpu.handled_requests.insert(request.id);
  Decision decision = decide(dpu, request);
  if (decision.accept) {
    dpu.accepted_request = request.id;
    transition(dpu, FsmState::PreparingView, request.id, log);
  } else {
    transition(dpu, FsmState::Idle, request.id, log);
  }
  return decision;
}

std::optional<ConfirmationPacket> apply_decision(RequestPacket& packet, const DpuId& dpu,
                                                 const Decision& decision, std::size_t candidate_count) {
  if (std::find(packet.visited.begin(), packet.visited.end(), dpu) != packet.visited.end()) {
    throw ProtocolViolation("double delivery of request " + std::to_string(packet.request_id) +
                            " to DPU " + dpu.str());
  }
  packet.visited.push_back(dpu);
  if (!decision.accept) {
    ++packet.rejection_count;
    return std::nullopt;
  }
  ++packet.processing_count;
  return ConfirmationPacket{packet.request_id, dpu, forecast(candidate_count), candidate_count};
}

std::optional<ConfirmationPacket> on_request_packet(DpuState& dpu, RequestPacket& packet,
                                                    const Request& request, std::vector<FsmTransition>* log) {
  if (std::find(packet.visited.begin(), packet.visited.end(), dpu.id) != packet.visited.end()) {
    throw ProtocolViolation("double delivery of request " + std::to_string(packet.request_id) +
                            " to DPU " + dpu.id.str());
  }
  Decision decision = begin_request(dpu, request, log);
  std::size_t candidate_count = decision.accept ? candidates(dpu, request).size() : 0;
  return apply_decision(packet, dpu.id, decision, candidate_count);
}

LocalWork complete_request(DpuState& dpu, const Request& request, const BlockRegistry& registry,
                           std::vector<FsmTransition>* log) {
  if (dpu.fsm != FsmState::PreparingView || dpu.accepted_request != request.id) {
    throw ProtocolViolation("DPU " + dpu.id.str() + " has not accepted request " + std::to_string(request.id));
  }
  LocalWork work;
  work.view = prepare_view(dpu, request);
  transition(dpu, FsmState::Executing, request.id, log);
  work.partial = execute_block(dpu, select_block(request, registry), work.view, request);
  transition(dpu, FsmState::Reporting, request.id, log);
  transition(dpu, FsmState::Idle, request.id, log);
  dpu.accepted_request.reset();
  work.busy_ticks = 1 + work.view.ids.size() + 1;
  return work;
}

}  // namespace atm

#include "atm/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <set>

namespace atm {

std::string_view to_string(ResultStatus status) {
  return status == ResultStatus::Ok ? "ok" : "no-relevant-data";
}

std::uint64_t request_packet_bytes(const Request& request) {
  return wire::kHeaderBytes + request.source_text.size();
}

namespace {

/// Emits tick-stamped link events for one request.
class EventLog {
 public:
  EventLog(const Topology& topology, std::uint64_t request_id) : topology_(topology), request_(request_id) {}

  void emit(std::uint64_t tick, EventKind kind, Endpoint from, Endpoint to, std::uint64_t bytes) {
    events_.push_back({tick, kind, std::move(from), std::move(to), request_, bytes, seq_++});
    if (kind != EventKind::Deliver && !to) initiator_arrivals_ = std::max(initiator_arrivals_, tick + 1);
  }

  /// Moves along `path` one link per tick; returns the arrival tick.
  std::uint64_t travel(const std::vector<DpuId>& path, std::uint64_t tick, EventKind kind, std::uint64_t bytes) {
    for (std::size_t i = 1; i < path.size(); ++i) emit(tick++, kind, path[i - 1], path[i], bytes);
    return tick;
  }

  /// From a DPU back to the initiator: dimension-ordered path, then eject.
  std::uint64_t to_initiator(const DpuId& from, const DpuId& root, std::uint64_t tick, EventKind kind,
                             std::uint64_t bytes) {
    tick = travel(route_back(topology_, from, root), tick, kind, bytes);
    emit(tick, kind, root, std::nullopt, bytes);
    return tick + 1;
  }

  std::vector<TraceEvent>& events() { return events_; }
  std::uint64_t last_initiator_arrival() const { return initiator_arrivals_; }

 private:
  const Topology& topology_;
  std::uint64_t request_;
  std::uint64_t seq_ = 0;
  std::uint64_t initiator_arrivals_ = 0;
  std::vector<TraceEvent> events_;
};

struct PlannedDelivery {
  DpuId dpu;
  std::uint64_t arrival = 0;
};

struct RoundPlan {
  std::vector<PlannedDelivery> deliveries;  // processing order
  std::uint64_t home_tick = 0;              // request packet back at the initiator
  std::uint64_t packets = 0;
  std::uint32_t hops = 0;
  // Flood only: convergecast structure for counter merging.
  std::optional<SpanningTree> tree;
};

// Unicast walk through `stops` (in order), delivering at each stop.
RoundPlan plan_walk_round(EventLog& log, const Topology& topo, const DpuId& root,
                          const std::vector<DpuId>& stops, std::uint64_t t0, std::uint64_t bytes) {
  RoundPlan plan;
  plan.packets = 1;
  log.emit(t0, EventKind::Inject, std::nullopt, root, bytes);
  ++plan.hops;
  std::uint64_t t = t0 + 1;
  DpuId cur = root;
  for (const auto& stop : stops) {
    auto path = route_back(topo, cur, stop);
    t = log.travel(path, t, EventKind::Hop, bytes);
    plan.hops += path.empty() ? 0 : static_cast<std::uint32_t>(path.size() - 1);
    log.emit(t, EventKind::Deliver, stop, stop, bytes);
    plan.deliveries.push_back({stop, t});
    t += 1;  // decision
    cur = stop;
  }
  auto back = route_back(topo, cur, root);
  t = log.travel(back, t, EventKind::Hop, bytes);
  plan.hops += back.empty() ? 0 : static_cast<std::uint32_t>(back.size() - 1);
  log.emit(t, EventKind::Eject, root, std::nullopt, bytes);
  ++plan.hops;
  plan.home_tick = t + 1;
  return plan;
}

// Broadcast over the BFS tree, convergecast of counters back to the root.
RoundPlan plan_flood_round(EventLog& log, const Topology& topo, const DpuId& root,
                           const std::set<DpuId>& pass_through, std::uint64_t t0, std::uint64_t bytes) {
  RoundPlan plan;
  plan.tree = spanning_tree(topo, root);
  const auto& tree = *plan.tree;
  log.emit(t0, EventKind::Inject, std::nullopt, root, bytes);
  ++plan.hops;
  std::map<DpuId, std::uint64_t> arrival{{root, t0 + 1}};
  std::map<DpuId, std::uint64_t> ready;
  for (const auto& node : tree.bfs_order) {
    std::uint64_t a = arrival.at(node);
    std::uint64_t f = a;
    if (!pass_through.contains(node)) {
      log.emit(a, EventKind::Deliver, node, node, bytes);
      plan.deliveries.push_back({node, a});
      f = a + 1;
    }
    ready[node] = f;
    for (const auto& child : tree.children.at(node)) {
      log.emit(f, EventKind::Hop, node, child, bytes);
      ++plan.hops;
      arrival[child] = f + 1;
    }
  }
  std::map<DpuId, std::uint64_t> send;
  for (auto it = tree.bfs_order.rbegin(); it != tree.bfs_order.rend(); ++it) {
    std::uint64_t s = ready.at(*it);
    for (const auto& child : tree.children.at(*it)) s = std::max(s, send.at(child) + 1);
    send[*it] = s;
    if (*it != root) {
      log.emit(s, EventKind::Hop, *it, tree.parent.at(*it), wire::kCounterReportBytes);
      ++plan.hops;
    }
  }
  log.emit(send.at(root), EventKind::Eject, root, std::nullopt, wire::kCounterReportBytes);
  ++plan.hops;
  plan.home_tick = send.at(root) + 1;
  plan.packets = 2 * tree.bfs_order.size() - 1;
  return plan;
}

struct DpuStep {
  Decision decision;
  std::size_t candidate_count = 0;
  std::optional<LocalWork> work;
  std::vector<FsmTransition> fsm;
  std::string error;
};

DpuStep process_delivery(DpuState& dpu, const Request& request, const BlockRegistry& registry) {
  DpuStep step;
  try {
    step.decision = begin_request(dpu, request, &step.fsm);
    if (step.decision.accept) {
      step.candidate_count = candidates(dpu, request).size();
      step.work = complete_request(dpu, request, registry, &step.fsm);
    }
  } catch (const std::exception& e) {
    step.error = e.what();
  }
  return step;
}

// The per-round DPU kernel. Each delivery touches a distinct DPU, so the
// steps are independent; effects are merged afterwards in delivery order.
std::vector<DpuStep> run_dpus(Fabric& fabric, const std::vector<PlannedDelivery>& deliveries,
                              const Request& request, const BlockRegistry& registry, ExecPolicy exec) {
  std::vector<DpuStep> steps(deliveries.size());
  std::vector<DpuState*> targets;
  targets.reserve(deliveries.size());
  for (const auto& d : deliveries) targets.push_back(&fabric.dpu(d.dpu));
  if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(steps.size()); ++i) {
      steps[i] = process_delivery(*targets[i], request, registry);
    }
  } else {
    for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = process_delivery(*targets[i], request, registry);
  }
  for (const auto& step : steps) {
    if (!step.error.empty()) throw ProtocolViolation(step.error);
  }
  return steps;
}

void merge_round(RunOutcome& out, EventLog& log, const DpuId& root, const RoundPlan& plan,
                 std::vector<DpuStep>& steps) {
  const Counters before{out.packet.processing_count, out.packet.rejection_count};
  std::map<DpuId, Counters> own;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& delivery = plan.deliveries[i];
    auto& step = steps[i];
    out.fsm_log.insert(out.fsm_log.end(), step.fsm.begin(), step.fsm.end());
    auto confirmation = apply_decision(out.packet, delivery.dpu, step.decision, step.candidate_count);
    own[delivery.dpu] = step.decision.accept ? Counters{1, 0} : Counters{0, 1};
    DeliveryRecord record{delivery.dpu, delivery.arrival, step.decision.accept, 1, 0};
    if (confirmation) {
      log.to_initiator(delivery.dpu, root, delivery.arrival + 1, EventKind::Confirm, wire::kConfirmationBytes);
      record.forecast_ticks = confirmation->forecast_ticks;
      out.confirmations.push_back(*confirmation);
    }
    if (step.work) {
      auto& work = *step.work;
      record.busy_ticks = work.busy_ticks;
      out.skipped_records += work.partial.skipped;
      log.to_initiator(delivery.dpu, root, delivery.arrival + work.busy_ticks, EventKind::Result,
                       work.partial.wire_bytes());
      out.partials.push_back(std::move(work.partial));
    }
    out.deliveries.push_back(record);
  }
  out.metrics.packets += plan.packets;
  out.packet.hop_count += plan.hops;

  if (plan.tree) {
    // Convergecast: each node reports its own decision plus its children's.
    std::map<DpuId, Counters> merged;
    const auto& order = plan.tree->bfs_order;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      Counters c = own.contains(*it) ? own.at(*it) : Counters{};
      for (const auto& child : plan.tree->children.at(*it)) {
        c.processing += merged.at(child).processing;
        c.rejection += merged.at(child).rejection;
      }
      merged[*it] = c;
    }
    const Counters& total = merged.at(root);
    if (before.processing + total.processing != out.packet.processing_count ||
        before.rejection + total.rejection != out.packet.rejection_count) {
      throw ProtocolViolation("convergecast counters disagree with packet counters");
    }
  }
}

bool is_integer_payload(const Payload& p) { return std::holds_alternative<std::int64_t>(p); }

}  // namespace

Payload aggregate(BlockKind block, const std::vector<PartialResult>& partials) {
  switch (block) {
    case BlockKind::Search: {
      std::set<std::string> ids;
      for (const auto& p : partials) {
        const auto& list = std::get<IdList>(p.payload);
        ids.insert(list.begin(), list.end());
      }
      return IdList(ids.begin(), ids.end());
    }
    case BlockKind::Count:
    case BlockKind::Scale: {
      std::int64_t total = 0;  // bounded by the record count
      for (const auto& p : partials) total += std::get<std::int64_t>(p.payload);
      return total;
    }
    case BlockKind::Sum: {
      bool all_int = std::all_of(partials.begin(), partials.end(),
                                 [](const PartialResult& p) { return is_integer_payload(p.payload); });
      if (all_int) {
        IntegerSum total;
        for (const auto& p : partials) total.add(std::get<std::int64_t>(p.payload));
        if (auto exact = total.exact()) return *exact;
        return total.approx();
      }
      double total = 0.0;
      for (const auto& p : partials) {
        total += is_integer_payload(p.payload) ? static_cast<double>(std::get<std::int64_t>(p.payload))
                                               : std::get<double>(p.payload);
      }
      return total;
    }
    case BlockKind::Min:
    case BlockKind::Max: {
      const bool want_min = block == BlockKind::Min;
      std::vector<const Payload*> present;
      for (const auto& p : partials) {
        if (!std::holds_alternative<EmptyPayload>(p.payload)) present.push_back(&p.payload);
      }
      if (present.empty()) return EmptyPayload{};
      bool all_int = std::all_of(present.begin(), present.end(), [](const Payload* p) { return is_integer_payload(*p); });
      if (all_int) {
        std::int64_t best = std::get<std::int64_t>(*present.front());
        for (const auto* p : present) {
          auto x = std::get<std::int64_t>(*p);
          best = want_min ? std::min(best, x) : std::max(best, x);
        }
        return best;
      }
      auto real = [](const Payload* p) {
        return is_integer_payload(*p) ? static_cast<double>(std::get<std::int64_t>(*p)) : std::get<double>(*p);
      };
      double best = real(present.front());
      for (const auto* p : present) best = want_min ? std::min(best, real(p)) : std::max(best, real(p));
      return best;
    }
    case BlockKind::Avg: {
      SumCount total;
      for (const auto& p : partials) {
        const auto& sc = std::get<SumCount>(p.payload);
        total.sum += sc.sum;
        total.count += sc.count;
      }
      if (total.count == 0) return EmptyPayload{};
      return total.sum / static_cast<double>(total.count);
    }
  }
  return EmptyPayload{};
}

bool multicast_cache_stale(const Fabric& fabric) {
  const auto& topo = fabric.topology();
  return fabric.epochs_since_ingest() < static_cast<std::uint32_t>(topo.eccentricity(fabric.initiator()));
}

std::vector<DpuId> multicast_targets(const Fabric& fabric, const Request& request) {
  const DpuState& root = fabric.dpu(fabric.initiator());
  std::vector<DpuId> out;
  for (const auto& dpu : fabric.dpus()) {
    if (dpu.id == root.id) {
      if (decide(root, request).accept) out.push_back(dpu.id);
      continue;
    }
    auto it = root.gossip.find(dpu.id);
    if (it == root.gossip.end() || decide(it->second.digest, request).accept) out.push_back(dpu.id);
  }
  return out;
}

RunOutcome run_request(Fabric& fabric, const Request& request, RoutingPolicy routing, ExecPolicy exec,
                       const BlockRegistry& registry) {
  const auto& topo = fabric.topology();
  const DpuId root = fabric.initiator();
  const std::uint64_t bytes = request_packet_bytes(request);

  RunOutcome out;
  out.routing = routing;
  out.packet.request_id = request.id;
  EventLog log(topo, request.id);

  auto run_round = [&](RoundPlan plan) {
    auto steps = run_dpus(fabric, plan.deliveries, request, registry, exec);
    merge_round(out, log, root, plan, steps);
    return plan.home_tick;
  };

  switch (routing) {
    case RoutingPolicy::SerpentineWalk:
      run_round(plan_walk_round(log, topo, root, plan_walk(topo), 0, bytes));
      break;
    case RoutingPolicy::FloodSpanningTree:
      run_round(plan_flood_round(log, topo, root, {}, 0, bytes));
      break;
    case RoutingPolicy::RelationMulticast: {
      auto targets = multicast_targets(fabric, request);
      std::set<DpuId> target_set(targets.begin(), targets.end());
      std::vector<DpuId> stops;
      for (const auto& id : plan_walk(topo)) {
        if (target_set.contains(id)) stops.push_back(id);
      }
      out.multicast_targets = stops.size();
      out.cache_stale = multicast_cache_stale(fabric);
      std::uint64_t home = run_round(plan_walk_round(log, topo, root, stops, 0, bytes));
      const bool incomplete = out.packet.visited.size() < fabric.size();
      if (incomplete && (out.packet.processing_count == 0 || out.cache_stale)) {
        out.fallback = true;
        std::set<DpuId> done(out.packet.visited.begin(), out.packet.visited.end());
        run_round(plan_flood_round(log, topo, root, done, home, bytes));
      }
      break;
    }
  }

  std::sort(out.partials.begin(), out.partials.end(),
            [](const PartialResult& a, const PartialResult& b) { return a.dpu_id < b.dpu_id; });

  auto& result = out.result;
  result.request_id = request.id;
  result.counters = {out.packet.processing_count, out.packet.rejection_count};
  result.confirmations = static_cast<std::uint32_t>(out.confirmations.size());
  if (result.counters.processing == 0) {
    result.status = ResultStatus::NoRelevantData;
    result.payload = EmptyPayload{};
  } else {
    result.status = ResultStatus::Ok;
    result.payload = aggregate(request.block, out.partials);
  }

  auto& m = out.metrics;
  m.packets += out.confirmations.size() + out.partials.size();
  for (const auto& e : log.events()) {
    if (!e.is_link()) continue;
    ++m.hops;
    m.byte_hops += e.bytes;
    if (e.kind == EventKind::Result && !e.to) m.payload_bytes += e.bytes;
  }
  m.completion_tick = log.last_initiator_arrival();
  out.trace = std::move(log.events());
  sort_trace(out.trace, topo);
  return out;
}

namespace {

// Central evaluation works on whole records, independently of DPU indexes.
bool central_match(const Record& record, const Request& request) {
  std::size_t hits = 0;
  for (const auto& kw : request.keywords) hits += record.keywords.count(kw);
  return request.mode == MatchMode::Any ? hits > 0 : hits == request.keywords.size();
}

bool central_conditions(const Record& record, const Request& request) {
  for (const auto& c : request.conditions) {
    auto it = record.fields.find(c.field);
    if (it == record.fields.end()) return false;
    auto r = compare(it->second, c.cmp, c.literal);
    if (!r.value_or(false)) return false;
  }
  return true;
}

Payload central_fold(const std::vector<const Record*>& selected, const Request& request) {
  if (request.block == BlockKind::Search) {
    IdList ids;
    for (const auto* r : selected) ids.push_back(r->id);
    return ids;
  }
  if (request.block == BlockKind::Count) return static_cast<std::int64_t>(selected.size());

  std::vector<FieldValue> values;
  for (const auto* r : selected) {
    auto it = r->fields.find(*request.field());
    if (it != r->fields.end() && is_numeric(it->second)) values.push_back(it->second);
  }
  if (request.block == BlockKind::Scale) {
    const FieldValue& factor = *request.factor();
    std::int64_t updated = 0;
    for (const auto& v : values) {
      // An integer product outside 64 bits is not written back.
      if (kind_of(v) == ValueKind::Integer && kind_of(factor) == ValueKind::Integer &&
          !checked_mul(std::get<std::int64_t>(v), std::get<std::int64_t>(factor))) {
        continue;
      }
      ++updated;
    }
    return updated;
  }

  const bool all_int = std::all_of(values.begin(), values.end(),
                                   [](const FieldValue& v) { return kind_of(v) == ValueKind::Integer; });
  switch (request.block) {
    case BlockKind::Sum: {
      if (all_int) {
        IntegerSum s;
        for (const auto& v : values) s.add(std::get<std::int64_t>(v));
        if (auto exact = s.exact()) return *exact;
        return s.approx();
      }
      double s = 0.0;
      for (const auto& v : values) s += *as_real(v);
      return s;
    }
    case BlockKind::Min:
    case BlockKind::Max: {
      if (values.empty()) return EmptyPayload{};
      const bool want_min = request.block == BlockKind::Min;
      if (all_int) {
        std::int64_t best = std::get<std::int64_t>(values.front());
        for (const auto& v : values) {
          auto x = std::get<std::int64_t>(v);
          if (want_min ? x < best : x > best) best = x;
        }
        return best;
      }
      double best = *as_real(values.front());
      for (const auto& v : values) {
        double x = *as_real(v);
        if (want_min ? x < best : x > best) best = x;
      }
      return best;
    }
    case BlockKind::Avg: {
      if (values.empty()) return EmptyPayload{};
      double s = 0.0;
      for (const auto& v : values) s += *as_real(v);
      return s / static_cast<double>(values.size());
    }
    default: return EmptyPayload{};
  }
}

}  // namespace

BaselineOutcome run_centralized(const Fabric& fabric, const Request& request, ExecPolicy exec) {
  const auto& topo = fabric.topology();
  const DpuId root = fabric.initiator();
  BaselineOutcome out;
  EventLog log(topo, request.id);

  // Fetch-all command flooded over the BFS tree; every DPU streams its
  // records back, one per tick after a one-tick decode.
  const auto tree = spanning_tree(topo, root);
  log.emit(0, EventKind::Inject, std::nullopt, root, wire::kHeaderBytes);
  std::map<DpuId, std::uint64_t> arrival{{root, 1}};
  std::uint64_t records_moved = 0;
  for (const auto& node : tree.bfs_order) {
    const std::uint64_t a = arrival.at(node);
    for (const auto& child : tree.children.at(node)) {
      log.emit(a, EventKind::Hop, node, child, wire::kHeaderBytes);
      arrival[child] = a + 1;
    }
    std::uint64_t emit_at = a + 1;
    for (const auto& [id, record] : fabric.dpu(node).store) {
      log.to_initiator(node, root, emit_at++, EventKind::Result, serialized_size(record));
      ++records_moved;
    }
  }

  // Central evaluation over the pulled records, in id order.
  std::vector<std::pair<const Record*, DpuId>> pulled;
  for (const auto& dpu : fabric.dpus()) {
    for (const auto& [id, record] : dpu.store) pulled.emplace_back(&record, dpu.id);
  }
  std::sort(pulled.begin(), pulled.end(), [](const auto& a, const auto& b) { return a.first->id < b.first->id; });

  std::vector<char> keep(pulled.size(), 0);
  if (exec == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pulled.size()); ++i) {
      const Record& r = *pulled[i].first;
      keep[i] = central_match(r, request) && central_conditions(r, request);
    }
  } else {
    for (std::size_t i = 0; i < pulled.size(); ++i) {
      const Record& r = *pulled[i].first;
      keep[i] = central_match(r, request) && central_conditions(r, request);
    }
  }

  std::map<DpuId, KeywordSet> digests;
  for (const auto& dpu : fabric.dpus()) digests[dpu.id];
  std::vector<const Record*> selected;
  for (std::size_t i = 0; i < pulled.size(); ++i) {
    const auto& [record, origin] = pulled[i];
    digests[origin].insert(record->keywords.begin(), record->keywords.end());
    if (keep[i]) selected.push_back(record);
  }

  auto& result = out.result;
  result.request_id = request.id;
  for (const auto& [id, digest] : digests) {
    if (decide(digest, request).accept) {
      ++result.counters.processing;
    } else {
      ++result.counters.rejection;
    }
  }
  if (result.counters.processing == 0) {
    result.status = ResultStatus::NoRelevantData;
    result.payload = EmptyPayload{};
  } else {
    result.status = ResultStatus::Ok;
    result.payload = central_fold(selected, request);
  }

  auto& m = out.metrics;
  for (const auto& e : log.events()) {
    if (!e.is_link()) continue;
    ++m.hops;
    m.byte_hops += e.bytes;
    if (e.kind == EventKind::Result && !e.to) m.payload_bytes += e.bytes;
  }
  // One tick per record on the central core.
  std::uint64_t done = log.last_initiator_arrival() + records_moved;
  m.packets = tree.bfs_order.size() + records_moved;

  if (request.block == BlockKind::Scale && result.status == ResultStatus::Ok) {
    // Updated records are written back to the DPU that owns them.
    std::uint64_t latest = done;
    for (std::size_t i = 0; i < pulled.size(); ++i) {
      if (!keep[i]) continue;
      const auto& [record, origin] = pulled[i];
      auto it = record->fields.find(*request.field());
      if (it == record->fields.end() || !is_numeric(it->second)) continue;
      const std::uint64_t size = serialized_size(*record);
      const std::uint64_t links = 1 + static_cast<std::uint64_t>(topo.distance(root, origin));
      m.hops += links;
      m.byte_hops += links * size;
      ++m.packets;
      latest = std::max(latest, done + links);
    }
    done = latest;
  }
  m.completion_tick = done;
  return out;
}

Comparison compare(const Metrics& fabric_metrics, const Metrics& baseline_metrics) {
  auto ratio = [](std::uint64_t f, std::uint64_t b) {
    return b == 0 ? Ratio{} : Ratio{static_cast<double>(f) / static_cast<double>(b)};
  };
  Comparison c;
  c.fabric = fabric_metrics;
  c.baseline = baseline_metrics;
  const bool empty = baseline_metrics.payload_bytes == 0;
  if (!empty) {
    c.payload_bytes = ratio(fabric_metrics.payload_bytes, baseline_metrics.payload_bytes);
    c.byte_hops = ratio(fabric_metrics.byte_hops, baseline_metrics.byte_hops);
    c.hops = ratio(fabric_metrics.hops, baseline_metrics.hops);
    c.packets = ratio(fabric_metrics.packets, baseline_metrics.packets);
    c.completion_tick = ratio(fabric_metrics.completion_tick, baseline_metrics.completion_tick);
  }
  return c;
}

bool payload_equivalent(const Payload& a, const Payload& b, double rel_tol) {
  if (a.index() != b.index()) return false;
  auto close = [&](double x, double y) {
    if (x == y) return true;
    return std::fabs(x - y) <= rel_tol * std::max(std::fabs(x), std::fabs(y));
  };
  if (const auto* x = std::get_if<double>(&a)) return close(*x, std::get<double>(b));
  if (const auto* x = std::get_if<SumCount>(&a)) {
    const auto& y = std::get<SumCount>(b);
    return x->count == y.count && close(x->sum, y.sum);
  }
  return a == b;
}

}  // namespace atm

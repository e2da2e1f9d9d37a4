#include "atm/session.hpp"

namespace atm {

Fabric prepare_fabric(const RunConfig& config, const std::vector<RawRecord>& raw) {
  Fabric fabric = build_fabric(Topology::parse(config.topology), config.seed);
  RecordRegistrar registrar(config.extraction);
  std::vector<Record> records;
  records.reserve(raw.size());
  for (const auto& r : raw) records.push_back(registrar.register_record(r));
  fabric.place_records(records, config.placement);
  if (config.epochs > 0) evolve(fabric, config.theta, config.epochs, config.exec);
  return fabric;
}

RequestEntry execute(Fabric& fabric, const Request& request, const RunConfig& config) {
  RequestEntry entry;
  entry.request = request;
  entry.baseline = run_centralized(fabric, request, config.exec);
  entry.fabric = run_request(fabric, request, config.routing, config.exec);
  entry.comparison = compare(entry.fabric.metrics, entry.baseline.metrics);
  return entry;
}

Json to_json(const RequestEntry& entry) {
  const auto& result = entry.fabric.result;
  Json out;
  out["request_id"] = entry.request.id;
  out["source_text"] = entry.request.source_text;
  out["status"] = std::string(to_string(result.status));
  out["payload"] = to_json(result.payload);
  out["counters"] = Json{{"processing", result.counters.processing}, {"rejection", result.counters.rejection}};
  out["confirmations"] = result.confirmations;
  out["skipped_records"] = entry.fabric.skipped_records;
  if (entry.fabric.routing == RoutingPolicy::RelationMulticast) {
    out["multicast"] = Json{{"targets", entry.fabric.multicast_targets},
                            {"cache_stale", entry.fabric.cache_stale},
                            {"fallback", entry.fabric.fallback}};
  }
  out["fabric_metrics"] = to_json(entry.fabric.metrics);
  out["baseline_metrics"] = to_json(entry.baseline.metrics);
  out["ratios"] = to_json(entry.comparison);
  return out;
}

Json metrics_report(const RunConfig& config, const std::vector<RequestEntry>& entries) {
  Json out;
  out["topology"] = config.topology;
  out["placement"] = std::string(to_string(config.placement));
  out["routing"] = std::string(to_string(config.routing));
  out["seed"] = config.seed;
  Json list = Json::array();
  for (const auto& e : entries) list.push_back(to_json(e));
  out["requests"] = std::move(list);
  return out;
}

}  // namespace atm

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "atm/evolution.hpp"
#include "atm/orchestrator.hpp"
#include "atm/record.hpp"

namespace atm {

using Json = nlohmann::ordered_json;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const DpuId& id);
Json to_json(const Endpoint& endpoint);
Json to_json(const Payload& payload);
Json to_json(const Metrics& metrics);
Json to_json(const Comparison& comparison);  // ratios only
Json to_json(const RelationGraph& graph);

/// {"tick","kind","from","to","request","bytes"} on one line.
std::string trace_line(const TraceEvent& event);
void write_trace(std::ostream& os, const std::vector<TraceEvent>& events);

/// Wire form of a compiled request.
Json request_wire(const Request& request);

/// One JSON Lines record: {"id": str, "tags": [str], "fields": {name: number|string}}.
RawRecord parse_raw_record(const Json& object);

/// Blank lines are skipped; errors name `source` and the line number.
std::vector<RawRecord> read_dataset(std::istream& in, const std::string& source);
std::vector<RawRecord> load_dataset(const std::string& path);

std::string dump_raw_record(const RawRecord& record);

}  // namespace atm

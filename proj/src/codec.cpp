#include "atm/codec.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace atm {

Json to_json(const DpuId& id) {
  Json out = Json::array();
  for (int i = 0; i < id.dims; ++i) out.push_back(id.coords[i]);
  return out;
}

Json to_json(const Endpoint& endpoint) { return endpoint ? to_json(*endpoint) : Json("initiator"); }

Json to_json(const Payload& payload) {
  Json out;
  out["kind"] = std::string(payload_kind(payload));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EmptyPayload>) {
          out["value"] = nullptr;
        } else if constexpr (std::is_same_v<T, SumCount>) {
          out["value"] = Json::array({v.sum, v.count});
        } else {
          out["value"] = v;
        }
      },
      payload);
  return out;
}

Json to_json(const Metrics& m) {
  Json out;
  out["payload_bytes"] = m.payload_bytes;
  out["byte_hops"] = m.byte_hops;
  out["hops"] = m.hops;
  out["packets"] = m.packets;
  out["completion_tick"] = m.completion_tick;
  return out;
}

Json to_json(const Comparison& c) {
  auto ratio = [](const Ratio& r) { return r.value ? Json(*r.value) : Json("n/a"); };
  Json out;
  out["payload_bytes"] = ratio(c.payload_bytes);
  out["byte_hops"] = ratio(c.byte_hops);
  out["hops"] = ratio(c.hops);
  out["packets"] = ratio(c.packets);
  out["completion_tick"] = ratio(c.completion_tick);
  return out;
}

Json to_json(const RelationGraph& graph) {
  Json edges = Json::array();
  for (const auto& e : graph.edges) {
    Json edge;
    edge["a"] = to_json(e.a);
    edge["b"] = to_json(e.b);
    edge["weight"] = e.weight;
    edge["formed_at_epoch"] = e.formed_at_epoch;
    edges.push_back(std::move(edge));
  }
  return edges;
}

std::string trace_line(const TraceEvent& event) {
  Json line;
  line["tick"] = event.tick;
  line["kind"] = std::string(to_string(event.kind));
  line["from"] = to_json(event.from);
  line["to"] = to_json(event.to);
  line["request"] = event.request;
  line["bytes"] = event.bytes;
  return line.dump();
}

void write_trace(std::ostream& os, const std::vector<TraceEvent>& events) {
  for (const auto& e : events) os << trace_line(e) << '\n';
}

namespace {

Json literal_json(const FieldValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

}  // namespace

Json request_wire(const Request& request) {
  Json out;
  out["request_id"] = request.id;
  out["mode"] = request.mode == MatchMode::Any ? "ANY" : "ALL";
  out["keywords"] = request.keywords;
  Json conds = Json::array();
  for (const auto& c : request.conditions) {
    conds.push_back(Json{{"field", c.field}, {"cmp", std::string(to_string(c.cmp))}, {"literal", literal_json(c.literal)}});
  }
  out["conditions"] = std::move(conds);
  out["op"] = request.op;
  Json args = Json::array();
  for (const auto& a : request.args) {
    if (const auto* ref = std::get_if<FieldRef>(&a)) {
      args.push_back(Json{{"field", ref->name}});
    } else {
      args.push_back(Json{{"literal", literal_json(std::get<FieldValue>(a))}});
    }
  }
  out["args"] = std::move(args);
  out["text"] = request.source_text;
  return out;
}

RawRecord parse_raw_record(const Json& object) {
  if (!object.is_object()) throw DatasetError("record is not a JSON object");
  RawRecord raw;
  auto id = object.find("id");
  if (id == object.end() || !id->is_string()) throw DatasetError("record needs a string \"id\"");
  raw.id = id->get<std::string>();
  if (auto tags = object.find("tags"); tags != object.end()) {
    if (!tags->is_array()) throw DatasetError("\"tags\" must be an array of strings");
    for (const auto& t : *tags) {
      if (!t.is_string()) throw DatasetError("\"tags\" must be an array of strings");
      raw.tags.push_back(t.get<std::string>());
    }
  }
  if (auto fields = object.find("fields"); fields != object.end()) {
    if (!fields->is_object()) throw DatasetError("\"fields\" must be an object");
    for (const auto& [name, value] : fields->items()) {
      if (value.is_number_integer()) {
        if (value.is_number_unsigned() && value.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
          throw DatasetError("field \"" + name + "\" is out of 64-bit range");
        }
        raw.fields.emplace_back(name, value.get<std::int64_t>());
      } else if (value.is_number_float()) {
        raw.fields.emplace_back(name, value.get<double>());
      } else if (value.is_string()) {
        raw.fields.emplace_back(name, value.get<std::string>());
      } else {
        throw DatasetError("field \"" + name + "\" must be a number or a string");
      }
    }
  }
  return raw;
}

std::vector<RawRecord> read_dataset(std::istream& in, const std::string& source) {
  std::vector<RawRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_raw_record(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw DatasetError(source + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    } catch (const DatasetError& e) {
      throw DatasetError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RawRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(path + ": file not found");
  return read_dataset(in, path);
}

std::string dump_raw_record(const RawRecord& record) {
  Json out;
  out["id"] = record.id;
  out["tags"] = record.tags;
  Json fields = Json::object();
  for (const auto& [name, value] : record.fields) fields[name] = literal_json(value);
  out["fields"] = std::move(fields);
  return out.dump();
}

}  // namespace atm

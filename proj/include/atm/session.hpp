#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atm/codec.hpp"
#include "atm/exec.hpp"
#include "atm/fabric.hpp"
#include "atm/orchestrator.hpp"
#include "atm/request.hpp"

namespace atm {

struct RunConfig {
  std::string topology = "2x2";
  PlacementPolicy placement = PlacementPolicy::RoundRobin;
  RoutingPolicy routing = RoutingPolicy::SerpentineWalk;
  ExtractionPolicy extraction = ExtractionPolicy::ExplicitTags;
  std::uint64_t seed = 0;
  double theta = 0.25;
  std::uint32_t epochs = 0;
  ExecPolicy exec = ExecPolicy::Parallel;
};

/// Builds the fabric, registers and places `raw`, then runs `config.epochs`
/// gossip epochs.
Fabric prepare_fabric(const RunConfig& config, const std::vector<RawRecord>& raw);

struct RequestEntry {
  Request request;
  RunOutcome fabric;
  BaselineOutcome baseline;
  Comparison comparison;
};

/// The baseline runs first so that scale is measured on unmutated data.
RequestEntry execute(Fabric& fabric, const Request& request, const RunConfig& config);

Json to_json(const RequestEntry& entry);

/// Metrics report for a whole script run.
Json metrics_report(const RunConfig& config, const std::vector<RequestEntry>& entries);

}  // namespace atm

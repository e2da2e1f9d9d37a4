#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "atm/exec.hpp"
#include "atm/fabric.hpp"

namespace atm {

/// |a ∩ b| / |a ∪ b|; zero when both are empty.
double jaccard(const KeywordSet& a, const KeywordSet& b);

/// Throws std::invalid_argument unless 0 < theta <= 1.
void validate_theta(double theta);

struct EpochStats {
  std::uint32_t epoch = 0;
  std::size_t cache_updates = 0;
  std::size_t edges_formed = 0;
};

struct EvolutionResult {
  RelationGraph graph;  // cumulative
  std::vector<EpochStats> epochs;

  /// Last epoch of this run that changed any gossip cache (0 if none did).
  std::uint32_t last_change_epoch() const;
};

/// Runs `epochs` gossip epochs. Each DPU exchanges its own digest and every
/// digest it has learned with its mesh neighbours only; a DPU that learns a
/// peer digest whose Jaccard similarity with its own reaches `theta` forms
/// an edge. Edges are never removed.
EvolutionResult evolve(Fabric& fabric, double theta, std::uint32_t epochs,
                       ExecPolicy policy = ExecPolicy::Parallel);

/// Runs epochs until one changes nothing; returns the cumulative graph.
EvolutionResult evolve_until_stable(Fabric& fabric, double theta, ExecPolicy policy = ExecPolicy::Parallel);

/// All-pairs Jaccard over current digests; edge iff weight >= theta.
RelationGraph relation_oracle(const Fabric& fabric, double theta, ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace atm

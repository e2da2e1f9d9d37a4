#include "atm/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "atm/noc.hpp"

namespace atm {

double jaccard(const KeywordSet& a, const KeywordSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

void validate_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0) || std::isnan(theta)) {
    throw std::invalid_argument("theta must be in (0, 1], got " + std::to_string(theta));
  }
}

std::uint32_t EvolutionResult::last_change_epoch() const {
  std::uint32_t last = 0;
  for (const auto& e : epochs) {
    if (e.cache_updates > 0) last = e.epoch;
  }
  return last;
}

namespace {

struct EpochDelta {
  std::map<DpuId, GossipEntry> next;
  std::vector<std::pair<DpuId, double>> formed;
  std::size_t updates = 0;
};

bool offer(std::map<DpuId, GossipEntry>& cache, const DpuId& self, const DpuId& peer, const GossipEntry& entry) {
  if (peer == self) return false;
  auto it = cache.find(peer);
  if (it == cache.end()) {
    cache.emplace(peer, entry);
    return true;
  }
  if (entry.version > it->second.version) {
    it->second = entry;
    return true;
  }
  return false;
}

// One DPU's view of the epoch, computed from the previous epoch's state only.
EpochDelta gossip_step(const Fabric& fabric, std::size_t i, const std::vector<KeywordSet>& digests, double theta) {
  const auto& topo = fabric.topology();
  const DpuState& self = fabric.dpus()[i];
  EpochDelta delta;
  delta.next = self.gossip;
  std::vector<DpuId> changed;
  for (const auto& nb : neighbors(topo, self.id)) {
    const DpuState& peer = fabric.dpu(nb);
    if (offer(delta.next, self.id, nb, GossipEntry{digests[topo.index_of(nb)], peer.digest_version})) {
      changed.push_back(nb);
    }
    for (const auto& [far, entry] : peer.gossip) {
      if (offer(delta.next, self.id, far, entry)) changed.push_back(far);
    }
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  delta.updates = changed.size();
  for (const auto& peer : changed) {
    if (self.relations.contains(peer)) continue;
    double w = jaccard(digests[i], delta.next.at(peer).digest);
    if (w >= theta) delta.formed.emplace_back(peer, w);
  }
  return delta;
}

}  // namespace

EvolutionResult evolve(Fabric& fabric, double theta, std::uint32_t epochs, ExecPolicy policy) {
  validate_theta(theta);
  EvolutionResult result;
  const std::size_t n = fabric.size();
  for (std::uint32_t e = 0; e < epochs; ++e) {
    const std::uint32_t epoch = fabric.epochs_run() + 1;
    std::vector<KeywordSet> digests(n);
    for (std::size_t i = 0; i < n; ++i) digests[i] = fabric.dpus()[i].digest();

    std::vector<EpochDelta> deltas(n);
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        deltas[i] = gossip_step(fabric, static_cast<std::size_t>(i), digests, theta);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) deltas[i] = gossip_step(fabric, i, digests, theta);
    }

    // Barrier: commit every DPU's new cache and local edges at once.
    EpochStats stats{epoch, 0, 0};
    auto& graph = fabric.relations();
    for (std::size_t i = 0; i < n; ++i) {
      DpuState& dpu = fabric.dpus()[i];
      dpu.gossip = std::move(deltas[i].next);
      stats.cache_updates += deltas[i].updates;
      for (const auto& [peer, w] : deltas[i].formed) {
        dpu.relations.emplace(peer, w);
        const DpuId lo = std::min(dpu.id, peer);
        const DpuId hi = std::max(dpu.id, peer);
        if (!graph.find(lo, hi)) {
          graph.edges.push_back({lo, hi, w, epoch});
          ++stats.edges_formed;
        }
      }
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const RelationEdge& x, const RelationEdge& y) {
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    fabric.note_epoch();
    result.epochs.push_back(stats);
  }
  result.graph = fabric.relations();
  return result;
}

EvolutionResult evolve_until_stable(Fabric& fabric, double theta, ExecPolicy policy) {
  EvolutionResult total;
  // A quiet epoch is guaranteed once information has crossed the mesh.
  const auto limit = static_cast<std::uint32_t>(fabric.topology().diameter() + 1);
  for (std::uint32_t i = 0; i < limit; ++i) {
    auto step = evolve(fabric, theta, 1, policy);
    total.epochs.push_back(step.epochs.front());
    if (step.epochs.front().cache_updates == 0) break;
  }
  total.graph = fabric.relations();
  return total;
}

RelationGraph relation_oracle(const Fabric& fabric, double theta, ExecPolicy policy) {
  validate_theta(theta);
  const std::size_t n = fabric.size();
  std::vector<KeywordSet> digests(n);
  for (std::size_t i = 0; i < n; ++i) digests[i] = fabric.dpus()[i].digest();

  std::vector<std::vector<RelationEdge>> rows(n);
  auto row = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = jaccard(digests[i], digests[j]);
      if (w >= theta) rows[i].push_back({fabric.dpus()[i].id, fabric.dpus()[j].id, w, 0});
    }
  };
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) row(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) row(i);
  }
  RelationGraph graph;
  for (auto& r : rows) graph.edges.insert(graph.edges.end(), r.begin(), r.end());
  return graph;
}

}  // namespace atm

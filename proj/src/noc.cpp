#include "atm/noc.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

namespace atm {

std::string_view to_string(RoutingPolicy policy) {
  switch (policy) {
    case RoutingPolicy::SerpentineWalk: return "walk";
    case RoutingPolicy::FloodSpanningTree: return "flood";
    case RoutingPolicy::RelationMulticast: return "multicast";
  }
  return "?";
}

std::optional<RoutingPolicy> parse_routing(std::string_view text) {
  if (text == "walk" || text == "serpentine-walk") return RoutingPolicy::SerpentineWalk;
  if (text == "flood" || text == "flood-spanning-tree") return RoutingPolicy::FloodSpanningTree;
  if (text == "multicast" || text == "relation-multicast") return RoutingPolicy::RelationMulticast;
  return std::nullopt;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Inject: return "inject";
    case EventKind::Hop: return "hop";
    case EventKind::Deliver: return "deliver";
    case EventKind::Confirm: return "confirm";
    case EventKind::Result: return "result";
    case EventKind::Eject: return "eject";
  }
  return "?";
}

std::vector<DpuId> neighbors(const Topology& topology, const DpuId& dpu) {
  if (!topology.contains(dpu)) throw TopologyError("unknown DpuId " + dpu.str());
  std::vector<DpuId> out;
  for (int dim = 0; dim < topology.dims(); ++dim) {
    for (int delta : {-1, 1}) {
      DpuId next = dpu;
      next.coords[dim] += delta;
      if (topology.contains(next)) out.push_back(next);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Serpentine over a rows x cols plane, starting at (0,0).
std::vector<std::pair<int, int>> snake(int rows, int cols) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int k = 0; k < cols; ++k) out.emplace_back(r, r % 2 == 0 ? k : cols - 1 - k);
  }
  return out;
}

}  // namespace

std::vector<DpuId> plan_walk(const Topology& topology) {
  std::vector<DpuId> out;
  out.reserve(topology.size());
  DpuId id = topology.origin();
  if (topology.dims() == 2) {
    for (auto [r, c] : snake(topology.extent(0), topology.extent(1))) {
      id.coords = {r, c, 0};
      out.push_back(id);
    }
    return out;
  }
  auto plane = snake(topology.extent(1), topology.extent(2));
  for (int p = 0; p < topology.extent(0); ++p) {
    for (std::size_t k = 0; k < plane.size(); ++k) {
      auto [r, c] = p % 2 == 0 ? plane[k] : plane[plane.size() - 1 - k];
      id.coords = {p, r, c};
      out.push_back(id);
    }
  }
  return out;
}

SpanningTree spanning_tree(const Topology& topology, const DpuId& root) {
  if (!topology.contains(root)) throw TopologyError("unknown DpuId " + root.str());
  SpanningTree tree;
  tree.root = root;
  std::set<DpuId> seen{root};
  std::deque<DpuId> queue{root};
  while (!queue.empty()) {
    DpuId node = queue.front();
    queue.pop_front();
    tree.bfs_order.push_back(node);
    auto& kids = tree.children[node];
    for (const auto& next : neighbors(topology, node)) {
      if (seen.insert(next).second) {
        tree.parent.emplace(next, node);
        kids.push_back(next);
        queue.push_back(next);
      }
    }
  }
  return tree;
}

std::vector<DpuId> route_back(const Topology& topology, const DpuId& from, const DpuId& to) {
  if (!topology.contains(from)) throw TopologyError("unknown DpuId " + from.str());
  if (!topology.contains(to)) throw TopologyError("unknown DpuId " + to.str());
  if (from == to) return {};
  std::vector<DpuId> path{from};
  DpuId cur = from;
  for (int dim = 0; dim < topology.dims(); ++dim) {
    while (cur.coords[dim] != to.coords[dim]) {
      cur.coords[dim] += cur.coords[dim] < to.coords[dim] ? 1 : -1;
      path.push_back(cur);
    }
  }
  return path;
}

void sort_trace(std::vector<TraceEvent>& events, const Topology& topology) {
  auto key = [&](const Endpoint& e) -> long long {
    return e ? static_cast<long long>(topology.index_of(*e)) : -1LL;
  };
  std::stable_sort(events.begin(), events.end(), [&](const TraceEvent& x, const TraceEvent& y) {
    return std::make_tuple(x.tick, key(x.from), static_cast<int>(x.kind), key(x.to), x.seq) <
           std::make_tuple(y.tick, key(y.from), static_cast<int>(y.kind), key(y.to), y.seq);
  });
}

}  // namespace atm

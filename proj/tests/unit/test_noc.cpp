#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "atm/noc.hpp"

namespace atm {
namespace {

bool adjacent(const Topology& t, const DpuId& a, const DpuId& b) { return t.distance(a, b) == 1; }

TEST(NeighborsTest, Corners) {
  Topology t{2, 2};
  EXPECT_EQ(neighbors(t, make_dpu({0, 0})), (std::vector<DpuId>{make_dpu({0, 1}), make_dpu({1, 0})}));
  EXPECT_EQ(neighbors(t, make_dpu({1, 1})), (std::vector<DpuId>{make_dpu({0, 1}), make_dpu({1, 0})}));
  EXPECT_EQ(neighbors(Topology{2, 2, 2}, make_dpu({0, 0, 0})).size(), 3u);
  EXPECT_EQ(neighbors(Topology{3, 3}, make_dpu({1, 1})).size(), 4u);
  EXPECT_TRUE(neighbors(Topology{1, 1}, make_dpu({0, 0})).empty());
}

TEST(NeighborsTest, UnknownDpu) { EXPECT_THROW(neighbors(Topology{2, 2}, make_dpu({2, 0})), TopologyError); }

TEST(PlanWalkTest, Examples) {
  EXPECT_EQ(plan_walk(Topology{2, 2}),
            (std::vector<DpuId>{make_dpu({0, 0}), make_dpu({0, 1}), make_dpu({1, 1}), make_dpu({1, 0})}));
  EXPECT_EQ(plan_walk(Topology{3, 3}),
            (std::vector<DpuId>{make_dpu({0, 0}), make_dpu({0, 1}), make_dpu({0, 2}), make_dpu({1, 2}),
                                make_dpu({1, 1}), make_dpu({1, 0}), make_dpu({2, 0}), make_dpu({2, 1}),
                                make_dpu({2, 2})}));
  auto line = plan_walk(Topology{1, 5});
  ASSERT_EQ(line.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(line[i], make_dpu({0, i}));
}

TEST(PlanWalkTest, CoversEveryShapeWithAdjacentSteps) {
  std::vector<Topology> shapes{Topology{1, 1}, Topology{1, 7}, Topology{7, 1}, Topology{4, 5},
                               Topology{5, 4}, Topology{2, 2, 2}, Topology{3, 2, 5}, Topology{4, 4, 4}};
  for (const auto& t : shapes) {
    auto walk = plan_walk(t);
    ASSERT_EQ(walk.size(), t.size()) << t.str();
    EXPECT_EQ(walk.front(), t.origin());
    EXPECT_EQ(std::set<DpuId>(walk.begin(), walk.end()).size(), t.size()) << t.str();
    for (std::size_t i = 1; i < walk.size(); ++i) EXPECT_TRUE(adjacent(t, walk[i - 1], walk[i])) << t.str() << " " << i;
  }
}

TEST(SpanningTreeTest, TwoByTwo) {
  auto tree = spanning_tree(Topology{2, 2}, make_dpu({0, 0}));
  EXPECT_EQ(tree.parent.at(make_dpu({0, 1})), make_dpu({0, 0}));
  EXPECT_EQ(tree.parent.at(make_dpu({1, 0})), make_dpu({0, 0}));
  EXPECT_EQ(tree.parent.at(make_dpu({1, 1})), make_dpu({0, 1}));
  EXPECT_EQ(tree.edge_count(), 3u);
  EXPECT_EQ(tree.bfs_order.front(), make_dpu({0, 0}));
}

TEST(SpanningTreeTest, Singleton) { EXPECT_TRUE(spanning_tree(Topology{1, 1}, make_dpu({0, 0})).parent.empty()); }

TEST(SpanningTreeTest, TreeShape) {
  for (const auto& t : {Topology{4, 4}, Topology{3, 5}, Topology{2, 3, 4}}) {
    auto tree = spanning_tree(t, t.origin());
    EXPECT_EQ(tree.edge_count(), t.size() - 1);
    EXPECT_EQ(tree.bfs_order.size(), t.size());
    for (const auto& [child, parent] : tree.parent) {
      EXPECT_TRUE(adjacent(t, child, parent));
      // BFS: depth in the tree equals mesh distance to the root.
      EXPECT_EQ(t.distance(child, t.origin()), t.distance(parent, t.origin()) + 1);
    }
  }
}

TEST(RouteBackTest, XFirst) {
  Topology t{2, 2};
  EXPECT_EQ(route_back(t, make_dpu({1, 1}), make_dpu({0, 0})),
            (std::vector<DpuId>{make_dpu({1, 1}), make_dpu({0, 1}), make_dpu({0, 0})}));
  EXPECT_TRUE(route_back(t, make_dpu({1, 0}), make_dpu({1, 0})).empty());
}

std::size_t bfs_distance(const Topology& t, const DpuId& from, const DpuId& to) {
  std::map<DpuId, std::size_t> dist{{from, 0}};
  std::deque<DpuId> queue{from};
  while (!queue.empty()) {
    DpuId cur = queue.front();
    queue.pop_front();
    if (cur == to) return dist[cur];
    for (const auto& n : neighbors(t, cur)) {
      if (dist.emplace(n, dist[cur] + 1).second) queue.push_back(n);
    }
  }
  return SIZE_MAX;
}

TEST(RouteBackTest, ShortestAgainstBfs) {
  std::mt19937_64 rng(17);
  for (const auto& t : {Topology{5, 6}, Topology{3, 4, 2}}) {
    auto all = t.all();
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int i = 0; i < 200; ++i) {
      DpuId a = all[pick(rng)], b = all[pick(rng)];
      auto path = route_back(t, a, b);
      if (a == b) {
        EXPECT_TRUE(path.empty());
        continue;
      }
      ASSERT_EQ(path.size() - 1, bfs_distance(t, a, b));
      EXPECT_EQ(path.front(), a);
      EXPECT_EQ(path.back(), b);
      for (std::size_t k = 1; k < path.size(); ++k) EXPECT_TRUE(adjacent(t, path[k - 1], path[k]));
      // Dimension order: once a later coordinate moves, earlier ones are settled.
      for (std::size_t k = 1; k < path.size(); ++k) {
        std::size_t moved = 0;
        while (path[k].coords[moved] == path[k - 1].coords[moved]) ++moved;
        for (std::size_t d = 0; d < moved; ++d) EXPECT_EQ(path[k].coords[d], b.coords[d]);
      }
    }
  }
}

TEST(RoutingPolicyTest, Parse) {
  EXPECT_EQ(parse_routing("walk"), RoutingPolicy::SerpentineWalk);
  EXPECT_EQ(parse_routing("flood"), RoutingPolicy::FloodSpanningTree);
  EXPECT_EQ(parse_routing("multicast"), RoutingPolicy::RelationMulticast);
  EXPECT_FALSE(parse_routing("teleport").has_value());
}

TEST(SortTraceTest, TotalOrder) {
  Topology t{2, 2};
  std::vector<TraceEvent> events;
  events.push_back({2, EventKind::Hop, make_dpu({0, 1}), make_dpu({1, 1}), 1, 10, 0});
  events.push_back({2, EventKind::Confirm, make_dpu({0, 0}), std::nullopt, 1, 32, 1});
  events.push_back({1, EventKind::Deliver, make_dpu({0, 0}), make_dpu({0, 0}), 1, 10, 2});
  events.push_back({0, EventKind::Inject, std::nullopt, make_dpu({0, 0}), 1, 10, 3});
  events.push_back({2, EventKind::Hop, make_dpu({0, 0}), make_dpu({1, 0}), 1, 10, 4});
  sort_trace(events, t);
  std::vector<std::uint64_t> order;
  for (const auto& e : events) order.push_back(e.seq);
  EXPECT_EQ(order, (std::vector<std::uint64_t>{3, 2, 4, 1, 0}));
}

}  // namespace
}  // namespace atm

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "smanet/routing.hpp"
#include "smanet/topology.hpp"

using namespace smanet;

namespace {

Topology exercise_topo() { return oracle::to_topology(oracle::exercise_net(), 10.0); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("hop distances on the canonical exercise topology") {
  Topology topo = exercise_topo();
  HopDistances dist = shortest_distances(topo, 8);
  CHECK(dist.at(2) == 2);
  CHECK(dist.at(4) == 2);
  CHECK(dist.at(8) == 0);
  CHECK(dist.at(1) == 3);

  Topology failed = apply_event(
      topo, TopologyEvent{TopologyEvent::Kind::link_down, 5, 8});
  CHECK(shortest_distances(failed, 8).at(4) == 3);

  CHECK(kind_of([&] { shortest_distances(topo, 99); }) ==
        ErrorKind::unknown_node);
}

TEST_CASE("hop distances agree with the reference walk on random graphs") {
  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 25; ++trial) {
    oracle::Net net = oracle::random_net(rng, 3 + int(rng() % 8),
                                         int(rng() % 6));
    Topology topo = oracle::to_topology(net);
    int dst = net.ids[rng() % net.ids.size()];
    auto expect = oracle::bfs(net, dst);
    HopDistances dist = shortest_distances(topo, dst);
    for (int id : net.ids) {
      if (expect[id] < 0) {
        CHECK(dist.count(id) == 0);
      } else {
        CHECK(dist.at(id) == expect[id]);
      }
    }
  }
}

TEST_CASE("default next hop picks the lowest-id closer neighbor") {
  Topology topo = exercise_topo();
  CHECK(legacy_next_hop(topo, 2, 8) == 5);
  CHECK(legacy_next_hop(topo, 4, 8) == 5);
  CHECK(legacy_next_hop(topo, 5, 8) == 8);
  CHECK(legacy_next_hop(topo, 1, 8) == 2);

  CHECK(kind_of([&] { legacy_next_hop(topo, 8, 8); }) ==
        ErrorKind::invalid_argument);

  std::vector<NodeRecord> nodes;
  for (int id : {1, 2, 3, 4}) {
    NodeRecord rec;
    rec.id = id;
    nodes.push_back(rec);
  }
  LinkRecord link;
  link.key = LinkKey::make(1, 2);
  Topology split(nodes, {link});
  CHECK(kind_of([&] { legacy_next_hop(split, 1, 3); }) ==
        ErrorKind::unreachable);
}

TEST_CASE("default forwarding reaches the destination in dist steps") {
  std::mt19937_64 rng(402);
  for (int trial = 0; trial < 25; ++trial) {
    oracle::Net net = oracle::random_net(rng, 3 + int(rng() % 8),
                                         int(rng() % 6));
    Topology topo = oracle::to_topology(net);
    for (int src : net.ids) {
      for (int dst : net.ids) {
        if (src == dst) continue;
        HopDistances dist = shortest_distances(topo, dst);
        REQUIRE(dist.count(src) == 1);
        NodeId at = src;
        int steps = 0;
        while (at != dst) {
          at = legacy_next_hop(topo, at, dst);
          ++steps;
          REQUIRE(steps <= dist.at(src));
        }
        CHECK(steps == dist.at(src));
      }
    }
  }
}

TEST_CASE("neighboring nodes differ by at most one hop of distance") {
  std::mt19937_64 rng(403);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Net net = oracle::random_net(rng, 4 + int(rng() % 6),
                                         int(rng() % 8));
    Topology topo = oracle::to_topology(net);
    int dst = net.ids[rng() % net.ids.size()];
    HopDistances dist = shortest_distances(topo, dst);
    for (const auto& e : net.edges) {
      bool has_a = dist.count(e.first) > 0;
      bool has_b = dist.count(e.second) > 0;
      CHECK(has_a == has_b);
      if (has_a && has_b) {
        CHECK(std::abs(dist.at(e.first) - dist.at(e.second)) <= 1);
      }
    }
  }
}

TEST_CASE("simple path enumeration matches the reference search") {
  Topology topo = exercise_topo();

  auto all = enumerate_simple_paths(topo, 2, 8, 4);
  auto has = [&](std::vector<NodeId> nodes) {
    return std::find_if(all.begin(), all.end(), [&](const Path& p) {
             return p.nodes == nodes;
           }) != all.end();
  };
  CHECK(has({2, 5, 8}));
  CHECK(has({2, 4, 5, 8}));
  CHECK(has({2, 4, 6, 7, 8}));

  auto expect = oracle::paths(oracle::exercise_net(), 1, 8, 5);
  auto got = enumerate_simple_paths(topo, 1, 8, 5);
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    std::vector<int> nodes(got[i].nodes.begin(), got[i].nodes.end());
    CHECK(nodes == expect[i]);
  }

  auto adjacent = enumerate_simple_paths(topo, 5, 8, 1);
  REQUIRE(adjacent.size() == 1);
  CHECK(adjacent[0].nodes == std::vector<NodeId>{5, 8});

  CHECK(std::is_sorted(all.begin(), all.end()));
}

TEST_CASE("enumeration always contains the default path") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Net net = oracle::random_net(rng, 3 + int(rng() % 7),
                                         int(rng() % 5));
    Topology topo = oracle::to_topology(net);
    int src = net.ids[rng() % net.ids.size()];
    int dst = net.ids[rng() % net.ids.size()];
    if (src == dst) continue;
    Path def = legacy_path(topo, src, dst);
    auto all = enumerate_simple_paths(topo, src, dst, default_max_hops(topo));
    CHECK(std::find(all.begin(), all.end(), def) != all.end());
  }
}

TEST_CASE("events flip link flags and bump the revision only") {
  Topology topo = exercise_topo();
  long long v0 = topo.version();

  Topology down = apply_event(
      topo, TopologyEvent{TopologyEvent::Kind::link_down, 1, 2});
  CHECK_FALSE(down.link_up(1, 2));
  CHECK(down.version() == v0 + 1);
  CHECK_FALSE(down.semantically_equal(topo));

  Topology up_again = apply_event(
      down, TopologyEvent{TopologyEvent::Kind::link_up, 1, 2});
  CHECK(up_again.semantically_equal(topo));
  CHECK(up_again.version() == v0 + 2);

  Topology same = apply_event(
      topo, TopologyEvent{TopologyEvent::Kind::link_up, 1, 2});
  CHECK(same.semantically_equal(topo));
  CHECK(same.version() == v0 + 1);

  Topology marked = apply_event(
      topo, TopologyEvent{TopologyEvent::Kind::node_compromised, 5, 0});
  CHECK(marked.node(5).compromised);
  CHECK_FALSE(topo.node(5).compromised);

  CHECK(kind_of([&] {
          apply_event(topo, TopologyEvent{TopologyEvent::Kind::link_down, 1, 8});
        }) == ErrorKind::unknown_link);

  for (const auto& [key, rec] : down.links()) {
    CHECK(rec.latency_ms == topo.link(key.a, key.b).latency_ms);
  }
}

TEST_CASE("graph construction rejects malformed inputs") {
  NodeRecord a;
  a.id = 1;
  NodeRecord b;
  b.id = 2;
  LinkRecord ab;
  ab.key = LinkKey::make(1, 2);

  SUBCASE("self loop") {
    LinkRecord loop;
    loop.key = {1, 1};
    CHECK(kind_of([&] { Topology({a, b}, {loop}); }) ==
          ErrorKind::invalid_argument);
  }
  SUBCASE("dangling endpoint") {
    LinkRecord bad;
    bad.key = LinkKey::make(2, 9);
    try {
      Topology({a, b}, {bad});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("9") != std::string::npos);
    }
  }
  SUBCASE("bad latency") {
    LinkRecord bad = ab;
    bad.latency_ms = 0.0;
    CHECK(kind_of([&] { Topology({a, b}, {bad}); }) ==
          ErrorKind::invalid_argument);
  }
  SUBCASE("duplicate node") {
    CHECK(kind_of([&] { Topology({a, a}, {}); }) ==
          ErrorKind::invalid_argument);
  }
  SUBCASE("duplicate link") {
    CHECK(kind_of([&] { Topology({a, b}, {ab, ab}); }) ==
          ErrorKind::invalid_argument);
  }
  SUBCASE("negative battery") {
    NodeRecord bad = a;
    bad.battery = -1.0;
    CHECK(kind_of([&] { Topology({bad, b}, {ab}); }) ==
          ErrorKind::invalid_argument);
  }
  SUBCASE("cloudlets never run out") {
    NodeRecord pod = a;
    pod.kind = NodeKind::cloudlet;
    pod.battery = 5.0;
    Topology topo({pod, b}, {ab});
    CHECK(std::isinf(topo.node(1).battery));
  }
}

TEST_CASE("latency distances and diameter") {
  Topology topo = exercise_topo();
  auto lat = latency_distances(topo, 1);
  CHECK(lat.at(1) == 0.0);
  CHECK(lat.at(2) == 10.0);
  CHECK(lat.at(8) == 30.0);
  CHECK(graph_diameter(topo) == 4);
  CHECK(default_max_hops(topo) == 6);

  Topology failed = apply_event(
      topo, TopologyEvent{TopologyEvent::Kind::link_down, 1, 2});
  CHECK(latency_distances(failed, 1).at(2) == 30.0);
}

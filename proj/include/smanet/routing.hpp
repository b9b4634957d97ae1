#pragma once

#include <map>
#include <vector>

#include "smanet/topology.hpp"

namespace smanet {

// Hop counts toward one destination; a missing key means unreachable.
using HopDistances = std::map<NodeId, int>;

// BFS over up links. dst maps to 0.
HopDistances shortest_distances(const Topology& topo, NodeId dst);

// The deterministic next hop a non-SDN node uses: among neighbors one hop
// closer to dst, the lowest node id. Throws unreachable if no path exists.
NodeId legacy_next_hop(const Topology& topo, NodeId at, NodeId dst);

// Overload for callers that already hold shortest_distances(topo, dst).
NodeId legacy_next_hop(const Topology& topo, const HopDistances& dist,
                       NodeId at, NodeId dst);

struct Path {
  std::vector<NodeId> nodes;

  NodeId src() const { return nodes.front(); }
  NodeId dst() const { return nodes.back(); }
  bool operator==(const Path&) const = default;
  bool operator<(const Path& other) const { return nodes < other.nodes; }
};

// Throws invalid-path unless `path` has >= 2 distinct nodes joined by up
// links, with no node repeated.
void validate_path(const Topology& topo, const Path& path);

// All simple paths src -> dst with at most max_hops edges, in lexicographic
// order of their node sequences. Empty when disconnected.
std::vector<Path> enumerate_simple_paths(const Topology& topo, NodeId src,
                                         NodeId dst, int max_hops);

// The path obtained by following legacy_next_hop from src until dst.
Path legacy_path(const Topology& topo, NodeId src, NodeId dst);

// Latency-weighted shortest-path distance (ms) from `from` to every
// reachable node, over up links.
std::map<NodeId, double> latency_distances(const Topology& topo, NodeId from);

// Largest finite hop distance between any node pair; 0 for empty graphs.
int graph_diameter(const Topology& topo);

// Default path-enumeration bound: diameter + 2.
int default_max_hops(const Topology& topo);

}  // namespace smanet

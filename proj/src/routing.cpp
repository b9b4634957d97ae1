#include "smanet/routing.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>

namespace smanet {

HopDistances shortest_distances(const Topology& topo, NodeId dst) {
  if (!topo.has_node(dst)) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(dst));
  }
  HopDistances dist;
  dist[dst] = 0;
  std::deque<NodeId> frontier{dst};
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    int next = dist[v] + 1;
    for (NodeId u : topo.up_neighbors(v)) {
      if (dist.emplace(u, next).second) frontier.push_back(u);
    }
  }
  return dist;
}

NodeId legacy_next_hop(const Topology& topo, const HopDistances& dist,
                       NodeId at, NodeId dst) {
  if (at == dst) {
    fail(ErrorKind::invalid_argument,
         "next hop undefined at the destination (" + std::to_string(dst) + ")");
  }
  auto here = dist.find(at);
  if (here == dist.end()) {
    fail(ErrorKind::unreachable, "node " + std::to_string(dst) +
                                     " is unreachable from " +
                                     std::to_string(at));
  }
  // up_neighbors is sorted ascending, so the first qualifying neighbor is
  // the lowest-id one.
  for (NodeId u : topo.up_neighbors(at)) {
    auto it = dist.find(u);
    if (it != dist.end() && it->second == here->second - 1) return u;
  }
  fail(ErrorKind::unreachable, "no next hop from " + std::to_string(at) +
                                   " toward " + std::to_string(dst));
}

NodeId legacy_next_hop(const Topology& topo, NodeId at, NodeId dst) {
  return legacy_next_hop(topo, shortest_distances(topo, dst), at, dst);
}

void validate_path(const Topology& topo, const Path& path) {
  if (path.nodes.size() < 2) {
    fail(ErrorKind::invalid_path, "a path needs at least two nodes");
  }
  std::set<NodeId> seen;
  for (NodeId v : path.nodes) {
    if (!topo.has_node(v)) {
      fail(ErrorKind::invalid_path,
           "path references missing node " + std::to_string(v));
    }
    if (!seen.insert(v).second) {
      fail(ErrorKind::invalid_path,
           "path repeats node " + std::to_string(v));
    }
  }
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    NodeId a = path.nodes[i], b = path.nodes[i + 1];
    if (!topo.has_link(a, b) || !topo.link_up(a, b)) {
      fail(ErrorKind::invalid_path, "no up link " +
                                        to_string(LinkKey::make(a, b)) +
                                        " along the path");
    }
  }
}

namespace {

void extend_paths(const Topology& topo, NodeId dst, int max_hops,
                  std::vector<NodeId>& stack, std::set<NodeId>& on_stack,
                  std::vector<Path>& out) {
  NodeId at = stack.back();
  if (at == dst) {
    out.push_back(Path{stack});
    return;
  }
  if (static_cast<int>(stack.size()) - 1 >= max_hops) return;
  // Ascending neighbor order makes the output lexicographic.
  for (NodeId u : topo.up_neighbors(at)) {
    if (on_stack.count(u)) continue;
    stack.push_back(u);
    on_stack.insert(u);
    extend_paths(topo, dst, max_hops, stack, on_stack, out);
    on_stack.erase(u);
    stack.pop_back();
  }
}

}  // namespace

std::vector<Path> enumerate_simple_paths(const Topology& topo, NodeId src,
                                         NodeId dst, int max_hops) {
  if (!topo.has_node(src)) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(src));
  }
  if (!topo.has_node(dst)) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(dst));
  }
  if (src == dst) {
    fail(ErrorKind::invalid_argument, "src and dst must differ");
  }
  if (max_hops < 1) {
    fail(ErrorKind::invalid_argument, "max_hops must be >= 1");
  }
  std::vector<Path> out;
  std::vector<NodeId> stack{src};
  std::set<NodeId> on_stack{src};
  extend_paths(topo, dst, max_hops, stack, on_stack, out);
  return out;
}

Path legacy_path(const Topology& topo, NodeId src, NodeId dst) {
  HopDistances dist = shortest_distances(topo, dst);
  Path path;
  path.nodes.push_back(src);
  NodeId at = src;
  while (at != dst) {
    at = legacy_next_hop(topo, dist, at, dst);
    path.nodes.push_back(at);
  }
  return path;
}

std::map<NodeId, double> latency_distances(const Topology& topo, NodeId from) {
  if (!topo.has_node(from)) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(from));
  }
  std::map<NodeId, double> dist;
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.push({0.0, from});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (!dist.emplace(v, d).second) continue;
    for (NodeId u : topo.up_neighbors(v)) {
      if (dist.count(u)) continue;
      heap.push({d + topo.link(v, u).latency_ms, u});
    }
  }
  return dist;
}

int graph_diameter(const Topology& topo) {
  int diameter = 0;
  for (const auto& [id, _] : topo.nodes()) {
    for (const auto& [other, hops] : shortest_distances(topo, id)) {
      (void)other;
      diameter = std::max(diameter, hops);
    }
  }
  return diameter;
}

int default_max_hops(const Topology& topo) { return graph_diameter(topo) + 2; }

}  // namespace smanet

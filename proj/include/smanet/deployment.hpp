#pragma once

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "smanet/routing.hpp"
#include "smanet/topology.hpp"

namespace smanet {

// Nodes upgraded to SDN forwarding. Members may pick any neighbor as next
// hop; everyone else forwards on the deterministic shortest-path next hop.
struct UpgradeSet {
  std::set<NodeId> members;

  bool contains(NodeId id) const { return members.count(id) != 0; }
  bool operator==(const UpgradeSet&) const = default;
};

using NodePair = std::pair<NodeId, NodeId>;

struct DeploymentPlan {
  UpgradeSet upgrades;
  long long objective = 0;  // total selectable paths over the pair set
  std::map<NodePair, long long> per_pair;
};

// True iff every node on `path` except the destination either belongs to S
// or hands the packet to its legacy next hop toward the destination.
bool is_selectable(const Topology& topo, const Path& path,
                   const UpgradeSet& S);

// f(S): selectable paths summed over `pairs`, each pair enumerated up to
// max_hops edges. Pairs must be non-empty, with src != dst.
long long selectable_count(const Topology& topo, const UpgradeSet& S,
                           const std::vector<NodePair>& pairs, int max_hops);

// Adds the node with the best marginal gain in f (ties to the lowest id)
// until the budget is spent or no gain remains.
DeploymentPlan greedy_deploy(const Topology& topo, int budget,
                             const std::vector<NodePair>& pairs, int max_hops);

// Exact optimum over all upgrade sets of size <= budget; ties go to the
// lexicographically smallest member set. Throws instance-too-large when the
// subset count exceeds `enumeration_cap`.
DeploymentPlan brute_force_deploy(const Topology& topo, int budget,
                                  const std::vector<NodePair>& pairs,
                                  int max_hops,
                                  long long enumeration_cap = 1'000'000);

// Every ordered (src, dst) pair of distinct nodes, ascending.
std::vector<NodePair> all_ordered_pairs(const Topology& topo);

}  // namespace smanet

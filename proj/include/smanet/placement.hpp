#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smanet/topology.hpp"

namespace smanet {

enum class Organization { flat, hierarchical };

const char* to_string(Organization org);
Organization organization_from_string(const std::string& s);

struct PlacementWeights {
  double w_latency = 1.0;
  double w_sync = 1.0;
  double w_energy = 1.0;
  double control_energy_per_forwarder = 1.0;

  bool operator==(const PlacementWeights&) const = default;
};

struct Placement {
  std::set<NodeId> sites;
  Organization organization = Organization::flat;
  std::optional<NodeId> root;            // required iff hierarchical
  std::map<NodeId, NodeId> assignment;   // forwarder -> site
  int capacity = 0;                      // max forwarders per site; 0 = unlimited
  std::vector<NodeId> unassigned;        // forwarders no site could take
};

struct PlacementCost {
  double control_latency_ms = 0.0;  // mean assigned-forwarder -> site latency
  double sync_cost_ms = 0.0;        // flat: all site pairs; hierarchical: sites -> root
  double energy_penalty = 0.0;      // battery-powered sites only
  double total = 0.0;
};

struct AssignResult {
  std::map<NodeId, NodeId> assignment;
  std::vector<NodeId> unassigned;
};

// Every node is a forwarder. Forwarders are processed in ascending id and
// take the nearest (latency-weighted) site with remaining capacity; latency
// ties go to the lower-id site. Unreachable or capacity-starved forwarders
// are reported, not fatal.
AssignResult assign_forwarders(const Topology& topo,
                               const std::set<NodeId>& sites, int capacity);

// Scores a placement. Throws invalid-placement when a site is not a
// controller candidate, a reachable forwarder is unassigned, capacity is
// exceeded, or a hierarchical placement lacks a usable root.
PlacementCost placement_cost(const Topology& topo, const Placement& placement,
                             const PlacementWeights& weights);

// Exact minimum-total-cost site subset (size <= max_sites) under the
// assign_forwarders policy; ties go to the lexicographically smallest site
// set. Throws infeasible when capacity can never cover the forwarders and
// instance-too-large past the enumeration cap.
Placement exhaustive_place(const Topology& topo,
                           const std::vector<NodeId>& candidates,
                           int max_sites, int capacity,
                           const PlacementWeights& weights, Organization org,
                           long long enumeration_cap = 1'000'000);

// Greedy site opening followed by swap-based local search (close one site,
// open another) until no swap improves the total. The seed fixes the swap
// probe order, making the search deterministic.
Placement local_search_place(const Topology& topo,
                             const std::vector<NodeId>& candidates,
                             int max_sites, int capacity,
                             const PlacementWeights& weights, Organization org,
                             unsigned long long seed);

}  // namespace smanet

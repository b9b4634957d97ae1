#include "smanet/deployment.hpp"

#include <algorithm>

namespace smanet {

namespace {

// A path is selectable under S iff its requirement set (the non-destination
// nodes that deviate from legacy forwarding) is contained in S. Requirement
// sets are precomputed once per pair so optimizers can score many candidate
// sets cheaply.
struct PathUniverse {
  struct PairPaths {
    NodePair pair;
    std::vector<std::vector<NodeId>> requirements;  // sorted node sets
  };
  std::vector<PairPaths> pairs;

  long long count(const std::set<NodeId>& S) const {
    long long total = 0;
    for (const auto& pp : pairs) {
      for (const auto& req : pp.requirements) {
        if (std::includes(S.begin(), S.end(), req.begin(), req.end())) {
          ++total;
        }
      }
    }
    return total;
  }

  std::map<NodePair, long long> per_pair(const std::set<NodeId>& S) const {
    std::map<NodePair, long long> out;
    for (const auto& pp : pairs) {
      long long n = 0;
      for (const auto& req : pp.requirements) {
        if (std::includes(S.begin(), S.end(), req.begin(), req.end())) ++n;
      }
      out[pp.pair] = n;
    }
    return out;
  }
};

std::vector<NodeId> requirement_set(const Topology& topo,
                                    const HopDistances& dist,
                                    const Path& path) {
  std::vector<NodeId> req;
  NodeId dst = path.dst();
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    NodeId v = path.nodes[i];
    if (path.nodes[i + 1] != legacy_next_hop(topo, dist, v, dst)) {
      req.push_back(v);
    }
  }
  std::sort(req.begin(), req.end());
  return req;
}

PathUniverse build_universe(const Topology& topo,
                            const std::vector<NodePair>& pairs, int max_hops) {
  if (pairs.empty()) {
    fail(ErrorKind::invalid_argument, "pair set must be non-empty");
  }
  PathUniverse universe;
  for (const auto& [src, dst] : pairs) {
    PathUniverse::PairPaths pp;
    pp.pair = {src, dst};
    HopDistances dist = shortest_distances(topo, dst);
    for (const Path& p : enumerate_simple_paths(topo, src, dst, max_hops)) {
      pp.requirements.push_back(requirement_set(topo, dist, p));
    }
    universe.pairs.push_back(std::move(pp));
  }
  return universe;
}

DeploymentPlan plan_from(const PathUniverse& universe,
                         const std::set<NodeId>& S) {
  DeploymentPlan plan;
  plan.upgrades.members = S;
  plan.per_pair = universe.per_pair(S);
  for (const auto& [_, n] : plan.per_pair) plan.objective += n;
  return plan;
}

}  // namespace

bool is_selectable(const Topology& topo, const Path& path,
                   const UpgradeSet& S) {
  validate_path(topo, path);
  NodeId dst = path.dst();
  HopDistances dist = shortest_distances(topo, dst);
  for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
    NodeId v = path.nodes[i];
    if (S.contains(v)) continue;
    if (path.nodes[i + 1] != legacy_next_hop(topo, dist, v, dst)) return false;
  }
  return true;
}

long long selectable_count(const Topology& topo, const UpgradeSet& S,
                           const std::vector<NodePair>& pairs, int max_hops) {
  return build_universe(topo, pairs, max_hops).count(S.members);
}

DeploymentPlan greedy_deploy(const Topology& topo, int budget,
                             const std::vector<NodePair>& pairs,
                             int max_hops) {
  if (budget < 0) {
    fail(ErrorKind::invalid_argument, "budget must be >= 0");
  }
  PathUniverse universe = build_universe(topo, pairs, max_hops);
  std::set<NodeId> S;
  long long current = universe.count(S);
  while (static_cast<int>(S.size()) < budget) {
    NodeId best_node = 0;
    long long best_value = current;
    for (const auto& [id, _] : topo.nodes()) {
      if (S.count(id)) continue;
      S.insert(id);
      long long value = universe.count(S);
      S.erase(id);
      // Strict improvement keeps ties on the lowest id (ascending scan).
      if (value > best_value) {
        best_value = value;
        best_node = id;
      }
    }
    if (best_value == current) break;
    S.insert(best_node);
    current = best_value;
  }
  return plan_from(universe, S);
}

DeploymentPlan brute_force_deploy(const Topology& topo, int budget,
                                  const std::vector<NodePair>& pairs,
                                  int max_hops, long long enumeration_cap) {
  if (budget < 0) {
    fail(ErrorKind::invalid_argument, "budget must be >= 0");
  }
  std::vector<NodeId> ids;
  for (const auto& [id, _] : topo.nodes()) ids.push_back(id);
  int n = static_cast<int>(ids.size());
  int k_max = std::min(budget, n);

  long long subsets = 0;
  {
    // sum_{k<=k_max} C(n,k), saturating against the cap
    long long binom = 1;
    for (int k = 0; k <= k_max; ++k) {
      subsets += binom;
      if (subsets > enumeration_cap) break;
      binom = binom * (n - k) / (k + 1);
    }
  }
  if (subsets > enumeration_cap) {
    fail(ErrorKind::instance_too_large,
         "subset count exceeds the enumeration cap of " +
             std::to_string(enumeration_cap));
  }

  PathUniverse universe = build_universe(topo, pairs, max_hops);
  std::set<NodeId> best_set;
  long long best_value = universe.count(best_set);

  std::vector<int> pick;
  for (int k = 1; k <= k_max; ++k) {
    pick.assign(k, 0);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::set<NodeId> S;
      for (int i : pick) S.insert(ids[i]);
      long long value = universe.count(S);
      // Ties go to the lexicographically smallest member sequence, which
      // std::set's ordering gives directly.
      if (value > best_value || (value == best_value && S < best_set)) {
        best_value = value;
        best_set = S;
      }
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return plan_from(universe, best_set);
}

std::vector<NodePair> all_ordered_pairs(const Topology& topo) {
  std::vector<NodePair> pairs;
  for (const auto& [a, _] : topo.nodes()) {
    for (const auto& [b, __] : topo.nodes()) {
      if (a != b) pairs.push_back({a, b});
    }
  }
  return pairs;
}

}  // namespace smanet

#include "smanet/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "smanet/routing.hpp"

namespace smanet {

const char* to_string(Organization org) {
  return org == Organization::flat ? "flat" : "hierarchical";
}

Organization organization_from_string(const std::string& s) {
  if (s == "flat") return Organization::flat;
  if (s == "hierarchical" || s == "hier") return Organization::hierarchical;
  fail(ErrorKind::parse_error, "unknown organization '" + s + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SiteDistances = std::map<NodeId, std::map<NodeId, double>>;

SiteDistances distances_from_sites(const Topology& topo,
                                   const std::set<NodeId>& sites) {
  SiteDistances dist;
  for (NodeId s : sites) dist[s] = latency_distances(topo, s);
  return dist;
}

double site_distance(const SiteDistances& dist, NodeId site, NodeId node) {
  const auto& from_site = dist.at(site);
  auto it = from_site.find(node);
  return it == from_site.end() ? kInf : it->second;
}

AssignResult assign_with(const Topology& topo, const std::set<NodeId>& sites,
                         int capacity, const SiteDistances& dist) {
  AssignResult result;
  std::map<NodeId, int> remaining;
  for (NodeId s : sites) {
    remaining[s] = capacity > 0 ? capacity : std::numeric_limits<int>::max();
  }
  for (const auto& [fwd, _] : topo.nodes()) {
    NodeId chosen = 0;
    double best = kInf;
    // Ascending site order resolves latency ties toward the lower id.
    for (NodeId s : sites) {
      if (remaining[s] <= 0) continue;
      double d = site_distance(dist, s, fwd);
      if (d < best) {
        best = d;
        chosen = s;
      }
    }
    if (best == kInf) {
      result.unassigned.push_back(fwd);
    } else {
      result.assignment[fwd] = chosen;
      --remaining[chosen];
    }
  }
  return result;
}

// The global controller host: the lowest-id cloudlet when one exists,
// otherwise the lowest-id chosen site.
NodeId resolve_root(const Topology& topo, const std::set<NodeId>& sites) {
  for (const auto& [id, rec] : topo.nodes()) {
    if (rec.kind == NodeKind::cloudlet) return id;
  }
  return *sites.begin();
}

PlacementCost cost_of(const Topology& topo, const Placement& placement,
                      const PlacementWeights& weights,
                      const SiteDistances& dist) {
  PlacementCost cost;
  if (!placement.assignment.empty()) {
    double sum = 0.0;
    for (const auto& [fwd, site] : placement.assignment) {
      sum += site_distance(dist, site, fwd);
    }
    cost.control_latency_ms = sum / static_cast<double>(placement.assignment.size());
  }
  if (placement.organization == Organization::flat) {
    for (auto a = placement.sites.begin(); a != placement.sites.end(); ++a) {
      for (auto b = std::next(a); b != placement.sites.end(); ++b) {
        cost.sync_cost_ms += site_distance(dist, *a, *b);
      }
    }
  } else {
    NodeId root = *placement.root;
    auto to_root = latency_distances(topo, root);
    for (NodeId s : placement.sites) {
      auto it = to_root.find(s);
      cost.sync_cost_ms += it == to_root.end() ? kInf : it->second;
    }
  }
  std::map<NodeId, int> assigned_count;
  for (const auto& [_, site] : placement.assignment) ++assigned_count[site];
  for (NodeId s : placement.sites) {
    if (std::isinf(topo.node(s).battery)) continue;
    cost.energy_penalty +=
        assigned_count[s] * weights.control_energy_per_forwarder;
  }
  cost.total = weights.w_latency * cost.control_latency_ms +
               weights.w_sync * cost.sync_cost_ms +
               weights.w_energy * cost.energy_penalty;
  return cost;
}

void validate_placement(const Topology& topo, const Placement& placement,
                        const SiteDistances& dist) {
  if (placement.sites.empty()) {
    fail(ErrorKind::invalid_placement, "a placement needs at least one site");
  }
  for (NodeId s : placement.sites) {
    if (!topo.has_node(s)) {
      fail(ErrorKind::invalid_placement,
           "site " + std::to_string(s) + " does not exist");
    }
    if (!topo.node(s).controller_candidate) {
      fail(ErrorKind::invalid_placement,
           "site " + std::to_string(s) + " is not a controller candidate");
    }
  }
  std::map<NodeId, int> assigned_count;
  for (const auto& [fwd, site] : placement.assignment) {
    if (!topo.has_node(fwd) || !placement.sites.count(site)) {
      fail(ErrorKind::invalid_placement,
           "assignment " + std::to_string(fwd) + " -> " +
               std::to_string(site) + " references an unknown id");
    }
    ++assigned_count[site];
  }
  if (placement.capacity > 0) {
    for (const auto& [site, count] : assigned_count) {
      if (count > placement.capacity) {
        fail(ErrorKind::invalid_placement,
             "site " + std::to_string(site) + " exceeds capacity");
      }
    }
  }
  for (const auto& [fwd, _] : topo.nodes()) {
    if (placement.assignment.count(fwd)) continue;
    for (NodeId s : placement.sites) {
      if (site_distance(dist, s, fwd) < kInf) {
        fail(ErrorKind::invalid_placement,
             "forwarder " + std::to_string(fwd) +
                 " is reachable from a site but unassigned");
      }
    }
  }
  if (placement.organization == Organization::hierarchical) {
    if (!placement.root) {
      fail(ErrorKind::invalid_placement, "hierarchical placement needs a root");
    }
    NodeId root = *placement.root;
    if (!topo.has_node(root)) {
      fail(ErrorKind::invalid_placement,
           "root " + std::to_string(root) + " does not exist");
    }
    if (!placement.sites.count(root) &&
        topo.node(root).kind != NodeKind::cloudlet) {
      fail(ErrorKind::invalid_placement,
           "root must be a chosen site or a cloudlet");
    }
  } else if (placement.root) {
    fail(ErrorKind::invalid_placement, "flat placement takes no root");
  }
}

struct SearchContext {
  const Topology& topo;
  std::vector<NodeId> candidates;
  int max_sites;
  int capacity;
  const PlacementWeights& weights;
  Organization org;
};

void validate_search_inputs(const SearchContext& ctx) {
  if (ctx.max_sites < 1) {
    fail(ErrorKind::invalid_argument, "max_sites must be >= 1");
  }
  if (ctx.candidates.empty()) {
    fail(ErrorKind::infeasible, "no controller candidates available");
  }
  for (NodeId c : ctx.candidates) {
    if (!ctx.topo.has_node(c)) {
      fail(ErrorKind::unknown_node, "candidate " + std::to_string(c));
    }
    if (!ctx.topo.node(c).controller_candidate) {
      fail(ErrorKind::invalid_placement,
           "candidate " + std::to_string(c) + " is not flagged as one");
    }
  }
  long long forwarders = static_cast<long long>(ctx.topo.nodes().size());
  if (ctx.capacity > 0 &&
      static_cast<long long>(ctx.capacity) * ctx.max_sites < forwarders) {
    fail(ErrorKind::infeasible,
         "capacity " + std::to_string(ctx.capacity) + " x " +
             std::to_string(ctx.max_sites) + " sites cannot host " +
             std::to_string(forwarders) + " forwarders");
  }
}

// A subset is usable only if the fixed assignment policy covers every
// forwarder that is reachable from at least one chosen site.
struct Scored {
  Placement placement;
  PlacementCost cost;
};

std::optional<Scored> score_subset(const SearchContext& ctx,
                                   const std::set<NodeId>& sites) {
  SiteDistances dist = distances_from_sites(ctx.topo, sites);
  AssignResult assigned = assign_with(ctx.topo, sites, ctx.capacity, dist);
  for (NodeId fwd : assigned.unassigned) {
    for (NodeId s : sites) {
      if (site_distance(dist, s, fwd) < kInf) return std::nullopt;
    }
  }
  Scored scored;
  scored.placement.sites = sites;
  scored.placement.organization = ctx.org;
  if (ctx.org == Organization::hierarchical) {
    scored.placement.root = resolve_root(ctx.topo, sites);
  }
  scored.placement.assignment = std::move(assigned.assignment);
  scored.placement.capacity = ctx.capacity;
  scored.placement.unassigned = std::move(assigned.unassigned);
  scored.cost = cost_of(ctx.topo, scored.placement, ctx.weights, dist);
  return scored;
}

bool better(const Scored& a, const Scored& b) {
  if (a.cost.total != b.cost.total) return a.cost.total < b.cost.total;
  return a.placement.sites < b.placement.sites;
}

}  // namespace

AssignResult assign_forwarders(const Topology& topo,
                               const std::set<NodeId>& sites, int capacity) {
  if (sites.empty()) {
    fail(ErrorKind::invalid_argument, "site set must be non-empty");
  }
  for (NodeId s : sites) {
    if (!topo.has_node(s)) {
      fail(ErrorKind::unknown_node, "site " + std::to_string(s));
    }
  }
  return assign_with(topo, sites, capacity, distances_from_sites(topo, sites));
}

PlacementCost placement_cost(const Topology& topo, const Placement& placement,
                             const PlacementWeights& weights) {
  SiteDistances dist = distances_from_sites(topo, placement.sites);
  validate_placement(topo, placement, dist);
  return cost_of(topo, placement, weights, dist);
}

Placement exhaustive_place(const Topology& topo,
                           const std::vector<NodeId>& candidates,
                           int max_sites, int capacity,
                           const PlacementWeights& weights, Organization org,
                           long long enumeration_cap) {
  SearchContext ctx{topo, candidates, max_sites, capacity, weights, org};
  std::sort(ctx.candidates.begin(), ctx.candidates.end());
  ctx.candidates.erase(
      std::unique(ctx.candidates.begin(), ctx.candidates.end()),
      ctx.candidates.end());
  validate_search_inputs(ctx);

  int m = static_cast<int>(ctx.candidates.size());
  int k_max = std::min(max_sites, m);
  long long subsets = 0;
  long long binom = 1;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) subsets += binom;
    if (subsets > enumeration_cap) {
      fail(ErrorKind::instance_too_large,
           "site subset count exceeds the enumeration cap of " +
               std::to_string(enumeration_cap));
    }
    binom = binom * (m - k) / (k + 1);
  }

  std::optional<Scored> best;
  std::vector<int> pick;
  for (int k = 1; k <= k_max; ++k) {
    pick.assign(k, 0);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::set<NodeId> sites;
      for (int i : pick) sites.insert(ctx.candidates[i]);
      if (auto scored = score_subset(ctx, sites)) {
        if (!best || better(*scored, *best)) best = std::move(scored);
      }
      int i = k - 1;
      while (i >= 0 && pick[i] == m - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  if (!best) {
    fail(ErrorKind::infeasible,
         "no site subset can host every reachable forwarder");
  }
  return best->placement;
}

Placement local_search_place(const Topology& topo,
                             const std::vector<NodeId>& candidates,
                             int max_sites, int capacity,
                             const PlacementWeights& weights, Organization org,
                             unsigned long long seed) {
  SearchContext ctx{topo, candidates, max_sites, capacity, weights, org};
  std::sort(ctx.candidates.begin(), ctx.candidates.end());
  ctx.candidates.erase(
      std::unique(ctx.candidates.begin(), ctx.candidates.end()),
      ctx.candidates.end());
  validate_search_inputs(ctx);

  // Greedy opening: grow the site set while it is still infeasible or while
  // one more site strictly lowers the total.
  std::optional<Scored> current;
  std::set<NodeId> open;
  int limit = std::min(ctx.max_sites, static_cast<int>(ctx.candidates.size()));
  while (static_cast<int>(open.size()) < limit) {
    std::optional<Scored> best_grow;
    for (NodeId c : ctx.candidates) {
      if (open.count(c)) continue;
      std::set<NodeId> grown = open;
      grown.insert(c);
      if (auto scored = score_subset(ctx, grown)) {
        if (!best_grow || better(*scored, *best_grow)) {
          best_grow = std::move(scored);
        }
      }
    }
    if (best_grow) {
      if (current && current->cost.total <= best_grow->cost.total) break;
      open = best_grow->placement.sites;
      current = std::move(best_grow);
      continue;
    }
    if (current) break;
    // Every one-site extension is still infeasible; advance by the smallest
    // capacity shortfall so later sizes stay reachable.
    NodeId best_c = 0;
    std::size_t best_shortfall = 0;
    bool have = false;
    for (NodeId c : ctx.candidates) {
      if (open.count(c)) continue;
      std::set<NodeId> grown = open;
      grown.insert(c);
      SiteDistances dist = distances_from_sites(ctx.topo, grown);
      AssignResult assigned =
          assign_with(ctx.topo, grown, ctx.capacity, dist);
      std::size_t shortfall = 0;
      for (NodeId fwd : assigned.unassigned) {
        for (NodeId s : grown) {
          if (site_distance(dist, s, fwd) < kInf) {
            ++shortfall;
            break;
          }
        }
      }
      if (!have || shortfall < best_shortfall) {
        have = true;
        best_shortfall = shortfall;
        best_c = c;
      }
    }
    open.insert(best_c);
  }
  if (!current) {
    fail(ErrorKind::infeasible,
         "no site subset can host every reachable forwarder");
  }

  // Swap phase. The seed only shuffles the probe order; any improving swap
  // is taken, so the fixed point is always swap-optimal.
  std::mt19937_64 rng(seed);
  bool improved = true;
  while (improved) {
    improved = false;
    std::vector<std::pair<NodeId, NodeId>> swaps;
    for (NodeId s : current->placement.sites) {
      for (NodeId c : ctx.candidates) {
        if (!current->placement.sites.count(c)) swaps.push_back({s, c});
      }
    }
    for (std::size_t i = swaps.size(); i > 1; --i) {
      std::swap(swaps[i - 1], swaps[rng() % i]);
    }
    for (const auto& [close, open_instead] : swaps) {
      std::set<NodeId> sites = current->placement.sites;
      sites.erase(close);
      sites.insert(open_instead);
      auto scored = score_subset(ctx, sites);
      if (scored && scored->cost.total < current->cost.total) {
        current = std::move(scored);
        improved = true;
        break;
      }
    }
  }
  return current->placement;
}

}  // namespace smanet

#include "smanet/policy.hpp"

#include <algorithm>
#include <tuple>

#include "smanet/routing.hpp"

namespace smanet {

const char* to_string(LinkState state) {
  return state == LinkState::up ? "up" : "down";
}

AccessId NtkPolicy::access_of(const std::string& category) const {
  auto it = categories.find(category);
  if (it == categories.end()) {
    fail(ErrorKind::semantic_error, "unknown category '" + category + "'");
  }
  return it->second;
}

bool NtkPolicy::cleared(const TeamId& team, AccessId access) const {
  auto it = clearances.find(team);
  return it != clearances.end() && it->second.count(access) != 0;
}

int RuleMatch::specificity() const {
  return (src ? 1 : 0) + (dst ? 1 : 0) + (access ? 1 : 0);
}

bool RuleMatch::covers(const PacketHeader& header) const {
  return (!src || *src == header.src) && (!dst || *dst == header.dst) &&
         (!access || *access == header.access);
}

namespace {

// Total order on matches for deterministic table layout; wildcards sort
// after concrete values.
auto match_key(const RuleMatch& m) {
  auto field = [](const auto& opt) {
    using T = typename std::decay_t<decltype(opt)>::value_type;
    return std::pair<bool, T>(!opt.has_value(), opt.value_or(T{}));
  };
  std::pair<bool, StatePredicate> state{!m.state.has_value(),
                                        m.state.value_or(StatePredicate{})};
  return std::make_tuple(field(m.src), field(m.dst), field(m.access), state);
}

bool table_order(const FlowRule& a, const FlowRule& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  int sa = a.match.specificity(), sb = b.match.specificity();
  if (sa != sb) return sa > sb;
  if (match_key(a.match) != match_key(b.match)) {
    return match_key(a.match) < match_key(b.match);
  }
  return std::make_pair(a.action, a.next_hop) <
         std::make_pair(b.action, b.next_hop);
}

bool fields_overlap(const RuleMatch& a, const RuleMatch& b) {
  auto compatible = [](const auto& x, const auto& y) {
    return !x || !y || *x == *y;
  };
  if (!compatible(a.src, b.src) || !compatible(a.dst, b.dst) ||
      !compatible(a.access, b.access)) {
    return false;
  }
  // Opposite requirements on the same link can never hold together.
  if (a.state && b.state && a.state->link == b.state->link &&
      a.state->required != b.state->required) {
    return false;
  }
  return true;
}

bool same_outcome(const FlowRule& a, const FlowRule& b) {
  if (a.action != b.action) return false;
  return a.action == FlowRule::Action::drop || a.next_hop == b.next_hop;
}

std::string describe(const RuleMatch& m) {
  auto f = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string("*");
  };
  std::string s = "(" + f(m.src) + "," + f(m.dst) + "," + f(m.access) + ")";
  if (m.state) {
    s += " when " + to_string(m.state->link) + " " + to_string(m.state->required);
  }
  return s;
}

}  // namespace

void RuleTable::insert(const FlowRule& rule) {
  if (rule.action == FlowRule::Action::forward && rule.next_hop == 0) {
    fail(ErrorKind::invalid_argument, "forward rule needs a next hop");
  }
  for (const FlowRule& existing : rules_) {
    if (existing == rule) return;  // idempotent
    if (existing.priority == rule.priority &&
        existing.match.specificity() == rule.match.specificity() &&
        fields_overlap(existing.match, rule.match) &&
        !same_outcome(existing, rule)) {
      fail(ErrorKind::conflicting_rule,
           "node " + std::to_string(node_) + ": " + describe(rule.match) +
               " ties " + describe(existing.match) +
               " with a different outcome");
    }
  }
  rules_.insert(
      std::upper_bound(rules_.begin(), rules_.end(), rule, table_order), rule);
}

MatchDecision match_rule(const RuleTable& table, const PacketHeader& header,
                         const LinkStates& link_states) {
  for (const FlowRule& rule : table.rules()) {
    if (!rule.match.covers(header)) continue;
    if (rule.match.state) {
      auto it = link_states.find(rule.match.state->link);
      if (it == link_states.end() || it->second != rule.match.state->required) {
        continue;
      }
    }
    if (rule.action == FlowRule::Action::drop) {
      return {MatchDecision::Kind::drop, 0};
    }
    return {MatchDecision::Kind::forward, rule.next_hop};
  }
  return {MatchDecision::Kind::fallthrough_legacy, 0};
}

namespace {

// First upgraded, uncompromised node on the legacy path, destination
// excluded. Empty when the flow cannot be enforced.
std::optional<NodeId> enforcement_point(const Topology& topo,
                                        const UpgradeSet& S,
                                        const PolicyFlow& flow) {
  HopDistances dist = shortest_distances(topo, flow.dst);
  if (!dist.count(flow.src)) return std::nullopt;
  NodeId at = flow.src;
  while (at != flow.dst) {
    if (S.contains(at) && !topo.node(at).compromised) return at;
    at = legacy_next_hop(topo, dist, at, flow.dst);
  }
  return std::nullopt;
}

void validate_flow(const Topology& topo, const NtkPolicy& policy,
                   const PolicyFlow& flow) {
  if (!topo.has_node(flow.src)) {
    fail(ErrorKind::unknown_node, "flow source " + std::to_string(flow.src));
  }
  if (!topo.has_node(flow.dst)) {
    fail(ErrorKind::unknown_node,
         "flow destination " + std::to_string(flow.dst));
  }
  if (flow.src == flow.dst) {
    fail(ErrorKind::invalid_argument, "flow source equals destination");
  }
  policy.access_of(flow.category);  // throws on unknown category
}

}  // namespace

CompiledPolicy compile_policy(const NtkPolicy& policy, const Topology& topo,
                              const UpgradeSet& S,
                              const std::vector<PolicyFlow>& flows) {
  for (NodeId v : S.members) {
    if (!topo.has_node(v)) {
      fail(ErrorKind::unknown_node, "upgrade member " + std::to_string(v));
    }
    if (!topo.node(v).sdn_capable) {
      fail(ErrorKind::invalid_argument,
           "node " + std::to_string(v) + " is not SDN capable");
    }
  }
  CompiledPolicy out;
  for (const PolicyFlow& flow : flows) {
    validate_flow(topo, policy, flow);
    AccessId access = policy.access_of(flow.category);
    std::optional<NodeId> point = enforcement_point(topo, S, flow);
    if (!point) {
      out.uncovered.push_back(flow);
      continue;
    }
    out.covered.push_back(flow);

    FlowRule rule;
    rule.match.src = flow.src;
    rule.match.dst = flow.dst;
    rule.match.access = access;
    if (policy.cleared(topo.node(flow.dst).team, access)) {
      rule.action = FlowRule::Action::forward;
      rule.next_hop = legacy_next_hop(topo, *point, flow.dst);
      rule.priority = kPriorityNtkForward;
    } else {
      rule.action = FlowRule::Action::drop;
      rule.priority = kPriorityNtkDrop;
    }
    auto [it, created] = out.tables.try_emplace(*point, RuleTable(*point));
    (void)created;
    it->second.insert(rule);
  }
  return out;
}

std::vector<NtkViolation> verify_ntk(const Topology& topo,
                                     const UpgradeSet& /*S*/,
                                     const NtkPolicy& policy,
                                     const std::vector<PolicyFlow>& flows,
                                     const std::map<NodeId, RuleTable>& tables) {
  // S is part of the call contract for symmetry with compile_policy; the
  // walk only consults the installed tables.
  constexpr int kWalkTtl = 32;
  std::vector<NtkViolation> violations;
  for (const PolicyFlow& flow : flows) {
    validate_flow(topo, policy, flow);
    AccessId access = policy.access_of(flow.category);
    PacketHeader header{flow.src, flow.dst, access};

    NodeId at = flow.src;
    bool delivered = false;
    int hops = 0;
    while (hops <= kWalkTtl) {
      if (at == flow.dst) {
        delivered = true;
        break;
      }
      auto table = tables.find(at);
      MatchDecision decision{MatchDecision::Kind::fallthrough_legacy, 0};
      if (table != tables.end()) {
        decision = match_rule(table->second, header, LinkStates{});
      }
      if (decision.kind == MatchDecision::Kind::drop) break;
      NodeId next = 0;
      if (decision.kind == MatchDecision::Kind::forward) {
        next = decision.next_hop;
      } else {
        try {
          next = legacy_next_hop(topo, at, flow.dst);
        } catch (const Error&) {
          break;  // no route: the packet dies in transit
        }
      }
      if (!topo.has_link(at, next) || !topo.link_up(at, next)) break;
      at = next;
      ++hops;
    }
    if (delivered && !policy.cleared(topo.node(flow.dst).team, access)) {
      violations.push_back({flow, flow.dst, access});
    }
  }
  return violations;
}

std::pair<std::vector<PolicyFlow>, std::vector<PolicyFlow>>
enforcement_coverage(const Topology& topo, const UpgradeSet& S,
                     const std::vector<PolicyFlow>& flows) {
  std::pair<std::vector<PolicyFlow>, std::vector<PolicyFlow>> out;
  for (const PolicyFlow& flow : flows) {
    if (enforcement_point(topo, S, flow)) {
      out.first.push_back(flow);
    } else {
      out.second.push_back(flow);
    }
  }
  return out;
}

}  // namespace smanet

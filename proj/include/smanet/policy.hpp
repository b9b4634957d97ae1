#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smanet/deployment.hpp"
#include "smanet/topology.hpp"

namespace smanet {

using AccessId = int;
using TeamId = std::string;

// Need-to-know policy: each traffic category carries one access id, and each
// team is cleared for a set of access ids. Anything not cleared is denied.
struct NtkPolicy {
  std::map<std::string, AccessId> categories;    // category name -> access id
  std::map<TeamId, std::set<AccessId>> clearances;

  AccessId access_of(const std::string& category) const;
  bool cleared(const TeamId& team, AccessId access) const;
  bool operator==(const NtkPolicy&) const = default;
};

struct PacketHeader {
  NodeId src = 0;
  NodeId dst = 0;
  AccessId access = 0;
};

enum class LinkState { up, down };

const char* to_string(LinkState state);

// Makes a rule conditional on a locally tracked link state.
struct StatePredicate {
  LinkKey link;
  LinkState required = LinkState::up;

  auto operator<=>(const StatePredicate&) const = default;
};

struct RuleMatch {
  std::optional<NodeId> src;      // empty = wildcard
  std::optional<NodeId> dst;
  std::optional<AccessId> access;
  std::optional<StatePredicate> state;

  // Count of concrete header fields; wildcards are less specific.
  int specificity() const;
  bool covers(const PacketHeader& header) const;  // header fields only
  bool operator==(const RuleMatch&) const = default;
};

// Rule priority bands. Deny rules outrank failover rules, which outrank
// compiled forwarding rules, so security wins over availability and
// availability wins over the compiled default.
inline constexpr int kPriorityNtkDrop = 100;
inline constexpr int kPriorityBackup = 60;
inline constexpr int kPriorityNtkForward = 40;

struct FlowRule {
  enum class Action { forward, drop };

  RuleMatch match;
  Action action = Action::drop;
  NodeId next_hop = 0;  // meaningful only for forward
  int priority = 0;

  bool operator==(const FlowRule&) const = default;
};

// One node's rules, kept sorted by (priority desc, specificity desc, match).
// Inserting a rule that can tie an existing one on both priority and
// specificity while disagreeing on the outcome is a conflict.
class RuleTable {
 public:
  RuleTable() = default;
  explicit RuleTable(NodeId node) : node_(node) {}

  NodeId node() const { return node_; }
  const std::vector<FlowRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  void insert(const FlowRule& rule);  // throws conflicting-rule

  bool operator==(const RuleTable&) const = default;

 private:
  NodeId node_ = 0;
  std::vector<FlowRule> rules_;
};

struct MatchDecision {
  enum class Kind { forward, drop, fallthrough_legacy };

  Kind kind = Kind::fallthrough_legacy;
  NodeId next_hop = 0;  // meaningful only for forward
};

using LinkStates = std::map<LinkKey, LinkState>;

// First rule in table order whose match covers the header and whose state
// predicate (if any) holds under link_states decides; a predicate on a link
// absent from link_states never holds. No rule = legacy fall-through.
MatchDecision match_rule(const RuleTable& table, const PacketHeader& header,
                         const LinkStates& link_states);

struct PolicyFlow {
  NodeId src = 0;
  NodeId dst = 0;
  std::string category;

  bool operator==(const PolicyFlow&) const = default;
};

struct CompiledPolicy {
  std::map<NodeId, RuleTable> tables;
  std::vector<PolicyFlow> covered;
  std::vector<PolicyFlow> uncovered;  // no usable enforcement point
};

// Installs, at the first SDN node on each flow's legacy path (destination
// excluded, compromised nodes skipped), a forward rule when the destination
// team is cleared for the flow's category and a drop rule otherwise.
CompiledPolicy compile_policy(const NtkPolicy& policy, const Topology& topo,
                              const UpgradeSet& S,
                              const std::vector<PolicyFlow>& flows);

struct NtkViolation {
  PolicyFlow flow;
  NodeId delivered_to = 0;
  AccessId access = 0;
};

// Walks every flow through the composed forwarding pipeline and records each
// delivery to a destination whose team lacks the category's access id.
std::vector<NtkViolation> verify_ntk(const Topology& topo, const UpgradeSet& S,
                                     const NtkPolicy& policy,
                                     const std::vector<PolicyFlow>& flows,
                                     const std::map<NodeId, RuleTable>& tables);

// A flow is covered when its legacy path holds at least one upgraded,
// uncompromised node before the destination.
std::pair<std::vector<PolicyFlow>, std::vector<PolicyFlow>>
enforcement_coverage(const Topology& topo, const UpgradeSet& S,
                     const std::vector<PolicyFlow>& flows);

}  // namespace smanet

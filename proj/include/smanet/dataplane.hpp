#pragma once

#include <map>
#include <set>
#include <vector>

#include "smanet/policy.hpp"
#include "smanet/topology.hpp"

namespace smanet {

// Per-node tracker for one incident link. The effective detection time of a
// transition is the event time plus detection_delay_ms.
struct LinkStateMachine {
  LinkKey link;
  LinkState state = LinkState::up;
  double detection_delay_ms = 50.0;

  bool operator==(const LinkStateMachine&) const = default;
};

// Applies a link_down/link_up observation. Throws mismatched-link when the
// event names another link; repeated observations are idempotent.
LinkStateMachine transition(const LinkStateMachine& machine,
                            const TopologyEvent& ev);

struct BackupRules {
  NodeId node = 0;
  std::vector<FlowRule> rules;              // UP/DOWN pairs, backup priority
  std::vector<LinkStateMachine> machines;   // one per monitored link
  std::vector<NodeId> unprotected;          // destinations with no alternative
};

// For each destination: an UP rule forwarding on the primary next hop and a
// DOWN rule forwarding on the best alternative neighbor, both gated on the
// primary link's state. The alternative is the neighbor with the smallest
// hop distance to the destination measured on the topology without the
// monitored link (ties to the lowest id), which keeps the detour loop-free
// against that failure. Destinations with no finite alternative are
// reported unprotected and get no rules.
BackupRules precompute_backup_rules(const Topology& topo, NodeId node,
                                    const std::set<NodeId>& dst_set);

// match_rule with the machines' current states as the link-state input.
MatchDecision stateful_forward(const RuleTable& table,
                               const std::vector<LinkStateMachine>& machines,
                               const PacketHeader& header);

struct LoopCheck {
  bool ok = true;
  std::vector<NodeId> cycle;  // repeating node sequence when !ok
};

// Walks every ordered pair through the composed forwarding function on the
// topology minus failed_links: nodes with tables use stateful_forward (state
// predicates read the failed set), everyone else uses the legacy next hop
// recomputed on the failed topology. Forwarding into a missing or failed
// link counts as a terminal drop, not a loop.
LoopCheck check_loop_free(const Topology& topo,
                          const std::map<NodeId, RuleTable>& tables,
                          const std::set<LinkKey>& failed_links, int ttl = 32);

}  // namespace smanet

#include "smanet/dataplane.hpp"

#include <algorithm>

#include "smanet/routing.hpp"

namespace smanet {

LinkStateMachine transition(const LinkStateMachine& machine,
                            const TopologyEvent& ev) {
  if (ev.kind != TopologyEvent::Kind::link_down &&
      ev.kind != TopologyEvent::Kind::link_up) {
    fail(ErrorKind::invalid_argument,
         "link state machines only observe link events");
  }
  if (LinkKey::make(ev.a, ev.b) != machine.link) {
    fail(ErrorKind::mismatched_link,
         "machine tracks " + to_string(machine.link) + ", event names " +
             to_string(LinkKey::make(ev.a, ev.b)));
  }
  LinkStateMachine next = machine;
  next.state = ev.kind == TopologyEvent::Kind::link_down ? LinkState::down
                                                         : LinkState::up;
  return next;
}

BackupRules precompute_backup_rules(const Topology& topo, NodeId node,
                                    const std::set<NodeId>& dst_set) {
  if (!topo.node(node).sdn_capable) {
    fail(ErrorKind::invalid_argument,
         "node " + std::to_string(node) + " is not SDN capable");
  }
  BackupRules out;
  out.node = node;
  std::set<LinkKey> monitored;
  for (NodeId dst : dst_set) {
    if (dst == node) {
      fail(ErrorKind::invalid_argument,
           "node " + std::to_string(node) + " cannot protect itself");
    }
    NodeId primary = legacy_next_hop(topo, node, dst);
    LinkKey link = LinkKey::make(node, primary);

    // Alternative next hop scored on the topology without the monitored
    // link; the primary itself stays eligible when another link reaches it.
    Topology without = apply_event(
        topo, TopologyEvent{TopologyEvent::Kind::link_down, link.a, link.b});
    HopDistances dist = shortest_distances(without, dst);
    NodeId alternative = 0;
    int best = -1;
    for (NodeId u : without.up_neighbors(node)) {
      auto it = dist.find(u);
      if (it == dist.end()) continue;
      if (best < 0 || it->second < best) {
        best = it->second;
        alternative = u;
      }
    }
    if (best < 0) {
      out.unprotected.push_back(dst);
      continue;
    }

    FlowRule up;
    up.match.dst = dst;
    up.match.state = StatePredicate{link, LinkState::up};
    up.action = FlowRule::Action::forward;
    up.next_hop = primary;
    up.priority = kPriorityBackup;
    out.rules.push_back(up);

    FlowRule down = up;
    down.match.state = StatePredicate{link, LinkState::down};
    down.next_hop = alternative;
    out.rules.push_back(down);

    if (monitored.insert(link).second) {
      LinkStateMachine machine;
      machine.link = link;
      machine.state = topo.link_up(link.a, link.b) ? LinkState::up
                                                   : LinkState::down;
      out.machines.push_back(machine);
    }
  }
  return out;
}

MatchDecision stateful_forward(const RuleTable& table,
                               const std::vector<LinkStateMachine>& machines,
                               const PacketHeader& header) {
  LinkStates states;
  for (const LinkStateMachine& m : machines) states[m.link] = m.state;
  return match_rule(table, header, states);
}

LoopCheck check_loop_free(const Topology& topo,
                          const std::map<NodeId, RuleTable>& tables,
                          const std::set<LinkKey>& failed_links, int ttl) {
  Topology failed = topo;
  for (const LinkKey& link : failed_links) {
    failed = apply_event(
        failed, TopologyEvent{TopologyEvent::Kind::link_down, link.a, link.b});
  }
  LinkStates states;
  for (const auto& [_, table] : tables) {
    for (const FlowRule& rule : table.rules()) {
      if (rule.match.state) {
        states[rule.match.state->link] = failed_links.count(rule.match.state->link)
                                             ? LinkState::down
                                             : LinkState::up;
      }
    }
  }

  for (const auto& [src, _] : topo.nodes()) {
    for (const auto& [dst, __] : topo.nodes()) {
      if (src == dst) continue;
      HopDistances dist = shortest_distances(failed, dst);
      PacketHeader header{src, dst, 0};
      std::vector<NodeId> walk{src};
      std::map<NodeId, std::size_t> first_seen{{src, 0}};
      NodeId at = src;
      while (at != dst && static_cast<int>(walk.size()) <= ttl) {
        auto table = tables.find(at);
        MatchDecision decision{MatchDecision::Kind::fallthrough_legacy, 0};
        if (table != tables.end()) {
          decision = match_rule(table->second, header, states);
        }
        NodeId next = 0;
        if (decision.kind == MatchDecision::Kind::drop) break;
        if (decision.kind == MatchDecision::Kind::forward) {
          next = decision.next_hop;
        } else {
          if (!dist.count(at)) break;  // unreachable: the packet is lost
          next = legacy_next_hop(failed, dist, at, dst);
        }
        if (!failed.has_link(at, next) || !failed.link_up(at, next)) break;
        auto [it, fresh] = first_seen.try_emplace(next, walk.size());
        if (!fresh) {
          // Deterministic forwarding revisiting a node is a permanent loop.
          LoopCheck result;
          result.ok = false;
          result.cycle.assign(walk.begin() + it->second, walk.end());
          return result;
        }
        walk.push_back(next);
        at = next;
      }
    }
  }
  return {};
}

}  // namespace smanet

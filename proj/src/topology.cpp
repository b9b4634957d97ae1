#include "smanet/topology.hpp"

#include <algorithm>

namespace smanet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::unknown_node: return "unknown-node";
    case ErrorKind::unknown_link: return "unknown-link";
    case ErrorKind::unreachable: return "unreachable";
    case ErrorKind::invalid_path: return "invalid-path";
    case ErrorKind::instance_too_large: return "instance-too-large";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::invalid_placement: return "invalid-placement";
    case ErrorKind::conflicting_rule: return "conflicting-rule";
    case ErrorKind::mismatched_link: return "mismatched-link";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::semantic_error: return "semantic-error";
    case ErrorKind::invalid_scenario: return "invalid-scenario";
    case ErrorKind::invalid_argument: return "invalid-argument";
  }
  return "error";
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::soldier: return "soldier";
    case NodeKind::vehicle: return "vehicle";
    case NodeKind::portable_station: return "portable-station";
    case NodeKind::cloudlet: return "cloudlet";
  }
  return "soldier";
}

NodeKind node_kind_from_string(const std::string& s) {
  if (s == "soldier") return NodeKind::soldier;
  if (s == "vehicle") return NodeKind::vehicle;
  if (s == "portable-station") return NodeKind::portable_station;
  if (s == "cloudlet") return NodeKind::cloudlet;
  fail(ErrorKind::parse_error, "unknown node kind '" + s + "'");
}

std::string to_string(const LinkKey& key) {
  return std::to_string(key.a) + "-" + std::to_string(key.b);
}

Topology::Topology(std::vector<NodeRecord> nodes, std::vector<LinkRecord> links) {
  for (auto& n : nodes) {
    if (n.id <= 0) {
      fail(ErrorKind::invalid_argument,
           "node ids must be positive, got " + std::to_string(n.id));
    }
    if (n.kind == NodeKind::cloudlet) n.battery = unbounded_battery();
    if (n.battery < 0) {
      fail(ErrorKind::invalid_argument,
           "node " + std::to_string(n.id) + " has negative battery");
    }
    if (!nodes_.emplace(n.id, n).second) {
      fail(ErrorKind::invalid_argument,
           "duplicate node id " + std::to_string(n.id));
    }
  }
  for (const auto& l : links) {
    if (l.key.a == l.key.b) {
      fail(ErrorKind::invalid_argument,
           "self-loop at node " + std::to_string(l.key.a));
    }
    if (!has_node(l.key.a) || !has_node(l.key.b)) {
      fail(ErrorKind::semantic_error,
           "link " + to_string(l.key) + " references a missing node");
    }
    if (!(l.latency_ms > 0)) {
      fail(ErrorKind::invalid_argument,
           "link " + to_string(l.key) + " latency must be > 0");
    }
    if (!links_.emplace(l.key, l).second) {
      fail(ErrorKind::invalid_argument, "duplicate link " + to_string(l.key));
    }
  }
  rebuild_adjacency();
}

const NodeRecord& Topology::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(id));
  }
  return it->second;
}

const LinkRecord& Topology::link(NodeId x, NodeId y) const {
  auto it = links_.find(LinkKey::make(x, y));
  if (it == links_.end()) {
    fail(ErrorKind::unknown_link, "link " + to_string(LinkKey::make(x, y)));
  }
  return it->second;
}

const std::vector<NodeId>& Topology::up_neighbors(NodeId id) const {
  auto it = up_adjacency_.find(id);
  if (it == up_adjacency_.end()) {
    fail(ErrorKind::unknown_node, "node " + std::to_string(id));
  }
  return it->second;
}

void Topology::rebuild_adjacency() {
  up_adjacency_.clear();
  for (const auto& [id, _] : nodes_) up_adjacency_[id] = {};
  for (const auto& [key, rec] : links_) {
    if (!rec.up) continue;
    up_adjacency_[key.a].push_back(key.b);
    up_adjacency_[key.b].push_back(key.a);
  }
  for (auto& [_, nbrs] : up_adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

Topology apply_event(const Topology& topo, const TopologyEvent& ev) {
  Topology next = topo;
  switch (ev.kind) {
    case TopologyEvent::Kind::link_down:
    case TopologyEvent::Kind::link_up: {
      auto it = next.links_.find(LinkKey::make(ev.a, ev.b));
      if (it == next.links_.end()) {
        fail(ErrorKind::unknown_link,
             "link " + to_string(LinkKey::make(ev.a, ev.b)));
      }
      it->second.up = ev.kind == TopologyEvent::Kind::link_up;
      break;
    }
    case TopologyEvent::Kind::node_compromised: {
      auto it = next.nodes_.find(ev.a);
      if (it == next.nodes_.end()) {
        fail(ErrorKind::unknown_node, "node " + std::to_string(ev.a));
      }
      it->second.compromised = true;
      break;
    }
  }
  next.rebuild_adjacency();
  next.version_ = topo.version_ + 1;
  return next;
}

}  // namespace smanet

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "smanet/error.hpp"

namespace smanet {

using NodeId = int;

enum class NodeKind { soldier, vehicle, portable_station, cloudlet };

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& s);

struct NodeRecord {
  NodeId id = 0;
  NodeKind kind = NodeKind::soldier;
  std::string team;  // empty = unaffiliated
  bool sdn_capable = false;
  bool controller_candidate = false;
  double battery = 0.0;  // energy units; infinity for infrastructure
  bool compromised = false;

  bool operator==(const NodeRecord&) const = default;
};

// Undirected link identity; endpoints kept in (low, high) order.
struct LinkKey {
  NodeId a = 0;
  NodeId b = 0;

  static LinkKey make(NodeId x, NodeId y) {
    return x < y ? LinkKey{x, y} : LinkKey{y, x};
  }
  auto operator<=>(const LinkKey&) const = default;
};

std::string to_string(const LinkKey& key);

struct LinkRecord {
  LinkKey key;
  double latency_ms = 1.0;
  bool up = true;

  bool operator==(const LinkRecord&) const = default;
};

struct TopologyEvent {
  enum class Kind { link_down, link_up, node_compromised };
  Kind kind = Kind::link_down;
  NodeId a = 0;
  NodeId b = 0;  // unused for node_compromised
};

// Immutable network graph. apply_event() returns a new value; instances can
// be shared read-only across workers.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<NodeRecord> nodes, std::vector<LinkRecord> links);

  const std::map<NodeId, NodeRecord>& nodes() const { return nodes_; }
  const std::map<LinkKey, LinkRecord>& links() const { return links_; }
  std::uint64_t version() const { return version_; }

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  const NodeRecord& node(NodeId id) const;

  bool has_link(NodeId x, NodeId y) const {
    return links_.count(LinkKey::make(x, y)) != 0;
  }
  const LinkRecord& link(NodeId x, NodeId y) const;
  bool link_up(NodeId x, NodeId y) const { return link(x, y).up; }

  // Neighbors over up links only, ascending id.
  const std::vector<NodeId>& up_neighbors(NodeId id) const;

  bool semantically_equal(const Topology& other) const {
    return nodes_ == other.nodes_ && links_ == other.links_;
  }

  friend Topology apply_event(const Topology& topo, const TopologyEvent& ev);

 private:
  void rebuild_adjacency();

  std::map<NodeId, NodeRecord> nodes_;
  std::map<LinkKey, LinkRecord> links_;
  std::map<NodeId, std::vector<NodeId>> up_adjacency_;
  std::uint64_t version_ = 0;
};

// Returns a copy with the event applied and the version bumped. Toggling a
// link to the state it is already in is idempotent, not an error.
Topology apply_event(const Topology& topo, const TopologyEvent& ev);

inline double unbounded_battery() {
  return std::numeric_limits<double>::infinity();
}

}  // namespace smanet

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smanet/deployment.hpp"
#include "smanet/placement.hpp"
#include "smanet/policy.hpp"
#include "smanet/topology.hpp"

namespace smanet {

enum class SimMode { centralized, manet_backup, delegated };

const char* to_string(SimMode mode);
SimMode sim_mode_from_string(const std::string& s);

struct SimFlow {
  NodeId src = 0;
  NodeId dst = 0;
  std::string category;
  double rate_pps = 1.0;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const SimFlow&) const = default;
};

struct TimelineEvent {
  enum class Kind { link_down, link_up, node_compromised, reconfigure };

  long long t_ms = 0;
  Kind kind = Kind::link_down;
  NodeId a = 0;
  NodeId b = 0;  // link events only

  bool operator==(const TimelineEvent&) const = default;
};

// Controller placement inputs carried by the scenario; the place subcommand
// recomputes sites, a simulation consumes them as configured.
struct PlacementSpec {
  std::vector<NodeId> sites;
  Organization organization = Organization::flat;
  std::optional<NodeId> root;
  int capacity = 0;  // 0 = unlimited

  bool operator==(const PlacementSpec&) const = default;
};

struct SimParams {
  unsigned long long seed = 1;
  int max_hops = 0;  // 0 = diameter + 2
  int ttl = 32;
  double detection_delay_ms = 50.0;
  double convergence_delay_ms = 2000.0;
  double recompute_delay_ms = 100.0;
  double reconfig_pause_ms = 1000.0;
  double status_period_ms = 0.0;  // 0 = no status updates
  double duration_s = 0.0;        // 0 = derived from flows and events
  double baseline_energy_rate = 1.0;
  PlacementWeights weights;

  bool operator==(const SimParams&) const = default;
};

struct Scenario {
  Topology topo;
  std::set<std::string> teams;
  NtkPolicy policy;
  std::vector<SimFlow> flows;
  std::vector<TimelineEvent> events;
  PlacementSpec placement;
  SimParams params;
  SimMode mode = SimMode::centralized;

  UpgradeSet upgrades() const;                 // nodes flagged sdn
  std::vector<NodeId> candidates() const;      // controller candidates
  std::vector<PolicyFlow> policy_flows() const;
  double derived_duration_s() const;  // explicit duration, else last activity
  int resolved_max_hops() const;      // explicit bound, else diameter + 2

  bool semantically_equal(const Scenario& other) const;
};

// Parses the sectioned text format ([nodes] [links] [teams] [policy] [flows]
// [events] [params], '#' comments). Failures are parse-error or
// semantic-error diagnostics carrying the offending line number; parsing
// never crashes on malformed input.
Scenario parse_scenario(const std::string& text);

// Canonical text form; parse_scenario(render_scenario(s)) reproduces s.
std::string render_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::string& path);

}  // namespace smanet

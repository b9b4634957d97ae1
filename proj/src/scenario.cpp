#include "smanet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "smanet/routing.hpp"

namespace smanet {

const char* to_string(SimMode mode) {
  switch (mode) {
    case SimMode::centralized: return "centralized";
    case SimMode::manet_backup: return "manet-backup";
    case SimMode::delegated: return "delegated";
  }
  return "centralized";
}

SimMode sim_mode_from_string(const std::string& s) {
  if (s == "centralized") return SimMode::centralized;
  if (s == "manet-backup") return SimMode::manet_backup;
  if (s == "delegated") return SimMode::delegated;
  fail(ErrorKind::parse_error, "unknown mode '" + s + "'");
}

UpgradeSet Scenario::upgrades() const {
  UpgradeSet S;
  for (const auto& [id, rec] : topo.nodes()) {
    if (rec.sdn_capable) S.members.insert(id);
  }
  return S;
}

std::vector<NodeId> Scenario::candidates() const {
  std::vector<NodeId> out;
  for (const auto& [id, rec] : topo.nodes()) {
    if (rec.controller_candidate) out.push_back(id);
  }
  return out;
}

std::vector<PolicyFlow> Scenario::policy_flows() const {
  std::vector<PolicyFlow> out;
  for (const SimFlow& f : flows) {
    PolicyFlow pf{f.src, f.dst, f.category};
    if (std::find(out.begin(), out.end(), pf) == out.end()) out.push_back(pf);
  }
  return out;
}

double Scenario::derived_duration_s() const {
  if (params.duration_s > 0) return params.duration_s;
  double end = 0.0;
  for (const SimFlow& f : flows) end = std::max(end, f.end_s);
  for (const TimelineEvent& ev : events) {
    end = std::max(end, static_cast<double>(ev.t_ms) / 1000.0);
  }
  return end;
}

int Scenario::resolved_max_hops() const {
  return params.max_hops > 0 ? params.max_hops : default_max_hops(topo);
}

bool Scenario::semantically_equal(const Scenario& other) const {
  return topo.semantically_equal(other.topo) && teams == other.teams &&
         policy == other.policy && flows == other.flows &&
         events == other.events && placement == other.placement &&
         params == other.params && mode == other.mode;
}

namespace {

[[noreturn]] void fail_line(ErrorKind kind, int line, const std::string& msg) {
  fail(kind, "line " + std::to_string(line) + ": " + msg);
}

long long parse_int(const std::string& tok, int line, const std::string& what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail_line(ErrorKind::parse_error, line,
              what + " '" + tok + "' is not an integer");
  }
}

double parse_double(const std::string& tok, int line,
                    const std::string& what) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail_line(ErrorKind::parse_error, line,
              what + " '" + tok + "' is not a number");
  }
}

struct RawLine {
  int line = 0;
  std::vector<std::string> tokens;
};

std::map<std::string, std::vector<RawLine>> split_sections(
    const std::string& text) {
  static const std::set<std::string> kSections = {
      "nodes", "links", "teams", "policy", "flows", "events", "params"};
  std::map<std::string, std::vector<RawLine>> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    std::istringstream tokens(raw);
    std::vector<std::string> toks;
    std::string tok;
    while (tokens >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks[0].front() == '[') {
      if (toks.size() != 1 || toks[0].back() != ']') {
        fail_line(ErrorKind::parse_error, line, "malformed section header");
      }
      std::string name = toks[0].substr(1, toks[0].size() - 2);
      if (!kSections.count(name)) {
        fail_line(ErrorKind::parse_error, line,
                  "unknown section [" + name + "]");
      }
      if (sections.count(name)) {
        fail_line(ErrorKind::parse_error, line,
                  "duplicate section [" + name + "]");
      }
      sections[name];
      current = name;
      continue;
    }
    if (current.empty()) {
      fail_line(ErrorKind::parse_error, line, "content before any section");
    }
    sections[current].push_back({line, toks});
  }
  return sections;
}

struct ScenarioBuilder {
  Scenario sc;
  std::vector<NodeRecord> nodes;
  std::vector<LinkRecord> links;
  std::map<NodeId, int> node_lines;
  std::map<AccessId, std::string> access_names;

  bool knows_node(NodeId id) const { return node_lines.count(id) != 0; }

  void require_node(NodeId id, int line, const std::string& role) {
    if (!knows_node(id)) {
      fail_line(ErrorKind::semantic_error, line,
                role + " references unknown node " + std::to_string(id));
    }
  }

  void add_node(const RawLine& rl) {
    if (rl.tokens.size() < 4) {
      fail_line(ErrorKind::parse_error, rl.line,
                "node line needs: id kind team battery [flags]");
    }
    NodeRecord rec;
    rec.id = static_cast<NodeId>(parse_int(rl.tokens[0], rl.line, "node id"));
    if (rec.id <= 0) {
      fail_line(ErrorKind::parse_error, rl.line, "node ids must be positive");
    }
    if (knows_node(rec.id)) {
      fail_line(ErrorKind::parse_error, rl.line,
                "duplicate node " + std::to_string(rec.id));
    }
    try {
      rec.kind = node_kind_from_string(rl.tokens[1]);
    } catch (const Error& e) {
      fail_line(ErrorKind::parse_error, rl.line, e.what());
    }
    rec.team = rl.tokens[2] == "-" ? "" : rl.tokens[2];
    rec.battery = parse_double(rl.tokens[3], rl.line, "battery");
    if (rec.battery < 0) {
      fail_line(ErrorKind::parse_error, rl.line, "battery must be >= 0");
    }
    if (rec.kind == NodeKind::cloudlet) {
      rec.battery = unbounded_battery();
    }
    for (std::size_t i = 4; i < rl.tokens.size(); ++i) {
      const std::string& flag = rl.tokens[i];
      if (flag == "sdn") {
        rec.sdn_capable = true;
      } else if (flag == "candidate") {
        rec.controller_candidate = true;
      } else if (flag == "compromised") {
        rec.compromised = true;
      } else {
        fail_line(ErrorKind::parse_error, rl.line,
                  "unknown node flag '" + flag + "'");
      }
    }
    node_lines[rec.id] = rl.line;
    nodes.push_back(rec);
  }

  void add_link(const RawLine& rl) {
    if (rl.tokens.size() < 3 || rl.tokens.size() > 4) {
      fail_line(ErrorKind::parse_error, rl.line,
                "link line needs: a b latency_ms [down]");
    }
    NodeId a = static_cast<NodeId>(parse_int(rl.tokens[0], rl.line, "endpoint"));
    NodeId b = static_cast<NodeId>(parse_int(rl.tokens[1], rl.line, "endpoint"));
    require_node(a, rl.line, "link");
    require_node(b, rl.line, "link");
    if (a == b) {
      fail_line(ErrorKind::parse_error, rl.line, "self-loops are not allowed");
    }
    LinkRecord rec;
    rec.key = LinkKey::make(a, b);
    rec.latency_ms = parse_double(rl.tokens[2], rl.line, "latency");
    if (!(rec.latency_ms > 0) || std::isinf(rec.latency_ms)) {
      fail_line(ErrorKind::parse_error, rl.line,
                "latency must be a positive number of ms");
    }
    if (rl.tokens.size() == 4) {
      if (rl.tokens[3] != "down") {
        fail_line(ErrorKind::parse_error, rl.line,
                  "unknown link flag '" + rl.tokens[3] + "'");
      }
      rec.up = false;
    }
    for (const LinkRecord& other : links) {
      if (other.key == rec.key) {
        fail_line(ErrorKind::parse_error, rl.line,
                  "duplicate link " + to_string(rec.key));
      }
    }
    links.push_back(rec);
  }

  void add_team(const RawLine& rl) {
    if (rl.tokens.size() != 1) {
      fail_line(ErrorKind::parse_error, rl.line,
                "team line holds exactly one team name");
    }
    if (!sc.teams.insert(rl.tokens[0]).second) {
      fail_line(ErrorKind::parse_error, rl.line,
                "duplicate team '" + rl.tokens[0] + "'");
    }
  }

  void add_policy(const RawLine& rl) {
    if (rl.tokens[0] == "category") {
      if (rl.tokens.size() != 3) {
        fail_line(ErrorKind::parse_error, rl.line,
                  "category line needs: category name access_id");
      }
      const std::string& name = rl.tokens[1];
      AccessId id =
          static_cast<AccessId>(parse_int(rl.tokens[2], rl.line, "access id"));
      if (sc.policy.categories.count(name)) {
        fail_line(ErrorKind::parse_error, rl.line,
                  "duplicate category '" + name + "'");
      }
      if (access_names.count(id)) {
        fail_line(ErrorKind::parse_error, rl.line,
                  "access id " + std::to_string(id) + " is already taken by '" +
                      access_names[id] + "'");
      }
      sc.policy.categories[name] = id;
      access_names[id] = name;
    } else if (rl.tokens[0] == "clearance") {
      if (rl.tokens.size() < 2) {
        fail_line(ErrorKind::parse_error, rl.line,
                  "clearance line needs: clearance team [categories]");
      }
      const std::string& team = rl.tokens[1];
      if (!sc.teams.count(team)) {
        fail_line(ErrorKind::semantic_error, rl.line,
                  "clearance for undeclared team '" + team + "'");
      }
      auto& cleared = sc.policy.clearances[team];
      for (std::size_t i = 2; i < rl.tokens.size(); ++i) {
        auto it = sc.policy.categories.find(rl.tokens[i]);
        if (it == sc.policy.categories.end()) {
          fail_line(ErrorKind::semantic_error, rl.line,
                    "clearance names unknown category '" + rl.tokens[i] + "'");
        }
        cleared.insert(it->second);
      }
    } else {
      fail_line(ErrorKind::parse_error, rl.line,
                "policy lines start with 'category' or 'clearance'");
    }
  }

  void add_flow(const RawLine& rl) {
    if (rl.tokens.size() != 6) {
      fail_line(ErrorKind::parse_error, rl.line,
                "flow line needs: src dst category rate_pps start_s end_s");
    }
    SimFlow flow;
    flow.src = static_cast<NodeId>(parse_int(rl.tokens[0], rl.line, "flow src"));
    flow.dst = static_cast<NodeId>(parse_int(rl.tokens[1], rl.line, "flow dst"));
    require_node(flow.src, rl.line, "flow");
    require_node(flow.dst, rl.line, "flow");
    if (flow.src == flow.dst) {
      fail_line(ErrorKind::semantic_error, rl.line,
                "flow source equals destination");
    }
    flow.category = rl.tokens[2];
    if (!sc.policy.categories.count(flow.category)) {
      fail_line(ErrorKind::semantic_error, rl.line,
                "flow uses unknown category '" + flow.category + "'");
    }
    flow.rate_pps = parse_double(rl.tokens[3], rl.line, "rate");
    if (!(flow.rate_pps > 0) || std::isinf(flow.rate_pps)) {
      fail_line(ErrorKind::parse_error, rl.line, "rate must be > 0");
    }
    flow.start_s = parse_double(rl.tokens[4], rl.line, "start");
    flow.end_s = parse_double(rl.tokens[5], rl.line, "end");
    if (flow.start_s < 0 || flow.end_s < flow.start_s ||
        std::isinf(flow.end_s)) {
      fail_line(ErrorKind::parse_error, rl.line,
                "flow needs 0 <= start_s <= end_s, finite");
    }
    sc.flows.push_back(flow);
  }

  void add_event(const RawLine& rl) {
    if (rl.tokens.size() < 3) {
      fail_line(ErrorKind::parse_error, rl.line,
                "event line needs: t_ms kind args");
    }
    TimelineEvent ev;
    ev.t_ms = parse_int(rl.tokens[0], rl.line, "event time");
    if (ev.t_ms < 0) {
      fail_line(ErrorKind::parse_error, rl.line, "event time must be >= 0");
    }
    if (!sc.events.empty() && sc.events.back().t_ms > ev.t_ms) {
      fail_line(ErrorKind::parse_error, rl.line,
                "event times must be non-decreasing");
    }
    const std::string& kind = rl.tokens[1];
    auto want = [&](std::size_t n, const char* usage) {
      if (rl.tokens.size() != n) {
        fail_line(ErrorKind::parse_error, rl.line,
                  std::string("usage: t_ms ") + usage);
      }
    };
    if (kind == "link_down" || kind == "link_up") {
      want(4, "link_down|link_up a b");
      ev.kind = kind == "link_down" ? TimelineEvent::Kind::link_down
                                    : TimelineEvent::Kind::link_up;
      ev.a = static_cast<NodeId>(parse_int(rl.tokens[2], rl.line, "endpoint"));
      ev.b = static_cast<NodeId>(parse_int(rl.tokens[3], rl.line, "endpoint"));
      bool known = false;
      for (const LinkRecord& l : links) {
        if (l.key == LinkKey::make(ev.a, ev.b)) known = true;
      }
      if (!known) {
        fail_line(ErrorKind::semantic_error, rl.line,
                  "event references unknown link " +
                      to_string(LinkKey::make(ev.a, ev.b)));
      }
    } else if (kind == "node_compromised" || kind == "reconfigure") {
      want(3, "node_compromised|reconfigure node");
      ev.kind = kind == "node_compromised"
                    ? TimelineEvent::Kind::node_compromised
                    : TimelineEvent::Kind::reconfigure;
      ev.a = static_cast<NodeId>(parse_int(rl.tokens[2], rl.line, "node"));
      require_node(ev.a, rl.line, "event");
    } else {
      fail_line(ErrorKind::parse_error, rl.line,
                "unknown event kind '" + kind + "'");
    }
    sc.events.push_back(ev);
  }

  void add_param(const RawLine& rl) {
    if (rl.tokens.size() != 2) {
      fail_line(ErrorKind::parse_error, rl.line,
                "param line needs: key value");
    }
    const std::string& key = rl.tokens[0];
    const std::string& value = rl.tokens[1];
    auto as_int = [&](long long lo, long long hi) {
      long long v = parse_int(value, rl.line, key);
      if (v < lo || v > hi) {
        fail_line(ErrorKind::parse_error, rl.line,
                  key + " out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
      }
      return v;
    };
    auto as_nonneg = [&]() {
      double v = parse_double(value, rl.line, key);
      if (!(v >= 0) || std::isinf(v)) {
        fail_line(ErrorKind::parse_error, rl.line,
                  key + " must be a finite number >= 0");
      }
      return v;
    };
    SimParams& p = sc.params;
    if (key == "seed") {
      p.seed = static_cast<unsigned long long>(
          as_int(0, std::numeric_limits<long long>::max()));
    } else if (key == "max_hops") {
      p.max_hops = static_cast<int>(as_int(0, 1 << 20));
    } else if (key == "ttl") {
      p.ttl = static_cast<int>(as_int(1, 1 << 20));
    } else if (key == "detection_delay_ms") {
      p.detection_delay_ms = as_nonneg();
    } else if (key == "convergence_delay_ms") {
      p.convergence_delay_ms = as_nonneg();
    } else if (key == "recompute_delay_ms") {
      p.recompute_delay_ms = as_nonneg();
    } else if (key == "reconfig_pause_ms") {
      p.reconfig_pause_ms = as_nonneg();
    } else if (key == "status_period_ms") {
      p.status_period_ms = as_nonneg();
    } else if (key == "duration_s") {
      p.duration_s = as_nonneg();
    } else if (key == "baseline_energy_rate") {
      p.baseline_energy_rate = as_nonneg();
    } else if (key == "w_latency") {
      p.weights.w_latency = as_nonneg();
    } else if (key == "w_sync") {
      p.weights.w_sync = as_nonneg();
    } else if (key == "w_energy") {
      p.weights.w_energy = as_nonneg();
    } else if (key == "control_energy_per_forwarder") {
      p.weights.control_energy_per_forwarder = as_nonneg();
    } else if (key == "capacity") {
      sc.placement.capacity = static_cast<int>(as_int(0, 1 << 30));
    } else if (key == "sites") {
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        NodeId site = static_cast<NodeId>(parse_int(item, rl.line, "site"));
        require_node(site, rl.line, "sites param");
        sc.placement.sites.push_back(site);
      }
    } else if (key == "organization") {
      try {
        sc.placement.organization = organization_from_string(value);
      } catch (const Error& e) {
        fail_line(ErrorKind::parse_error, rl.line, e.what());
      }
    } else if (key == "root") {
      NodeId root = static_cast<NodeId>(parse_int(value, rl.line, "root"));
      require_node(root, rl.line, "root param");
      sc.placement.root = root;
    } else if (key == "mode") {
      try {
        sc.mode = sim_mode_from_string(value);
      } catch (const Error& e) {
        fail_line(ErrorKind::parse_error, rl.line, e.what());
      }
    } else {
      fail_line(ErrorKind::parse_error, rl.line,
                "unknown param '" + key + "'");
    }
  }

  Scenario finish() {
    for (const NodeRecord& rec : nodes) {
      if (!rec.team.empty() && !sc.teams.count(rec.team)) {
        fail_line(ErrorKind::semantic_error, node_lines[rec.id],
                  "node " + std::to_string(rec.id) +
                      " names undeclared team '" + rec.team + "'");
      }
    }
    sc.topo = Topology(nodes, links);
    return std::move(sc);
  }
};

std::string format_number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  auto sections = split_sections(text);
  if (!sections.count("nodes")) {
    fail(ErrorKind::parse_error, "missing [nodes] section");
  }
  ScenarioBuilder builder;
  for (const RawLine& rl : sections["nodes"]) builder.add_node(rl);
  for (const RawLine& rl : sections["links"]) builder.add_link(rl);
  for (const RawLine& rl : sections["teams"]) builder.add_team(rl);
  for (const RawLine& rl : sections["policy"]) builder.add_policy(rl);
  for (const RawLine& rl : sections["flows"]) builder.add_flow(rl);
  for (const RawLine& rl : sections["events"]) builder.add_event(rl);
  for (const RawLine& rl : sections["params"]) builder.add_param(rl);
  return builder.finish();
}

std::string render_scenario(const Scenario& scenario) {
  std::ostringstream out;
  out << "[nodes]\n";
  for (const auto& [id, rec] : scenario.topo.nodes()) {
    out << id << ' ' << to_string(rec.kind) << ' '
        << (rec.team.empty() ? "-" : rec.team) << ' '
        << format_number(rec.battery);
    if (rec.sdn_capable) out << " sdn";
    if (rec.controller_candidate) out << " candidate";
    if (rec.compromised) out << " compromised";
    out << '\n';
  }
  out << "[links]\n";
  for (const auto& [key, rec] : scenario.topo.links()) {
    out << key.a << ' ' << key.b << ' ' << format_number(rec.latency_ms);
    if (!rec.up) out << " down";
    out << '\n';
  }
  out << "[teams]\n";
  for (const std::string& team : scenario.teams) out << team << '\n';
  out << "[policy]\n";
  for (const auto& [name, id] : scenario.policy.categories) {
    out << "category " << name << ' ' << id << '\n';
  }
  std::map<AccessId, std::string> names;
  for (const auto& [name, id] : scenario.policy.categories) names[id] = name;
  for (const auto& [team, cleared] : scenario.policy.clearances) {
    out << "clearance " << team;
    std::vector<std::string> sorted;
    for (AccessId id : cleared) sorted.push_back(names.at(id));
    std::sort(sorted.begin(), sorted.end());
    for (const std::string& name : sorted) out << ' ' << name;
    out << '\n';
  }
  out << "[flows]\n";
  for (const SimFlow& f : scenario.flows) {
    out << f.src << ' ' << f.dst << ' ' << f.category << ' '
        << format_number(f.rate_pps) << ' ' << format_number(f.start_s) << ' '
        << format_number(f.end_s) << '\n';
  }
  out << "[events]\n";
  for (const TimelineEvent& ev : scenario.events) {
    out << ev.t_ms << ' ';
    switch (ev.kind) {
      case TimelineEvent::Kind::link_down:
        out << "link_down " << ev.a << ' ' << ev.b;
        break;
      case TimelineEvent::Kind::link_up:
        out << "link_up " << ev.a << ' ' << ev.b;
        break;
      case TimelineEvent::Kind::node_compromised:
        out << "node_compromised " << ev.a;
        break;
      case TimelineEvent::Kind::reconfigure:
        out << "reconfigure " << ev.a;
        break;
    }
    out << '\n';
  }
  const SimParams& p = scenario.params;
  out << "[params]\n";
  out << "mode " << to_string(scenario.mode) << '\n';
  out << "seed " << p.seed << '\n';
  out << "max_hops " << p.max_hops << '\n';
  out << "ttl " << p.ttl << '\n';
  out << "detection_delay_ms " << format_number(p.detection_delay_ms) << '\n';
  out << "convergence_delay_ms " << format_number(p.convergence_delay_ms)
      << '\n';
  out << "recompute_delay_ms " << format_number(p.recompute_delay_ms) << '\n';
  out << "reconfig_pause_ms " << format_number(p.reconfig_pause_ms) << '\n';
  out << "status_period_ms " << format_number(p.status_period_ms) << '\n';
  out << "duration_s " << format_number(p.duration_s) << '\n';
  out << "baseline_energy_rate " << format_number(p.baseline_energy_rate)
      << '\n';
  out << "w_latency " << format_number(p.weights.w_latency) << '\n';
  out << "w_sync " << format_number(p.weights.w_sync) << '\n';
  out << "w_energy " << format_number(p.weights.w_energy) << '\n';
  out << "control_energy_per_forwarder "
      << format_number(p.weights.control_energy_per_forwarder) << '\n';
  out << "capacity " << scenario.placement.capacity << '\n';
  if (!scenario.placement.sites.empty()) {
    out << "sites ";
    for (std::size_t i = 0; i < scenario.placement.sites.size(); ++i) {
      if (i) out << ',';
      out << scenario.placement.sites[i];
    }
    out << '\n';
  }
  out << "organization " << to_string(scenario.placement.organization) << '\n';
  if (scenario.placement.root) out << "root " << *scenario.placement.root << '\n';
  return out.str();
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorKind::invalid_scenario, "cannot open scenario file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const Error& e) {
    fail(e.kind(), path + ": " + e.what());
  }
}

}  // namespace smanet

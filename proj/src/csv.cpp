#include "smanet/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace smanet {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string metrics_csv(
    const std::vector<std::pair<SimMode, SimResult>>& runs) {
  std::set<NodeId> ids;
  for (const auto& [mode, r] : runs) {
    for (const auto& [id, e] : r.energy) ids.insert(id);
  }
  std::ostringstream out;
  out << "mode,seed,injected,delivered,dropped_policy,dropped_loss,ttl_drops,"
         "in_flight,mean_delivery_delay_ms,recovery_count,recovery_latency_ms,"
         "ntk_violations,controller_messages,status_updates,energy_total";
  for (NodeId id : ids) out << ",energy_" << id;
  out << '\n';
  for (const auto& [mode, r] : runs) {
    const Metrics& m = r.metrics;
    std::string recoveries;
    for (std::size_t i = 0; i < m.recovery_latency_ms.size(); ++i) {
      if (i) recoveries += ';';
      recoveries += csv_fixed(m.recovery_latency_ms[i]);
    }
    out << to_string(mode) << ',' << r.seed << ',' << m.injected << ','
        << m.delivered << ',' << m.dropped_policy << ',' << m.dropped_loss
        << ',' << m.ttl_drops << ',' << m.in_flight << ','
        << csv_fixed(m.mean_delivery_delay_ms()) << ','
        << m.recovery_latency_ms.size() << ',' << csv_escape(recoveries) << ','
        << m.ntk_violations << ',' << m.controller_messages << ','
        << m.status_updates << ',' << csv_fixed(r.energy_total);
    for (NodeId id : ids) {
      auto it = r.energy.find(id);
      out << ',' << csv_fixed(it == r.energy.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
  return out.str();
}

std::string plan_csv(const DeploymentPlan& plan, int budget) {
  std::ostringstream out;
  out << "kind,a,b,value\n";
  out << "budget,,," << budget << '\n';
  out << "objective,,," << plan.objective << '\n';
  for (NodeId id : plan.upgrades.members) {
    out << "upgrade," << id << ",,\n";
  }
  for (const auto& [pair, count] : plan.per_pair) {
    out << "pair," << pair.first << ',' << pair.second << ',' << count << '\n';
  }
  return out.str();
}

std::string placement_csv(const Placement& placement,
                          const PlacementCost& cost) {
  std::ostringstream out;
  out << "kind,a,b,value\n";
  out << "organization,,," << to_string(placement.organization) << '\n';
  if (placement.root) out << "root,,," << *placement.root << '\n';
  for (NodeId site : placement.sites) out << "site,,," << site << '\n';
  for (const auto& [forwarder, site] : placement.assignment) {
    out << "assignment," << forwarder << ',' << site << ",\n";
  }
  for (NodeId forwarder : placement.unassigned) {
    out << "unassigned," << forwarder << ",,\n";
  }
  out << "cost,control_latency_ms,," << csv_fixed(cost.control_latency_ms)
      << '\n';
  out << "cost,sync_cost_ms,," << csv_fixed(cost.sync_cost_ms) << '\n';
  out << "cost,energy_penalty,," << csv_fixed(cost.energy_penalty) << '\n';
  out << "cost,total,," << csv_fixed(cost.total) << '\n';
  return out.str();
}

namespace {

std::string render_match(const RuleMatch& match) {
  auto field = [](const std::optional<NodeId>& v) {
    return v ? std::to_string(*v) : std::string("*");
  };
  std::string out = "src=" + field(match.src) + " dst=" + field(match.dst) +
                    " access=" + field(match.access);
  if (match.state) {
    out += " state=" + to_string(match.state->link) + ':' +
           to_string(match.state->required);
  }
  return out;
}

std::string render_flow(const PolicyFlow& flow) {
  return std::to_string(flow.src) + " -> " + std::to_string(flow.dst) +
         " category=" + flow.category;
}

}  // namespace

std::string tables_text(const CompiledPolicy& compiled) {
  std::ostringstream out;
  for (const auto& [node, table] : compiled.tables) {
    out << "table node=" << node << " rules=" << table.rules().size() << '\n';
    for (const FlowRule& rule : table.rules()) {
      out << "  priority=" << rule.priority << ' ' << render_match(rule.match)
          << " action="
          << (rule.action == FlowRule::Action::forward ? "forward" : "drop");
      if (rule.action == FlowRule::Action::forward) {
        out << " next=" << rule.next_hop;
      }
      out << '\n';
    }
  }
  out << "covered flows=" << compiled.covered.size() << '\n';
  for (const PolicyFlow& flow : compiled.covered) {
    out << "  " << render_flow(flow) << '\n';
  }
  out << "uncovered flows=" << compiled.uncovered.size() << '\n';
  for (const PolicyFlow& flow : compiled.uncovered) {
    out << "  " << render_flow(flow) << '\n';
  }
  return out.str();
}

}  // namespace smanet

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "smanet/deployment.hpp"
#include "smanet/placement.hpp"
#include "smanet/policy.hpp"
#include "smanet/sim.hpp"

namespace smanet {

// Quotes a field per RFC 4180 when it holds a comma, quote, or newline.
std::string csv_escape(const std::string& field);

// Fixed six decimal places; all CSV floats use this so diffs stay stable.
std::string csv_fixed(double v);

// One row per run. Per-node energy columns cover the union of node ids.
std::string metrics_csv(const std::vector<std::pair<SimMode, SimResult>>& runs);

// Long format: budget/objective rows, one row per upgraded node, one row per
// pair with its selectable-path count.
std::string plan_csv(const DeploymentPlan& plan, int budget);

// Long format: organization/root/site rows, forwarder assignments, cost
// breakdown.
std::string placement_csv(const Placement& placement, const PlacementCost& cost);

// Human-readable dump of compiled rule tables plus flow coverage.
std::string tables_text(const CompiledPolicy& compiled);

}  // namespace smanet

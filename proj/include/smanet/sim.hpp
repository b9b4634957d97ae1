#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "smanet/scenario.hpp"

namespace smanet {

// One unit of reconfiguration work costs as much as reconf_factor of the
// baseline drain over reconf_window_s; a status report likewise over
// status_window_s. With one reconfiguration per window the overhead ratio
// equals the factor exactly.
struct EnergyParams {
  double baseline_rate = 1.0;
  double reconf_factor = 0.20;
  double status_factor = 0.01;
  double reconf_window_s = 20.0;
  double status_window_s = 3.0;

  double e_reconf() const {
    return reconf_factor * baseline_rate * reconf_window_s;
  }
  double e_status() const {
    return status_factor * baseline_rate * status_window_s;
  }
};

struct EnergyBreakdown {
  double baseline = 0.0;
  double reconf_overhead = 0.0;
  double status_overhead = 0.0;

  double total() const { return baseline + reconf_overhead + status_overhead; }
  double overhead_ratio() const {
    return baseline > 0 ? (reconf_overhead + status_overhead) / baseline : 0.0;
  }
};

// Per-node energy over a run: baseline drain plus per-event overheads.
// Counts must be non-negative and duration_s >= 0.
EnergyBreakdown energy_model(long long reconfigurations,
                             long long status_updates, double duration_s,
                             const EnergyParams& params = {});

struct Metrics {
  long long injected = 0;
  long long delivered = 0;
  long long dropped_policy = 0;
  long long dropped_loss = 0;   // link loss, no route, or ttl expiry
  long long ttl_drops = 0;      // subset of dropped_loss
  long long in_flight = 0;      // packets still queued when the run ends
  long long ntk_violations = 0; // deliveries to an uncleared destination
  long long controller_messages = 0;
  long long status_updates = 0;
  double total_delivery_delay_ms = 0.0;
  std::vector<double> recovery_latency_ms;  // one entry per handled failure

  double mean_delivery_delay_ms() const {
    return delivered > 0 ? total_delivery_delay_ms / delivered : 0.0;
  }
};

struct SimResult {
  SimMode mode = SimMode::centralized;
  unsigned long long seed = 0;
  Metrics metrics;
  std::map<NodeId, double> energy;  // per node; includes baseline drain
  double energy_total = 0.0;
  std::string trace;  // one event per line, microsecond timestamps
};

// Deterministic discrete-event run of the scenario under its own mode and
// seed. The overload pins mode and seed explicitly.
SimResult run(const Scenario& scenario);
SimResult run(const Scenario& scenario, SimMode mode, unsigned long long seed);

// Runs the scenario once per mode (centralized, manet-backup, delegated)
// with the scenario's seed.
std::vector<std::pair<SimMode, SimResult>> compare_modes(
    const Scenario& scenario);

// Relative mean-delay increase of `run` over `baseline`. Throws
// invalid-argument when the baseline delivered nothing or has zero delay.
double delay_overhead(const SimResult& run, const SimResult& baseline);

}  // namespace smanet

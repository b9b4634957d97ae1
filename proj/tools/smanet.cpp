#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "smanet/csv.hpp"
#include "smanet/deployment.hpp"
#include "smanet/placement.hpp"
#include "smanet/policy.hpp"
#include "smanet/scenario.hpp"
#include "smanet/sim.hpp"

namespace {

struct Common {
  std::string scenario;
  std::string out;
  int max_hops = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "scenario file")->required();
  cmd->add_option("--out", c.out, "write output here instead of stdout");
  cmd->add_option("--max-hops", c.max_hops,
                  "cap on path length in hops (default: diameter + 2)");
}

smanet::Scenario load(const Common& c) {
  smanet::Scenario sc = smanet::load_scenario_file(c.scenario);
  if (c.max_hops > 0) sc.params.max_hops = c.max_hops;
  return sc;
}

void write_out(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) {
    smanet::fail(smanet::ErrorKind::invalid_argument,
                 "cannot write output file " + c.out);
  }
  file << text;
}

// Flow endpoints when the scenario declares traffic, otherwise every
// ordered pair.
std::vector<smanet::NodePair> pairs_of(const smanet::Scenario& sc) {
  if (sc.flows.empty()) return smanet::all_ordered_pairs(sc.topo);
  std::vector<smanet::NodePair> pairs;
  for (const smanet::SimFlow& f : sc.flows) {
    smanet::NodePair p{f.src, f.dst};
    bool seen = false;
    for (const smanet::NodePair& q : pairs) seen = seen || q == p;
    if (!seen) pairs.push_back(p);
  }
  return pairs;
}

int run_deploy(const Common& c, int budget) {
  smanet::Scenario sc = load(c);
  smanet::DeploymentPlan plan = smanet::greedy_deploy(
      sc.topo, budget, pairs_of(sc), sc.resolved_max_hops());
  write_out(c, smanet::plan_csv(plan, budget));
  return 0;
}

int run_place(const Common& c, int max_sites, const std::string& org_flag) {
  smanet::Scenario sc = load(c);
  std::vector<smanet::NodeId> candidates = sc.candidates();
  if (candidates.empty()) {
    smanet::fail(smanet::ErrorKind::infeasible,
                 "scenario declares no controller candidates");
  }
  smanet::Organization org = org_flag.empty()
                                 ? sc.placement.organization
                                 : smanet::organization_from_string(org_flag);
  smanet::Placement placement = smanet::local_search_place(
      sc.topo, candidates, max_sites, sc.placement.capacity,
      sc.params.weights, org, sc.params.seed);
  smanet::PlacementCost cost =
      smanet::placement_cost(sc.topo, placement, sc.params.weights);
  write_out(c, smanet::placement_csv(placement, cost));
  return 0;
}

int run_compile(const Common& c) {
  smanet::Scenario sc = load(c);
  smanet::CompiledPolicy compiled = smanet::compile_policy(
      sc.policy, sc.topo, sc.upgrades(), sc.policy_flows());
  write_out(c, smanet::tables_text(compiled));
  return 0;
}

int run_simulate(const Common& c, const std::string& mode_flag,
                 bool seed_set, unsigned long long seed) {
  smanet::Scenario sc = load(c);
  smanet::SimMode mode = mode_flag.empty()
                             ? sc.mode
                             : smanet::sim_mode_from_string(mode_flag);
  smanet::SimResult result =
      smanet::run(sc, mode, seed_set ? seed : sc.params.seed);
  std::string text = result.trace + "\n" + smanet::metrics_csv({{mode, result}});
  write_out(c, text);
  return 0;
}

int run_compare(const Common& c) {
  smanet::Scenario sc = load(c);
  write_out(c, smanet::metrics_csv(smanet::compare_modes(sc)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDN-enabled tactical MANET planning and simulation toolkit"};
  app.require_subcommand(1);

  Common deploy_c, place_c, compile_c, simulate_c, compare_c;
  int budget = 0;
  int max_sites = 0;
  std::string organization;
  std::string mode;
  unsigned long long seed = 0;

  CLI::App* deploy =
      app.add_subcommand("deploy", "choose SDN upgrades under a node budget");
  add_common(deploy, deploy_c);
  deploy->add_option("--budget", budget, "max nodes to upgrade")
      ->required()
      ->check(CLI::NonNegativeNumber);

  CLI::App* place =
      app.add_subcommand("place", "pick controller sites and assignments");
  add_common(place, place_c);
  place->add_option("--max-sites", max_sites, "max controller sites")
      ->required()
      ->check(CLI::PositiveNumber);
  place->add_option("--organization", organization,
                    "controller organization: flat or hier");

  CLI::App* compile =
      app.add_subcommand("compile", "compile policy into per-node rule tables");
  add_common(compile, compile_c);

  CLI::App* simulate =
      app.add_subcommand("simulate", "run one scenario and print trace + metrics");
  add_common(simulate, simulate_c);
  simulate->add_option(
      "--mode", mode, "centralized, manet-backup, or delegated");
  simulate->add_option("--seed", seed, "override the scenario seed");

  CLI::App* compare =
      app.add_subcommand("compare", "run all three modes and print metrics");
  add_common(compare, compare_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (deploy->parsed()) return run_deploy(deploy_c, budget);
    if (place->parsed()) return run_place(place_c, max_sites, organization);
    if (compile->parsed()) return run_compile(compile_c);
    if (simulate->parsed()) {
      return run_simulate(simulate_c, mode, simulate->count("--seed") > 0,
                          seed);
    }
    if (compare->parsed()) return run_compare(compare_c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}

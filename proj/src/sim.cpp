#include "smanet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>
#include <tuple>

#include "smanet/dataplane.hpp"
#include "smanet/placement.hpp"
#include "smanet/policy.hpp"
#include "smanet/routing.hpp"

namespace smanet {

EnergyBreakdown energy_model(long long reconfigurations,
                             long long status_updates, double duration_s,
                             const EnergyParams& params) {
  if (reconfigurations < 0 || status_updates < 0 || duration_s < 0) {
    fail(ErrorKind::invalid_argument, "energy model counts must be >= 0");
  }
  EnergyBreakdown out;
  out.baseline = params.baseline_rate * duration_s;
  out.reconf_overhead = static_cast<double>(reconfigurations) * params.e_reconf();
  out.status_overhead = static_cast<double>(status_updates) * params.e_status();
  return out;
}

namespace {

constexpr int kControlRank = 0;
constexpr int kPacketRank = 1;

long long ms_to_us(double ms) { return std::llround(ms * 1000.0); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

struct Packet {
  long long id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  AccessId access = 0;
  long long inject_us = 0;
  int hops = 0;
};

struct Ev {
  enum class Kind {
    timeline,             // scenario event applied to the live topology
    detect,               // local state machines notice a link transition
    rtt_complete,         // controller report round trip finished
    reconfigure_complete, // controller push applied
    reconvergence,        // routing view caught up with the live topology
    status,               // periodic forwarder -> controller report
    inject,               // next packet of a flow enters at its source
    arrival               // packet reaches a node
  };

  long long t_us = 0;
  int rank = kControlRank;
  long long seq = 0;
  Kind kind = Kind::timeline;

  TimelineEvent tev;        // timeline
  LinkKey link{};           // detect
  bool link_becomes_up = false;
  NodeId node = 0;          // rtt/status/arrival node
  double rtt_ms = 0.0;      // rtt_complete
  std::size_t flow = 0;     // inject
  long long k = 0;          // inject index within the flow
  long long packet = 0;     // arrival
};

struct EvAfter {
  bool operator()(const Ev& a, const Ev& b) const {
    return std::tie(a.t_us, a.rank, a.seq) > std::tie(b.t_us, b.rank, b.seq);
  }
};

class Engine {
 public:
  Engine(const Scenario& sc, SimMode mode, unsigned long long seed)
      : sc_(sc), mode_(mode), seed_(seed), actual_(sc.topo), view_(sc.topo) {}

  SimResult execute() {
    init();
    emit(0, "begin mode=" + std::string(to_string(mode_)) +
                " seed=" + std::to_string(seed_));
    schedule_initial();
    while (!q_.empty()) {
      Ev ev = q_.top();
      q_.pop();
      end_us_ = std::max(end_us_, ev.t_us);
      dispatch(ev);
    }
    return finalize();
  }

 private:
  const Scenario& sc_;
  SimMode mode_;
  unsigned long long seed_;
  Topology actual_;  // ground truth
  Topology view_;    // what default forwarding believes; lags behind actual_

  UpgradeSet S_;
  std::set<NodeId> dst_set_;
  std::vector<PolicyFlow> pflows_;
  std::map<std::size_t, AccessId> flow_access_;
  CompiledPolicy ntk_;
  std::map<NodeId, BackupRules> backups_;
  std::map<NodeId, RuleTable> tables_;

  std::set<NodeId> sites_;
  std::map<NodeId, NodeId> assignment_;
  bool has_controller_ = false;

  std::map<NodeId, long long> pause_until_us_;
  std::map<long long, Packet> packets_;
  long long next_packet_ = 0;

  std::priority_queue<Ev, std::vector<Ev>, EvAfter> q_;
  long long next_seq_ = 0;
  long long end_us_ = 0;
  double duration_s_ = 0.0;
  EnergyParams eparams_;

  Metrics m_;
  std::map<NodeId, double> energy_;
  std::ostringstream trace_;

  void emit(long long t_us, const std::string& rest) {
    trace_ << t_us << ' ' << rest << '\n';
  }

  void push(Ev ev) {
    ev.seq = next_seq_++;
    q_.push(ev);
  }

  void init() {
    S_ = sc_.upgrades();
    pflows_ = sc_.policy_flows();
    for (std::size_t i = 0; i < sc_.flows.size(); ++i) {
      dst_set_.insert(sc_.flows[i].dst);
      flow_access_[i] = sc_.policy.access_of(sc_.flows[i].category);
    }
    duration_s_ = sc_.derived_duration_s();
    end_us_ = std::llround(duration_s_ * 1e6);
    eparams_.baseline_rate = sc_.params.baseline_energy_rate;
    for (const auto& [id, rec] : actual_.nodes()) energy_[id] = 0.0;
    if (mode_ != SimMode::manet_backup && !sc_.placement.sites.empty()) {
      sites_ = std::set<NodeId>(sc_.placement.sites.begin(),
                                sc_.placement.sites.end());
      AssignResult ar =
          assign_forwarders(actual_, sites_, sc_.placement.capacity);
      assignment_ = ar.assignment;
      has_controller_ = true;
    }
    if (mode_ == SimMode::delegated) rebuild_backups();
    rebuild_tables(false);
  }

  void rebuild_backups() {
    backups_.clear();
    for (NodeId s : S_.members) {
      if (dst_set_.empty()) break;
      backups_[s] = precompute_backup_rules(view_, s, dst_set_);
    }
  }

  // Recompiles policy tables against the current routing view and, for the
  // delegated mode, folds the failover rules in. Charging is skipped during
  // init; afterwards a node pays e_reconf whenever its table content changes.
  void rebuild_tables(bool charge) {
    CompiledPolicy compiled = compile_policy(sc_.policy, view_, S_, pflows_);
    std::map<NodeId, RuleTable> fresh;
    for (NodeId s : S_.members) {
      RuleTable table(s);
      if (auto it = compiled.tables.find(s); it != compiled.tables.end()) {
        table = it->second;
      }
      if (mode_ == SimMode::delegated) {
        if (auto it = backups_.find(s); it != backups_.end()) {
          for (const FlowRule& rule : it->second.rules) table.insert(rule);
        }
      }
      if (!table.empty()) fresh[s] = table;
    }
    if (charge) {
      for (NodeId s : S_.members) {
        auto before = tables_.find(s);
        auto after = fresh.find(s);
        bool had = before != tables_.end();
        bool has = after != fresh.end();
        bool changed = had != has || (had && has && !(before->second == after->second));
        if (changed) energy_[s] += eparams_.e_reconf();
      }
    }
    ntk_ = std::move(compiled);
    tables_ = std::move(fresh);
  }

  void refresh_view() {
    view_ = actual_;
    if (mode_ == SimMode::delegated) rebuild_backups();
    rebuild_tables(true);
  }

  void schedule_initial() {
    for (const TimelineEvent& tev : sc_.events) {
      Ev ev;
      ev.t_us = tev.t_ms * 1000;
      ev.rank = kControlRank;
      ev.kind = Ev::Kind::timeline;
      ev.tev = tev;
      push(ev);
    }
    for (std::size_t i = 0; i < sc_.flows.size(); ++i) schedule_inject(i, 0);
    if (has_controller_ && sc_.params.status_period_ms > 0) {
      long long period = ms_to_us(sc_.params.status_period_ms);
      long long horizon = std::llround(duration_s_ * 1e6);
      for (const auto& [node, site] : assignment_) {
        if (sites_.count(node)) continue;  // co-located with its controller
        for (long long k = 1; k * period <= horizon; ++k) {
          Ev ev;
          ev.t_us = k * period;
          ev.rank = kControlRank;
          ev.kind = Ev::Kind::status;
          ev.node = node;
          push(ev);
        }
      }
    }
  }

  void schedule_inject(std::size_t flow, long long k) {
    const SimFlow& f = sc_.flows[flow];
    long long t = std::llround(f.start_s * 1e6) +
                  std::llround(static_cast<double>(k) * 1e6 / f.rate_pps);
    if (t >= std::llround(f.end_s * 1e6)) return;
    Ev ev;
    ev.t_us = t;
    ev.rank = kPacketRank;
    ev.kind = Ev::Kind::inject;
    ev.flow = flow;
    ev.k = k;
    push(ev);
  }

  void dispatch(const Ev& ev) {
    switch (ev.kind) {
      case Ev::Kind::timeline: handle_timeline(ev); break;
      case Ev::Kind::detect: handle_detect(ev); break;
      case Ev::Kind::rtt_complete:
        emit(ev.t_us, "controller-rtt-complete node=" +
                          std::to_string(ev.node) +
                          " rtt_ms=" + fmt(ev.rtt_ms));
        break;
      case Ev::Kind::reconfigure_complete:
        refresh_view();
        emit(ev.t_us, "reconfigure-complete");
        break;
      case Ev::Kind::reconvergence:
        refresh_view();
        emit(ev.t_us, "reconvergence-complete");
        break;
      case Ev::Kind::status: handle_status(ev); break;
      case Ev::Kind::inject: handle_inject(ev); break;
      case Ev::Kind::arrival: handle_arrival(ev.t_us, ev.packet, ev.node); break;
    }
  }

  void handle_timeline(const Ev& ev) {
    const TimelineEvent& tev = ev.tev;
    long long t = ev.t_us;
    switch (tev.kind) {
      case TimelineEvent::Kind::link_down:
      case TimelineEvent::Kind::link_up: {
        bool down = tev.kind == TimelineEvent::Kind::link_down;
        LinkKey key = LinkKey::make(tev.a, tev.b);
        TopologyEvent change{down ? TopologyEvent::Kind::link_down
                                  : TopologyEvent::Kind::link_up,
                             key.a, key.b};
        actual_ = apply_event(actual_, change);
        emit(t, std::string(down ? "link-down" : "link-up") +
                    " a=" + std::to_string(key.a) +
                    " b=" + std::to_string(key.b));
        Ev conv;
        conv.t_us = t + ms_to_us(sc_.params.convergence_delay_ms);
        conv.kind = Ev::Kind::reconvergence;
        push(conv);
        if (mode_ == SimMode::delegated) {
          Ev det;
          det.t_us = t + ms_to_us(sc_.params.detection_delay_ms);
          det.kind = Ev::Kind::detect;
          det.link = key;
          det.link_becomes_up = !down;
          push(det);
          if (down && monitored(key)) {
            m_.recovery_latency_ms.push_back(sc_.params.detection_delay_ms);
          }
        } else if (mode_ == SimMode::manet_backup) {
          if (down) {
            m_.recovery_latency_ms.push_back(sc_.params.convergence_delay_ms);
          }
        } else {
          centralized_report(t, key, down);
        }
        break;
      }
      case TimelineEvent::Kind::node_compromised: {
        TopologyEvent change{TopologyEvent::Kind::node_compromised, tev.a, 0};
        actual_ = apply_event(actual_, change);
        view_ = apply_event(view_, change);
        emit(t, "node-compromised node=" + std::to_string(tev.a));
        rebuild_tables(true);
        break;
      }
      case TimelineEvent::Kind::reconfigure: {
        long long until = t + ms_to_us(sc_.params.reconfig_pause_ms);
        pause_until_us_[tev.a] = until;
        energy_[tev.a] += eparams_.e_reconf();
        emit(t, "reconfigure node=" + std::to_string(tev.a) +
                    " until=" + std::to_string(until));
        break;
      }
    }
  }

  bool monitored(const LinkKey& key) const {
    for (const auto& [node, b] : backups_) {
      for (const LinkStateMachine& machine : b.machines) {
        if (machine.link == key) return true;
      }
    }
    return false;
  }

  // The lower-id endpoint reports the change to its controller over the live
  // topology; the push lands one round trip plus the recompute delay later.
  // With no reachable controller the mode degrades to plain reconvergence.
  void centralized_report(long long t, const LinkKey& key, bool is_failure) {
    NodeId detector = key.a;
    auto assigned = assignment_.find(detector);
    double latency = std::numeric_limits<double>::infinity();
    if (has_controller_ && assigned != assignment_.end()) {
      auto lat = latency_distances(actual_, detector);
      auto it = lat.find(assigned->second);
      if (it != lat.end()) latency = it->second;
    }
    if (std::isinf(latency)) {
      if (is_failure) {
        m_.recovery_latency_ms.push_back(sc_.params.convergence_delay_ms);
      }
      return;
    }
    double rtt = 2.0 * latency;
    m_.controller_messages += 2;
    Ev rc;
    rc.t_us = t + ms_to_us(rtt);
    rc.kind = Ev::Kind::rtt_complete;
    rc.node = detector;
    rc.rtt_ms = rtt;
    push(rc);
    Ev done;
    done.t_us = t + ms_to_us(rtt) + ms_to_us(sc_.params.recompute_delay_ms);
    done.kind = Ev::Kind::reconfigure_complete;
    push(done);
    if (is_failure) {
      m_.recovery_latency_ms.push_back(rtt + sc_.params.recompute_delay_ms);
    }
  }

  void handle_detect(const Ev& ev) {
    TopologyEvent change{ev.link_becomes_up ? TopologyEvent::Kind::link_up
                                            : TopologyEvent::Kind::link_down,
                         ev.link.a, ev.link.b};
    for (auto& [node, b] : backups_) {
      for (LinkStateMachine& machine : b.machines) {
        if (machine.link == ev.link) {
          machine = transition(machine, change);
          emit(ev.t_us, "detect node=" + std::to_string(node) + " link=" +
                            to_string(ev.link) + " state=" +
                            to_string(machine.state));
        }
      }
    }
  }

  void handle_status(const Ev& ev) {
    m_.controller_messages += 1;
    m_.status_updates += 1;
    energy_[ev.node] += eparams_.e_status();
    emit(ev.t_us, "status-update node=" + std::to_string(ev.node) +
                      " site=" + std::to_string(assignment_.at(ev.node)));
  }

  void handle_inject(const Ev& ev) {
    const SimFlow& f = sc_.flows[ev.flow];
    Packet p;
    p.id = next_packet_++;
    p.src = f.src;
    p.dst = f.dst;
    p.access = flow_access_.at(ev.flow);
    p.inject_us = ev.t_us;
    packets_[p.id] = p;
    m_.injected += 1;
    emit(ev.t_us, "packet-inject id=" + std::to_string(p.id) +
                      " src=" + std::to_string(p.src) +
                      " dst=" + std::to_string(p.dst) +
                      " access=" + std::to_string(p.access));
    schedule_inject(ev.flow, ev.k + 1);
    handle_arrival(ev.t_us, p.id, p.src);
  }

  LinkStates states_at(NodeId node) const {
    LinkStates st;
    if (auto it = backups_.find(node); it != backups_.end()) {
      for (const LinkStateMachine& machine : it->second.machines) {
        st[machine.link] = machine.state;
      }
    }
    return st;
  }

  void drop(long long t, Packet& p, NodeId node, const char* action,
            const char* reason) {
    emit(t, "packet-hop id=" + std::to_string(p.id) +
                " node=" + std::to_string(node) + " action=" + action +
                " reason=" + reason);
    packets_.erase(p.id);
  }

  void handle_arrival(long long t, long long packet, NodeId node) {
    auto pit = packets_.find(packet);
    if (pit == packets_.end()) return;
    Packet& p = pit->second;

    if (node == p.dst) {
      double delay_ms = static_cast<double>(t - p.inject_us) / 1000.0;
      m_.delivered += 1;
      m_.total_delivery_delay_ms += delay_ms;
      if (!sc_.policy.cleared(actual_.node(node).team, p.access)) {
        m_.ntk_violations += 1;
      }
      emit(t, "packet-hop id=" + std::to_string(p.id) +
                  " node=" + std::to_string(node) +
                  " action=deliver delay_ms=" + fmt(delay_ms));
      packets_.erase(pit);
      return;
    }

    if (auto pu = pause_until_us_.find(node);
        pu != pause_until_us_.end() && t < pu->second) {
      emit(t, "packet-hop id=" + std::to_string(p.id) +
                  " node=" + std::to_string(node) +
                  " action=pause until=" + std::to_string(pu->second));
      Ev ev;
      ev.t_us = pu->second;
      ev.rank = kPacketRank;
      ev.kind = Ev::Kind::arrival;
      ev.packet = p.id;
      ev.node = node;
      push(ev);
      return;
    }

    NodeId next = 0;
    bool decided = false;
    if (auto it = tables_.find(node); it != tables_.end()) {
      PacketHeader header{p.src, p.dst, p.access};
      MatchDecision d = match_rule(it->second, header, states_at(node));
      if (d.kind == MatchDecision::Kind::drop) {
        m_.dropped_policy += 1;
        drop(t, p, node, "drop-policy", "ntk");
        return;
      }
      if (d.kind == MatchDecision::Kind::forward) {
        next = d.next_hop;
        decided = true;
      }
    }
    if (!decided) {
      try {
        next = legacy_next_hop(view_, node, p.dst);
      } catch (const Error&) {
        m_.dropped_loss += 1;
        drop(t, p, node, "drop-loss", "no-route");
        return;
      }
    }

    if (p.hops + 1 > sc_.params.ttl) {
      m_.dropped_loss += 1;
      m_.ttl_drops += 1;
      drop(t, p, node, "drop-loss", "ttl");
      return;
    }
    if (!actual_.has_link(node, next) || !actual_.link_up(node, next)) {
      m_.dropped_loss += 1;
      drop(t, p, node, "drop-loss", "link-down");
      return;
    }

    p.hops += 1;
    emit(t, "packet-hop id=" + std::to_string(p.id) +
                " node=" + std::to_string(node) +
                " action=forward next=" + std::to_string(next));
    Ev ev;
    ev.t_us = t + ms_to_us(actual_.link(node, next).latency_ms);
    ev.rank = kPacketRank;
    ev.kind = Ev::Kind::arrival;
    ev.packet = p.id;
    ev.node = next;
    push(ev);
  }

  SimResult finalize() {
    m_.in_flight = static_cast<long long>(packets_.size());
    SimResult out;
    out.mode = mode_;
    out.seed = seed_;
    for (auto& [id, e] : energy_) e += eparams_.baseline_rate * duration_s_;
    double total = 0.0;
    for (const auto& [id, e] : energy_) total += e;
    out.energy = energy_;
    out.energy_total = total;
    emit(end_us_,
         "end injected=" + std::to_string(m_.injected) +
             " delivered=" + std::to_string(m_.delivered) +
             " dropped_policy=" + std::to_string(m_.dropped_policy) +
             " dropped_loss=" + std::to_string(m_.dropped_loss) +
             " ttl_drops=" + std::to_string(m_.ttl_drops) +
             " in_flight=" + std::to_string(m_.in_flight) +
             " controller_messages=" + std::to_string(m_.controller_messages));
    out.metrics = m_;
    out.trace = trace_.str();
    return out;
  }
};

}  // namespace

SimResult run(const Scenario& scenario) {
  return run(scenario, scenario.mode, scenario.params.seed);
}

SimResult run(const Scenario& scenario, SimMode mode,
              unsigned long long seed) {
  Engine engine(scenario, mode, seed);
  return engine.execute();
}

std::vector<std::pair<SimMode, SimResult>> compare_modes(
    const Scenario& scenario) {
  std::vector<std::pair<SimMode, SimResult>> out;
  for (SimMode mode : {SimMode::centralized, SimMode::manet_backup,
                       SimMode::delegated}) {
    out.emplace_back(mode, run(scenario, mode, scenario.params.seed));
  }
  return out;
}

double delay_overhead(const SimResult& run, const SimResult& baseline) {
  double base = baseline.metrics.mean_delivery_delay_ms();
  if (baseline.metrics.delivered == 0 || base <= 0.0) {
    fail(ErrorKind::invalid_argument,
         "delay overhead needs a baseline with deliveries");
  }
  return (run.metrics.mean_delivery_delay_ms() - base) / base;
}

}  // namespace smanet

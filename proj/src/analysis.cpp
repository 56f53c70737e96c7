#include "splitnet/analysis.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace splitnet {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kSplitterProperty: return "splitter-property";
    case ViolationKind::kLemma1Wires: return "lemma1-wires";
    case ViolationKind::kLemma1Splitters: return "lemma1-splitters";
    case ViolationKind::kTreeBlocker: return "tree-blocker";
    case ViolationKind::kStageBlocker: return "stage-blocker";
    case ViolationKind::kNetworkOverflow: return "network-overflow";
    case ViolationKind::kDuplicateName: return "duplicate-name";
    case ViolationKind::kDepthBound: return "depth-bound";
    case ViolationKind::kRegisterSemantics: return "register-semantics";
  }
  return "?";
}

namespace {

struct Exit {
  NodeId node;
  Outcome outcome;
  WireTarget next;
  std::size_t event;
};

struct ProcRecord {
  std::vector<NodeId> entered;
  std::vector<Exit> outcomes;
  std::uint32_t register_ops = 0;
  bool in_visit = false;

  std::optional<NodeId> name() const {
    if (!outcomes.empty() && outcomes.back().outcome == Outcome::kStop) return outcomes.back().node;
    return std::nullopt;
  }
  bool overflowed() const {
    return !outcomes.empty() && outcomes.back().outcome != Outcome::kStop && outcomes.back().next.is_exit();
  }
};

// One pass over the trace, shared by every check.
class TraceIndex {
 public:
  explicit TraceIndex(const Trace& trace) {
    regs_through_.reserve(trace.events.size());
    for (ProcessId pid = 0; pid < trace.header.processes; ++pid) procs_[pid];
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const auto& ev = trace.events[i];
      if (const auto* r = std::get_if<RegisterEvent>(&ev)) {
        schedule_.push_back(r->pid);
        ProcRecord& rec = procs_[r->pid];
        ++rec.register_ops;
        if (!rec.in_visit) {
          rec.entered.push_back(r->node);
          rec.in_visit = true;
        }
      } else {
        const auto& o = std::get<OutcomeEvent>(ev);
        ProcRecord& rec = procs_[o.pid];
        rec.outcomes.push_back({o.node, o.outcome, o.next, i});
        rec.in_visit = false;
      }
      regs_through_.push_back(schedule_.size());
    }
  }

  const std::map<ProcessId, ProcRecord>& procs() const { return procs_; }

  std::vector<ProcessId> prefix(std::size_t event) const {
    return {schedule_.begin(), schedule_.begin() + static_cast<std::ptrdiff_t>(regs_through_.at(event))};
  }
  const std::vector<ProcessId>& schedule() const { return schedule_; }

 private:
  std::map<ProcessId, ProcRecord> procs_;
  std::vector<ProcessId> schedule_;
  std::vector<std::size_t> regs_through_;
};

// Entrants of a node set, how many stopped inside, and the outcomes that
// carried processes out of it.
struct SetFlow {
  std::uint32_t entrants = 0;
  std::uint32_t stopped = 0;
  std::uint32_t unresolved = 0;
  std::vector<Exit> leaving;
  std::size_t last_event = 0;
};

// One pass over the trace for a partition of nodes into `keys` sets.
// `key` maps a node to its set, or nullopt when it belongs to none.
std::vector<SetFlow> flows_by(const TraceIndex& index, std::size_t keys,
                              const std::function<std::optional<std::size_t>(NodeId)>& key) {
  std::vector<SetFlow> flows(keys);
  std::map<std::size_t, bool> touched;  // set -> resolved, for one process
  for (const auto& [pid, rec] : index.procs()) {
    touched.clear();
    for (NodeId v : rec.entered) {
      if (auto k = key(v)) touched.try_emplace(*k, false);
    }
    for (const Exit& e : rec.outcomes) {
      const auto k = key(e.node);
      if (!k) continue;
      SetFlow& f = flows[*k];
      f.last_event = std::max(f.last_event, e.event);
      if (e.outcome == Outcome::kStop) {
        ++f.stopped;
        touched[*k] = true;
      } else if (e.next.is_exit() || key(e.next.node()) != k) {
        f.leaving.push_back(e);
        touched[*k] = true;
      }
    }
    for (const auto& [k, resolved] : touched) {
      ++flows[k].entrants;
      if (!resolved) ++flows[k].unresolved;
    }
  }
  return flows;
}

SetFlow flow_through(const TraceIndex& index, const std::function<bool(NodeId)>& inside) {
  return flows_by(index, 1, [&](NodeId id) { return inside(id) ? std::optional<std::size_t>{0} : std::nullopt; })[0];
}

std::string node_location(NodeId id) { return "node " + std::to_string(id); }

std::string region_location(const Region& r) {
  std::ostringstream os;
  os << to_string(r.kind) << " stage " << r.stage;
  if (r.kind == RegionKind::kTree) os << " tree " << r.tree;
  return os.str();
}

std::vector<Violation> splitter_violations(const TraceIndex& index) {
  std::vector<Violation> out;
  std::map<NodeId, std::vector<ProcessId>> invokers;
  std::map<NodeId, std::vector<Exit>> completions;
  std::map<NodeId, std::vector<ProcessId>> completers;
  for (const auto& [pid, rec] : index.procs()) {
    for (NodeId v : rec.entered) invokers[v].push_back(pid);
    for (const Exit& e : rec.outcomes) {
      completions[e.node].push_back(e);
      completers[e.node].push_back(pid);
    }
  }
  for (auto& [node, exits] : completions) {
    std::sort(exits.begin(), exits.end(), [](const Exit& a, const Exit& b) { return a.event < b.event; });
    std::size_t stops = 0;
    bool stop_or_right = false, stop_or_down = false;
    for (const Exit& e : exits) {
      if (e.outcome == Outcome::kStop && ++stops == 2) {
        out.push_back({ViolationKind::kSplitterProperty, node_location(node),
                       "more than one process obtained Stop", index.prefix(e.event)});
      }
      stop_or_right |= e.outcome != Outcome::kDown;
      stop_or_down |= e.outcome != Outcome::kRight;
    }
    const std::size_t invoked = invokers[node].size();
    if (invoked == 1 && exits.size() == 1 && exits[0].outcome != Outcome::kStop) {
      out.push_back({ViolationKind::kSplitterProperty, node_location(node),
                     "a solo process obtained " + std::string(to_string(exits[0].outcome)),
                     index.prefix(exits[0].event)});
    }
    if (exits.size() >= 2 && exits.size() == invoked) {
      if (!stop_or_right) {
        out.push_back({ViolationKind::kSplitterProperty, node_location(node),
                       "every process obtained Down", index.prefix(exits.back().event)});
      }
      if (!stop_or_down) {
        out.push_back({ViolationKind::kSplitterProperty, node_location(node),
                       "every process obtained Right", index.prefix(exits.back().event)});
      }
    }
  }
  return out;
}

// `known` lets check_all hand in a flow it already computed for every region.
GridOutputs grid_outputs_from(const TraceIndex& index, const Topology& t, const Region& grid,
                              std::size_t* last_event, const SetFlow* known = nullptr) {
  if (grid.kind != RegionKind::kGrid) throw AnalysisError(region_location(grid) + " is not a grid");
  const auto region = t.region_of(grid.entry);
  auto inside = [&](NodeId id) { return t.region_of(id) == region; };
  const SetFlow f = known ? *known : flow_through(index, inside);
  if (f.unresolved > 0) {
    throw AnalysisError(region_location(grid) + ": " + std::to_string(f.unresolved) +
                        " entrant(s) neither stopped nor left");
  }
  GridOutputs g;
  g.region = region.value_or(0);
  g.stage = grid.stage;
  g.side = grid.size;
  g.entrants = f.entrants;
  g.stopped = f.stopped;
  g.left = static_cast<std::uint32_t>(f.leaving.size());
  std::set<std::pair<NodeId, Outcome>> wires;
  std::set<NodeId> splitters;
  for (const Exit& e : f.leaving) {
    wires.insert({e.node, e.outcome});
    splitters.insert(e.node);
  }
  g.nonempty_output_wires = static_cast<std::uint32_t>(wires.size());
  g.nonempty_output_splitters = static_cast<std::uint32_t>(splitters.size());
  if (last_event) *last_event = f.last_event;
  return g;
}

std::vector<Violation> lemma1_violations(const TraceIndex& index, const Topology& t, const Region& grid,
                                         const SetFlow* known = nullptr) {
  std::size_t last = 0;
  const GridOutputs g = grid_outputs_from(index, t, grid, &last, known);
  std::vector<Violation> out;
  if (g.stopped == g.entrants) return out;
  const auto m = std::uint64_t{g.side};
  if (std::uint64_t{g.nonempty_output_wires} + g.stopped < m + 1) {
    out.push_back({ViolationKind::kLemma1Wires, region_location(grid),
                   std::to_string(g.nonempty_output_wires) + " nonempty output wires + " +
                       std::to_string(g.stopped) + " stopped < m + 1 = " + std::to_string(m + 1),
                   index.prefix(last)});
  }
  if (std::uint64_t{g.nonempty_output_splitters} + g.stopped < m) {
    out.push_back({ViolationKind::kLemma1Splitters, region_location(grid),
                   std::to_string(g.nonempty_output_splitters) + " nonempty output splitters + " +
                       std::to_string(g.stopped) + " stopped < m = " + std::to_string(m),
                   index.prefix(last)});
  }
  return out;
}

std::vector<Violation> name_violations(const TraceIndex& index) {
  std::vector<Violation> out;
  std::map<NodeId, ProcessId> owner;
  for (const auto& [pid, rec] : index.procs()) {
    auto name = rec.name();
    if (!name) continue;
    auto [it, fresh] = owner.try_emplace(*name, pid);
    if (!fresh) {
      out.push_back({ViolationKind::kDuplicateName, node_location(*name),
                     "processes " + std::to_string(it->second) + " and " + std::to_string(pid) +
                         " share a name",
                     index.prefix(rec.outcomes.back().event)});
    }
  }
  return out;
}

std::vector<Violation> blocker_violations(const TraceIndex& index, const Topology& t) {
  if (!t.is_labeled()) throw AnalysisError("blocker checks need a topology with region labels");
  std::vector<Violation> out;

  const auto region_flows = flows_by(index, t.regions().size(), [&](NodeId id) { return t.region_of(id); });
  for (std::size_t r = 0; r < t.regions().size(); ++r) {
    const Region& region = t.regions()[r];
    const SetFlow& f = region_flows[r];
    if (region.kind != RegionKind::kTree) continue;
    if (f.entrants == 0 || f.entrants > region.size || f.unresolved > 0) continue;
    if (f.stopped == 0) {
      out.push_back({ViolationKind::kTreeBlocker, region_location(region),
                     std::to_string(f.entrants) + " entrant(s) into a " + std::to_string(region.size) +
                         "-node tree and none stopped",
                     index.prefix(f.last_event)});
    }
  }

  const auto& stages = t.meta().stages;
  // Position in meta().stages, for nodes whose stage is listed there.
  auto stage_of = [&](NodeId id) -> std::optional<std::size_t> {
    const std::uint32_t stage = t.node(id).label->stage;
    for (std::size_t i = stage < stages.size() ? stage : 0; i < stages.size(); ++i) {
      if (stages[i].index == stage) return i;
    }
    return std::nullopt;
  };
  const auto stage_flows = flows_by(index, stages.size(), stage_of);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const StageInfo& s = stages[i];
    const SetFlow& f = stage_flows[i];
    if (f.entrants == 0 || f.entrants > s.n || f.unresolved > 0) continue;
    const std::uint32_t need = std::min(f.entrants, ceil_sqrt(s.n));
    if (f.stopped < need) {
      out.push_back({ViolationKind::kStageBlocker, "stage " + std::to_string(s.index),
                     std::to_string(f.entrants) + " entrant(s), " + std::to_string(f.stopped) +
                         " stopped, need " + std::to_string(need),
                     index.prefix(f.last_event)});
    }
  }

  const auto& networks = t.meta().networks;
  const auto network_flows = flows_by(index, networks.size(), [&](NodeId id) -> std::optional<std::size_t> {
    const auto stage = stage_of(id);
    if (!stage) return std::nullopt;
    for (std::size_t i = 0; i < networks.size(); ++i) {
      if (networks[i].index == stages[*stage].network) return i;
    }
    return std::nullopt;
  });
  for (std::size_t i = 0; i < networks.size(); ++i) {
    const NetworkInfo& n = networks[i];
    const SetFlow& f = network_flows[i];
    if (f.entrants == 0 || f.entrants > n.n || f.leaving.empty()) continue;
    out.push_back({ViolationKind::kNetworkOverflow, "network " + std::to_string(n.index),
                   std::to_string(f.leaving.size()) + " of " + std::to_string(f.entrants) +
                       " entrant(s) fell through a network built for " + std::to_string(n.n),
                   index.prefix(f.leaving.front().event)});
  }

  auto names = name_violations(index);
  out.insert(out.end(), names.begin(), names.end());
  return out;
}

std::vector<Violation> bound_violations(const TraceIndex& index, const Topology& t) {
  std::vector<Violation> out;
  const std::uint32_t depth = network_depth(t);
  for (const auto& [pid, rec] : index.procs()) {
    const auto visits = static_cast<std::uint32_t>(rec.entered.size());
    if (visits > depth) {
      out.push_back({ViolationKind::kDepthBound, "process " + std::to_string(pid),
                     std::to_string(visits) + " visits exceed depth " + std::to_string(depth), index.schedule()});
    }
    if (std::uint64_t{rec.register_ops} > 4 * std::uint64_t{visits}) {
      out.push_back({ViolationKind::kDepthBound, "process " + std::to_string(pid),
                     std::to_string(rec.register_ops) + " register accesses over " + std::to_string(visits) +
                         " visits",
                     index.schedule()});
    }
  }
  return out;
}

}  // namespace

std::map<NodeId, NodeLedger> build_ledger(const Trace& trace) {
  std::map<NodeId, NodeLedger> ledger;
  TraceIndex index(trace);
  for (const auto& [pid, rec] : index.procs()) {
    for (NodeId v : rec.entered) ledger[v].invokers.push_back(pid);
    for (const Exit& e : rec.outcomes) ledger[e.node].completions.emplace_back(pid, e.outcome);
  }
  return ledger;
}

std::vector<Violation> check_splitter_properties(const Trace& trace) {
  TraceIndex index(trace);
  return splitter_violations(index);
}

std::vector<Violation> check_register_semantics(const Trace& trace) {
  std::vector<Violation> out;
  struct Regs {
    std::optional<ProcessId> x;
    bool y = false;
  };
  struct Visit {
    NodeId node = 0;
    Phase expect = Phase::kWriteX;
    std::optional<Outcome> decided;
  };
  std::map<NodeId, Regs> regs;
  std::map<ProcessId, Visit> visits;
  std::size_t steps = 0;
  const auto schedule = trace.schedule();
  auto fail = [&](const std::string& where, const std::string& what) {
    out.push_back({ViolationKind::kRegisterSemantics, where, what,
                   {schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(steps)}});
  };
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const std::string where = "event " + std::to_string(i);
    const auto& ev = trace.events[i];
    if (const auto* r = std::get_if<RegisterEvent>(&ev)) {
      ++steps;
      Visit& v = visits[r->pid];
      if (v.expect == Phase::kWriteX) v.node = r->node;
      if (r->node != v.node || r->phase != v.expect || v.decided) {
        fail(where, "process " + std::to_string(r->pid) + " out of program order");
      }
      Regs& reg = regs[r->node];
      switch (r->phase) {
        case Phase::kWriteX:
          if (r->reg != Register::kX || r->op != Access::kWrite || r->value != RegisterValue{r->pid}) {
            fail(where, "WriteX must write the caller's pid to X");
          }
          reg.x = r->pid;
          v.expect = Phase::kReadY;
          break;
        case Phase::kReadY:
          if (r->reg != Register::kY || r->op != Access::kRead || r->value != RegisterValue{reg.y}) {
            fail(where, "ReadY did not return the latest value of Y");
          }
          // Branch on what the process saw so one bad read is reported once.
          if (const bool* seen = std::get_if<bool>(&r->value); seen ? *seen : reg.y) {
            v.decided = Outcome::kRight;
          } else {
            v.expect = Phase::kWriteY;
          }
          break;
        case Phase::kWriteY:
          if (r->reg != Register::kY || r->op != Access::kWrite || r->value != RegisterValue{true}) {
            fail(where, "WriteY must write true to Y");
          }
          reg.y = true;
          v.expect = Phase::kReadX;
          break;
        case Phase::kReadX: {
          const RegisterValue latest = reg.x ? RegisterValue{*reg.x} : RegisterValue{std::monostate{}};
          if (r->reg != Register::kX || r->op != Access::kRead || r->value != latest) {
            fail(where, "ReadX did not return the latest value of X");
          }
          const ProcessId* seen = std::get_if<ProcessId>(&r->value);
          v.decided = (seen ? std::optional<ProcessId>{*seen} : reg.x) == r->pid ? Outcome::kStop : Outcome::kDown;
          break;
        }
        case Phase::kDone:
          fail(where, "register access in Done phase");
          break;
      }
    } else {
      const auto& o = std::get<OutcomeEvent>(ev);
      Visit& v = visits[o.pid];
      if (!v.decided || *v.decided != o.outcome || v.node != o.node) {
        fail(where, "outcome for process " + std::to_string(o.pid) + " does not follow from its reads");
      }
      v = Visit{};
    }
  }
  return out;
}

GridOutputs grid_outputs(const Trace& trace, const Topology& t, const Region& grid) {
  TraceIndex index(trace);
  return grid_outputs_from(index, t, grid, nullptr);
}

std::vector<Violation> check_lemma1(const Trace& trace, const Topology& t, const Region& grid) {
  TraceIndex index(trace);
  return lemma1_violations(index, t, grid);
}

std::vector<Violation> check_blockers(const Trace& trace, const Topology& t) {
  TraceIndex index(trace);
  return blocker_violations(index, t);
}

std::vector<Violation> check_bounds(const Trace& trace, const Topology& t) {
  TraceIndex index(trace);
  return bound_violations(index, t);
}

std::vector<Violation> check_all(const Trace& trace, const Topology& t) {
  TraceIndex index(trace);
  std::vector<Violation> out = check_register_semantics(trace);
  auto append = [&](std::vector<Violation> more) {
    out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  };
  append(splitter_violations(index));
  const auto flows = flows_by(index, t.regions().size(), [&](NodeId id) { return t.region_of(id); });
  for (std::size_t i = 0; i < t.regions().size(); ++i) {
    const Region& r = t.regions()[i];
    if (r.kind != RegionKind::kGrid) continue;
    try {
      append(lemma1_violations(index, t, r, &flows[i]));
    } catch (const AnalysisError&) {
      // Entrants still inside the grid: the inequalities do not apply yet.
    }
  }
  if (t.is_labeled()) {
    append(blocker_violations(index, t));
  } else {
    append(name_violations(index));
  }
  append(bound_violations(index, t));
  return out;
}

std::uint32_t design_capacity(const Topology& t) {
  const auto& meta = t.meta();
  switch (meta.kind) {
    case TopologyKind::kGrid:
    case TopologyKind::kFull:
      return meta.param;
    case TopologyKind::kAdaptive:
      return meta.networks.empty() ? 0 : meta.networks.back().n;
    case TopologyKind::kTree:
    case TopologyKind::kStage:
    case TopologyKind::kCustom:
      return 1;
  }
  return 0;
}

std::vector<Violation> check_result(const ExecutionResult& result, const Topology& t) {
  std::vector<Violation> out;
  std::map<NodeId, ProcessId> owner;
  for (ProcessId pid = 0; pid < result.status.size(); ++pid) {
    const auto& s = result.status[pid];
    if (!s.finished()) continue;
    auto [it, fresh] = owner.try_emplace(s.node, pid);
    if (!fresh) {
      out.push_back({ViolationKind::kDuplicateName, node_location(s.node),
                     "processes " + std::to_string(it->second) + " and " + std::to_string(pid) + " share a name",
                     {}});
    }
  }
  const auto processes = static_cast<std::uint32_t>(result.status.size());
  const std::uint32_t capacity = t.kind() == TopologyKind::kStage || t.kind() == TopologyKind::kTree ||
                                         t.kind() == TopologyKind::kCustom
                                     ? 0
                                     : design_capacity(t);
  if (processes <= capacity && result.overflow_count() > 0) {
    out.push_back({ViolationKind::kNetworkOverflow, "network",
                   std::to_string(result.overflow_count()) + " process(es) overflowed with " +
                       std::to_string(processes) + " <= " + std::to_string(capacity) + " participants",
                   {}});
  }
  const std::uint32_t depth = network_depth(t);
  for (ProcessId pid = 0; pid < result.status.size(); ++pid) {
    if (result.visits[pid] > depth || std::uint64_t{result.register_ops[pid]} > 4 * std::uint64_t{result.visits[pid]}) {
      out.push_back({ViolationKind::kDepthBound, "process " + std::to_string(pid),
                     std::to_string(result.visits[pid]) + " visits, " + std::to_string(result.register_ops[pid]) +
                         " register accesses, depth " + std::to_string(depth),
                     {}});
    }
  }
  return out;
}

Metrics compute_metrics(const Trace& trace, const Topology& t) {
  TraceIndex index(trace);
  Metrics m;
  for (const auto& [pid, rec] : index.procs()) {
    m.per_process_visits[pid] = static_cast<std::uint32_t>(rec.entered.size());
    m.per_process_register_ops[pid] = rec.register_ops;
    if (auto name = rec.name()) {
      m.names_assigned.insert(*name);
      ++m.finished;
      if (*name < t.node_count()) {
        if (const auto& label = t.node(*name).label) ++m.stops_per_stage[label->stage];
      }
    } else if (rec.overflowed()) {
      ++m.overflowed;
    }
  }
  if (!m.names_assigned.empty()) m.max_name = *m.names_assigned.rbegin();
  for (const Region& r : t.regions()) {
    if (r.kind != RegionKind::kGrid) continue;
    try {
      m.grids.push_back(grid_outputs_from(index, t, r, nullptr));
    } catch (const AnalysisError&) {
    }
  }
  return m;
}

}  // namespace splitnet

#include <algorithm>
#include <numeric>
#include <sstream>

#include "schedule_rng.hpp"
#include "splitnet/engine.hpp"
#include "splitnet/topology_io.hpp"

namespace splitnet {

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kRoundRobin: return "round_robin";
    case Policy::kRandom: return "random";
    case Policy::kAdversary: return "adversary";
    case Policy::kReplay: return "replay";
  }
  return "?";
}

std::optional<Policy> policy_from_string(std::string_view s) {
  for (Policy p : {Policy::kRoundRobin, Policy::kRandom, Policy::kAdversary, Policy::kReplay}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

std::size_t ExecutionResult::finished_count() const {
  return static_cast<std::size_t>(
      std::count_if(status.begin(), status.end(), [](const ProcessStatus& s) { return s.finished(); }));
}

std::size_t ExecutionResult::overflow_count() const {
  return static_cast<std::size_t>(
      std::count_if(status.begin(), status.end(), [](const ProcessStatus& s) { return s.overflowed(); }));
}

std::vector<NodeId> ExecutionResult::names() const {
  std::vector<NodeId> out;
  for (const auto& s : status) {
    if (s.finished()) out.push_back(s.node);
  }
  return out;
}

ExecutionResult make_result(const Topology& t, std::vector<ProcessStatus> status,
                            std::vector<std::uint32_t> visits,
                            std::vector<std::uint32_t> register_ops) {
  ExecutionResult r;
  r.status = std::move(status);
  r.visits = std::move(visits);
  r.register_ops = std::move(register_ops);
  for (const auto& s : r.status) {
    if (!s.finished()) continue;
    if (const auto& label = t.node(s.node).label) ++r.stops_per_stage[label->stage];
    if (auto region = t.region_of(s.node)) ++r.stops_per_region[*region];
  }
  return r;
}

std::uint64_t step_budget(const Topology& t, std::uint32_t processes) {
  return 8 * std::uint64_t{t.node_count()} * processes;
}

Simulator::Simulator(const Topology& t, std::uint32_t processes, bool record_trace)
    : topology_(&t),
      splitters_(t.node_count()),
      procs_(processes),
      active_(processes),
      budget_(step_budget(t, processes)),
      record_(record_trace) {
  if (t.node_count() == 0 && processes > 0) throw ContractViolation("cannot run processes on an empty topology");
  for (ProcessId pid = 0; pid < processes; ++pid) {
    procs_[pid].pid = pid;
    procs_[pid].status = {ProcessStatus::Kind::kRunning, t.entry()};
    procs_[pid].visits = 1;
  }
}

void Simulator::step(ProcessId pid) {
  if (pid >= procs_.size()) throw ContractViolation("unknown process " + std::to_string(pid));
  ProcessState& ps = procs_[pid];
  if (!ps.status.running()) throw ContractViolation("process " + std::to_string(pid) + " is not running");
  if (++steps_ > budget_) {
    std::ostringstream os;
    os << "step budget " << budget_ << " exceeded (" << procs_.size() << " processes, "
       << topology_->node_count() << " nodes, process " << pid << " at node " << ps.status.node << ")";
    throw StepBudgetExceeded(os.str());
  }
  const NodeId v = ps.status.node;
  auto [cursor, ev] = splitnet::step(splitters_[v], ps.cursor, pid, v);
  ++ps.register_ops;
  if (record_) events_.emplace_back(ev);
  ps.cursor = cursor;
  if (!cursor.done()) return;

  ps.history.push_back({v, cursor.outcome});
  OutcomeEvent oe{pid, v, cursor.outcome, WireTarget::exit()};
  if (cursor.outcome == Outcome::kStop) {
    ps.status = {ProcessStatus::Kind::kFinished, v};
    --active_;
  } else {
    const WireTarget& w =
        topology_->node(v).wire(cursor.outcome == Outcome::kRight ? Port::kRight : Port::kDown);
    oe.next = w;
    if (w.is_exit()) {
      ps.status = {ProcessStatus::Kind::kOverflowed, v};
      --active_;
    } else {
      ps.status.node = w.node();
      ps.cursor = StepCursor{};
      ++ps.visits;
    }
  }
  if (record_) events_.emplace_back(oe);
}

ExecutionResult Simulator::result() const {
  std::vector<ProcessStatus> status;
  std::vector<std::uint32_t> visits, ops;
  for (const auto& ps : procs_) {
    status.push_back(ps.status);
    visits.push_back(ps.visits);
    ops.push_back(ps.register_ops);
  }
  return make_result(*topology_, std::move(status), std::move(visits), std::move(ops));
}

namespace {

constexpr int phase_rank(Phase p) { return static_cast<int>(p); }

// Collision-seeking heuristic. If some node holds two or more running
// processes, advance the least-progressed process there (lockstep through
// the splitter program). Otherwise advance a process with the most register
// operations so far, delaying the laggards. Ties are broken by the seeded
// generator.
class Adversary {
 public:
  explicit Adversary(std::uint32_t node_count) : count_(node_count, 0) {}

  ProcessId pick(const Simulator& sim, const std::vector<ProcessId>& active, detail::ScheduleRng& rng) {
    const auto& procs = sim.processes();
    NodeId best_node = 0;
    std::uint32_t best_count = 1;
    for (ProcessId pid : active) {
      const NodeId v = procs[pid].status.node;
      const std::uint32_t c = ++count_[v];
      if (c > best_count || (c == best_count && c > 1 && v < best_node)) {
        best_count = c;
        best_node = v;
      }
    }
    for (ProcessId pid : active) count_[procs[pid].status.node] = 0;

    candidates_.clear();
    if (best_count >= 2) {
      int lowest = phase_rank(Phase::kDone);
      for (ProcessId pid : active) {
        if (procs[pid].status.node != best_node) continue;
        const int rank = phase_rank(procs[pid].cursor.phase);
        if (rank < lowest) {
          lowest = rank;
          candidates_.clear();
        }
        if (rank == lowest) candidates_.push_back(pid);
      }
    } else {
      std::uint32_t most = 0;
      for (ProcessId pid : active) {
        const std::uint32_t ops = procs[pid].register_ops;
        if (candidates_.empty() || ops > most) {
          most = ops;
          candidates_.clear();
        }
        if (ops == most) candidates_.push_back(pid);
      }
    }
    return candidates_[rng.below(candidates_.size())];
  }

 private:
  std::vector<std::uint32_t> count_;
  std::vector<ProcessId> candidates_;
};

}  // namespace

Run simulate(const Topology& t, std::uint32_t processes, Policy policy, std::uint64_t seed) {
  if (policy == Policy::kReplay) throw ContractViolation("simulate needs a scheduling policy; use replay()");
  Simulator sim(t, processes);
  std::vector<ProcessId> active(processes);
  std::iota(active.begin(), active.end(), ProcessId{0});
  detail::ScheduleRng rng(seed);
  Adversary adversary(t.node_count());
  std::size_t turn = 0;

  while (!active.empty()) {
    std::size_t index = 0;
    switch (policy) {
      case Policy::kRoundRobin:
        index = turn % active.size();
        break;
      case Policy::kRandom:
        index = static_cast<std::size_t>(rng.below(active.size()));
        break;
      case Policy::kAdversary: {
        const ProcessId pid = adversary.pick(sim, active, rng);
        index = static_cast<std::size_t>(std::find(active.begin(), active.end(), pid) - active.begin());
        break;
      }
      case Policy::kReplay:
        break;
    }
    const ProcessId pid = active[index];
    sim.step(pid);
    if (!sim.running(pid)) {
      // Keep pid order for round robin; order is irrelevant otherwise.
      if (policy == Policy::kRoundRobin) {
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(index));
        turn = index;
      } else {
        active[index] = active.back();
        active.pop_back();
      }
    } else {
      turn = index + 1;
    }
  }

  TraceHeader header{topology_hash(t), processes, std::string(to_string(policy)), seed};
  ExecutionResult result = sim.result();
  return Run{std::move(result), sim.take_trace(std::move(header))};
}

Run replay(const Topology& t, std::span<const ProcessId> schedule,
           std::optional<std::uint32_t> processes) {
  std::uint32_t p = 0;
  if (processes) {
    p = *processes;
  } else if (!schedule.empty()) {
    p = *std::max_element(schedule.begin(), schedule.end()) + 1;
  }
  Simulator sim(t, p);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ProcessId pid = schedule[i];
    if (pid >= p) throw ReplayError("process " + std::to_string(pid) + " does not exist", i);
    if (!sim.running(pid)) throw ReplayError("process " + std::to_string(pid) + " has already finished", i);
    sim.step(pid);
  }
  TraceHeader header{topology_hash(t), p, std::string(to_string(Policy::kReplay)), 0};
  ExecutionResult result = sim.result();
  return Run{std::move(result), sim.take_trace(std::move(header))};
}

}  // namespace splitnet

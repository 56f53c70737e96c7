#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "splitnet/splitter.hpp"
#include "splitnet/topology.hpp"
#include "splitnet/trace.hpp"

namespace splitnet {

enum class Policy : std::uint8_t { kRoundRobin, kRandom, kAdversary, kReplay };

std::string_view to_string(Policy p);
std::optional<Policy> policy_from_string(std::string_view s);

struct ProcessStatus {
  enum class Kind : std::uint8_t { kRunning, kFinished, kOverflowed };
  Kind kind = Kind::kRunning;
  // Running: current node. Finished: the acquired name. Overflowed: the
  // node whose exit wire the process left through.
  NodeId node = 0;

  bool running() const { return kind == Kind::kRunning; }
  bool finished() const { return kind == Kind::kFinished; }
  bool overflowed() const { return kind == Kind::kOverflowed; }

  friend bool operator==(const ProcessStatus&, const ProcessStatus&) = default;
};

struct HistoryEntry {
  NodeId node = 0;
  Outcome outcome = Outcome::kStop;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct ProcessState {
  ProcessId pid = 0;
  ProcessStatus status;
  StepCursor cursor;
  std::uint32_t visits = 0;
  std::uint32_t register_ops = 0;
  std::vector<HistoryEntry> history;
};

struct ExecutionResult {
  std::vector<ProcessStatus> status;  // indexed by pid
  std::vector<std::uint32_t> visits;
  std::vector<std::uint32_t> register_ops;
  std::map<std::uint32_t, std::uint32_t> stops_per_stage;
  std::map<std::size_t, std::uint32_t> stops_per_region;  // keyed by Topology::regions() index

  std::size_t finished_count() const;
  std::size_t overflow_count() const;
  // Names of finished processes, in pid order.
  std::vector<NodeId> names() const;
};

// Fills the per-stage and per-region stop counts from statuses.
ExecutionResult make_result(const Topology& t, std::vector<ProcessStatus> status,
                            std::vector<std::uint32_t> visits,
                            std::vector<std::uint32_t> register_ops);

class StepBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayError : public std::runtime_error {
 public:
  ReplayError(const std::string& what, std::size_t step)
      : std::runtime_error("schedule step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// 8 * node_count * processes; twice the most steps any run can take.
std::uint64_t step_budget(const Topology& t, std::uint32_t processes);

// Single-threaded driver: processes 0..p-1 start at the entry and advance
// one register access per step() call. The topology must outlive it.
class Simulator {
 public:
  Simulator(const Topology& t, std::uint32_t processes, bool record_trace = true);

  // Throws ContractViolation if pid is unknown or no longer running, and
  // StepBudgetExceeded once the budget is spent.
  void step(ProcessId pid);

  bool running(ProcessId pid) const { return procs_.at(pid).status.running(); }
  bool all_done() const { return active_ == 0; }
  std::uint32_t active_count() const { return active_; }
  std::uint64_t steps_taken() const { return steps_; }
  std::uint32_t process_count() const { return static_cast<std::uint32_t>(procs_.size()); }

  const Topology& topology() const { return *topology_; }
  const std::vector<ProcessState>& processes() const { return procs_; }
  const std::vector<SplitterState>& splitters() const { return splitters_; }
  const std::vector<TraceEvent>& events() const { return events_; }

  ExecutionResult result() const;
  Trace trace(TraceHeader header) const { return Trace{std::move(header), events_}; }
  Trace take_trace(TraceHeader header) { return Trace{std::move(header), std::move(events_)}; }

 private:
  const Topology* topology_;
  std::vector<SplitterState> splitters_;
  std::vector<ProcessState> procs_;
  std::vector<TraceEvent> events_;
  std::uint32_t active_ = 0;
  std::uint64_t steps_ = 0;
  std::uint64_t budget_ = 0;
  bool record_ = true;
};

struct Run {
  ExecutionResult result;
  Trace trace;
};

// Runs every process to completion under `policy`. Deterministic in
// (topology, processes, policy, seed). kReplay is not a valid policy here.
Run simulate(const Topology& t, std::uint32_t processes, Policy policy, std::uint64_t seed);

// Re-executes a recorded schedule. The process count defaults to
// max(pid) + 1. A prefix schedule leaves the remaining processes running.
Run replay(const Topology& t, std::span<const ProcessId> schedule,
           std::optional<std::uint32_t> processes = std::nullopt);

struct ThreadOptions {
  std::uint64_t seed = 0;
  // Sprinkle yields between register accesses to diversify interleavings.
  bool jitter = true;
};

// Each run spawns `processes` threads that walk the network over shared
// atomic registers. Any worker failure is rethrown after the run joins.
std::vector<ExecutionResult> execute_threads(const Topology& t, std::uint32_t processes,
                                             std::uint32_t runs, ThreadOptions options = {});

}  // namespace splitnet

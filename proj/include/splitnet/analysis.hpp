#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitnet/engine.hpp"
#include "splitnet/topology.hpp"
#include "splitnet/trace.hpp"

namespace splitnet {

enum class ViolationKind : std::uint8_t {
  kSplitterProperty,
  kLemma1Wires,
  kLemma1Splitters,
  kTreeBlocker,
  kStageBlocker,
  kNetworkOverflow,
  kDuplicateName,
  kDepthBound,
  kRegisterSemantics,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind = ViolationKind::kSplitterProperty;
  std::string location;
  std::string detail;
  // Steps up to the point the violation became observable; feed to replay().
  std::vector<ProcessId> schedule_prefix;
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-splitter view of a trace.
struct NodeLedger {
  std::vector<ProcessId> invokers;  // processes with at least one register access
  std::vector<std::pair<ProcessId, Outcome>> completions;
};

std::map<NodeId, NodeLedger> build_ledger(const Trace& trace);

// At most one Stop; a lone invoker that completes Stops; when two or more
// processes invoked and every invoker completed, someone got Stop or Right
// and someone got Stop or Down. Processes cut off mid-visit (schedule
// prefixes) only count toward the first property.
std::vector<Violation> check_splitter_properties(const Trace& trace);

// Each read returns the latest write to its register, and each outcome
// follows from the reads that preceded it.
std::vector<Violation> check_register_semantics(const Trace& trace);

struct GridOutputs {
  std::size_t region = 0;
  std::uint32_t stage = 0;
  std::uint32_t side = 0;
  std::uint32_t entrants = 0;
  std::uint32_t stopped = 0;
  std::uint32_t left = 0;
  std::uint32_t nonempty_output_wires = 0;
  std::uint32_t nonempty_output_splitters = 0;
};

// Counts for one grid region. Throws AnalysisError if the region is not a
// grid or some entrant neither stopped inside nor left it.
GridOutputs grid_outputs(const Trace& trace, const Topology& t, const Region& grid);

// Unless every entrant stopped inside the grid:
//   nonempty output wires + stopped >= m + 1
//   nonempty output splitters + stopped >= m
std::vector<Violation> check_lemma1(const Trace& trace, const Topology& t, const Region& grid);

// Trees entered by 1..size processes stop someone; a stage with parameter n
// entered by k <= n processes stops min(k, ceil(sqrt n)); a full network
// entered by at most n processes loses nobody; all names are distinct.
// Throws AnalysisError on a topology without region labels.
std::vector<Violation> check_blockers(const Trace& trace, const Topology& t);

// Visits per process stay within the network depth and register accesses
// within 4 per visit.
std::vector<Violation> check_bounds(const Trace& trace, const Topology& t);

// Everything above that applies. Grid regions with unresolved entrants are
// skipped, and blocker checks need a labelled topology.
std::vector<Violation> check_all(const Trace& trace, const Topology& t);

// Result-only checks for runs without a trace (the threaded executor):
// distinct names, no overflow when processes <= capacity, depth and
// register-operation bounds.
std::vector<Violation> check_result(const ExecutionResult& result, const Topology& t);

// Largest number of processes the topology is designed to name.
std::uint32_t design_capacity(const Topology& t);

struct Metrics {
  std::set<NodeId> names_assigned;
  std::optional<NodeId> max_name;
  std::map<ProcessId, std::uint32_t> per_process_visits;
  std::map<ProcessId, std::uint32_t> per_process_register_ops;
  std::map<std::uint32_t, std::uint32_t> stops_per_stage;
  std::vector<GridOutputs> grids;  // grid regions whose entrants all resolved
  std::uint32_t finished = 0;
  std::uint32_t overflowed = 0;
};

Metrics compute_metrics(const Trace& trace, const Topology& t);

}  // namespace splitnet

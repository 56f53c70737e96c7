#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "splitnet/splitter.hpp"
#include "splitnet/topology.hpp"

namespace splitnet {

// A process finishing one splitter visit. `next` is only meaningful for
// Right and Down.
struct OutcomeEvent {
  ProcessId pid = 0;
  NodeId node = 0;
  Outcome outcome = Outcome::kStop;
  WireTarget next;

  friend bool operator==(const OutcomeEvent&, const OutcomeEvent&) = default;
};

using TraceEvent = std::variant<RegisterEvent, OutcomeEvent>;

struct TraceHeader {
  std::string topology_hash;
  std::uint32_t processes = 0;
  std::string policy;
  std::uint64_t seed = 0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;

  // One entry per register event: the pid that took that atomic step.
  std::vector<ProcessId> schedule() const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// JSON Lines: a header object, then one object per event.
//   {"splitnet_trace":1,"topology_hash":..,"processes":..,"policy":..,"seed":..}
//   {"pid":0,"node":3,"phase":"write_x","register":"X","op":"write","value":0}
//   {"pid":0,"node":3,"outcome":"down","next":5}
std::string write_trace(const Trace& trace);
Trace read_trace(std::string_view text);

// Schedules are a JSON array of pids.
std::string write_schedule(const std::vector<ProcessId>& schedule);
std::vector<ProcessId> read_schedule(std::string_view text);

}  // namespace splitnet

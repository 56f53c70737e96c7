#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitnet/analysis.hpp"
#include "splitnet/topology.hpp"

namespace splitnet {

struct ExploreOptions {
  // Refuse instances whose interleaving estimate exceeds this.
  std::uint64_t interleaving_bound = 1'000'000'000'000ull;
  // Abort if more distinct states than this would have to be stored.
  std::uint64_t state_cap = 20'000'000ull;
  // Merge schedules that reach an identical state. Counts stay exact; with
  // memoize off every interleaving is walked and checked one by one.
  bool memoize = true;
  // Stop recording violations after this many (they are still counted).
  std::size_t max_reported = 16;
};

struct PropertyReport {
  std::uint64_t interleavings = 0;  // complete schedules
  std::uint64_t estimate = 0;       // upper bound computed before the search
  std::uint64_t states = 0;         // distinct states expanded (memoized mode)
  std::uint64_t terminal_checks = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;
  // Per-process outcome strings such as "S", "R", "DS" (one letter per visit).
  std::set<std::vector<std::string>> outcome_vectors;
  std::uint32_t min_stops = 0;
  std::uint32_t max_stops = 0;
};

class ExplorationRefused : public std::runtime_error {
 public:
  ExplorationRefused(const std::string& what, std::uint64_t estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  std::uint64_t estimate() const { return estimate_; }

 private:
  std::uint64_t estimate_;
};

// Multinomial bound on the number of interleavings: each process takes at
// most 4 * depth steps. Saturates at UINT64_MAX.
std::uint64_t estimate_interleavings(const Topology& t, std::uint32_t processes);

// Depth-first enumeration of every scheduler choice. Every complete
// schedule is checked with check_all(); violations carry their schedule.
PropertyReport explore_exhaustive(const Topology& t, std::uint32_t processes, ExploreOptions options = {});

}  // namespace splitnet

#include "splitnet/explore.hpp"

#include <limits>
#include <unordered_map>

#include "splitnet/engine.hpp"
#include "splitnet/topology_io.hpp"

namespace splitnet {

std::uint64_t estimate_interleavings(const Topology& t, std::uint32_t processes) {
  const std::uint64_t per_process = 4 * std::uint64_t{network_depth(t)};
  // Product of binomials C(k * per, per) for k = 1..p, saturating.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  long double total = 1.0L;
  std::uint64_t placed = 0;
  for (std::uint32_t k = 0; k < processes; ++k) {
    for (std::uint64_t i = 1; i <= per_process; ++i) total = total * static_cast<long double>(placed + i) / i;
    placed += per_process;
    if (total >= static_cast<long double>(kMax)) return kMax;
  }
  return static_cast<std::uint64_t>(total + 0.5L);
}

namespace {

char outcome_letter(Outcome o) {
  switch (o) {
    case Outcome::kStop: return 'S';
    case Outcome::kRight: return 'R';
    case Outcome::kDown: return 'D';
  }
  return '?';
}

class Explorer {
 public:
  Explorer(const Topology& t, std::uint32_t processes, const ExploreOptions& options)
      : t_(t), processes_(processes), options_(options), hash_(topology_hash(t)) {}

  PropertyReport run() {
    report_.estimate = estimate_interleavings(t_, processes_);
    if (report_.estimate > options_.interleaving_bound) {
      throw ExplorationRefused("about " + std::to_string(report_.estimate) +
                                   " interleavings exceed the enumeration bound of " +
                                   std::to_string(options_.interleaving_bound),
                               report_.estimate);
    }
    report_.min_stops = std::numeric_limits<std::uint32_t>::max();
    Simulator root(t_, processes_);
    report_.interleavings = visit(root);
    if (report_.terminal_checks == 0) report_.min_stops = 0;
    return report_;
  }

 private:
  std::uint64_t visit(const Simulator& sim) {
    if (sim.all_done()) return leaf(sim);
    std::string key;
    if (options_.memoize) {
      key = encode(sim);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    std::uint64_t total = 0;
    for (ProcessId pid = 0; pid < processes_; ++pid) {
      if (!sim.running(pid)) continue;
      Simulator next = sim;
      next.step(pid);
      total += visit(next);
    }
    if (options_.memoize) {
      if (++report_.states > options_.state_cap) {
        throw ExplorationRefused("state cap of " + std::to_string(options_.state_cap) + " reached",
                                 report_.estimate);
      }
      memo_.emplace(std::move(key), total);
    }
    return total;
  }

  std::uint64_t leaf(const Simulator& sim) {
    ++report_.terminal_checks;
    const Trace trace = sim.trace({hash_, processes_, "explore", 0});
    for (Violation& v : check_all(trace, t_)) {
      ++report_.violation_count;
      if (report_.violations.size() < options_.max_reported) report_.violations.push_back(std::move(v));
    }
    std::vector<std::string> vec;
    std::uint32_t stops = 0;
    for (const ProcessState& ps : sim.processes()) {
      std::string s;
      for (const HistoryEntry& h : ps.history) s += outcome_letter(h.outcome);
      vec.push_back(std::move(s));
      stops += ps.status.finished() ? 1 : 0;
    }
    report_.outcome_vectors.insert(std::move(vec));
    report_.min_stops = std::min(report_.min_stops, stops);
    report_.max_stops = std::max(report_.max_stops, stops);
    return 1;
  }

  // Everything that determines the future and the final verdicts: register
  // contents plus each process's cursor, position and outcome history.
  std::string encode(const Simulator& sim) const {
    std::string key;
    auto put = [&key](std::uint32_t v) { key.append(reinterpret_cast<const char*>(&v), sizeof v); };
    for (const SplitterState& s : sim.splitters()) {
      put(s.x ? *s.x + 1 : 0);
      key.push_back(s.y ? 1 : 0);
    }
    for (const ProcessState& ps : sim.processes()) {
      key.push_back(static_cast<char>(ps.status.kind));
      put(ps.status.node);
      key.push_back(static_cast<char>(ps.cursor.phase));
      key.push_back(static_cast<char>(ps.cursor.outcome));
      put(static_cast<std::uint32_t>(ps.history.size()));
      for (const HistoryEntry& h : ps.history) key.push_back(outcome_letter(h.outcome));
    }
    return key;
  }

  const Topology& t_;
  std::uint32_t processes_;
  ExploreOptions options_;
  std::string hash_;
  PropertyReport report_;
  std::unordered_map<std::string, std::uint64_t> memo_;
};

}  // namespace

PropertyReport explore_exhaustive(const Topology& t, std::uint32_t processes, ExploreOptions options) {
  return Explorer(t, processes, options).run();
}

}  // namespace splitnet

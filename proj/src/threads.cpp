#include <exception>
#include <latch>
#include <memory>
#include <thread>

#include "schedule_rng.hpp"
#include "splitnet/engine.hpp"

namespace splitnet {

std::vector<ExecutionResult> execute_threads(const Topology& t, std::uint32_t processes,
                                             std::uint32_t runs, ThreadOptions options) {
  std::vector<ExecutionResult> results;
  results.reserve(runs);
  const std::uint32_t node_count = t.node_count();
  if (node_count == 0 && processes > 0) throw ContractViolation("cannot run processes on an empty topology");

  for (std::uint32_t run = 0; run < runs; ++run) {
    auto registers = std::make_unique<AtomicSplitter[]>(node_count);
    std::vector<ProcessStatus> status(processes);
    std::vector<std::uint32_t> visits(processes, 0), ops(processes, 0);
    std::vector<std::exception_ptr> errors(processes);
    std::latch start(processes);

    auto worker = [&](ProcessId pid) {
      try {
        detail::ScheduleRng rng(options.seed * 0x9e3779b97f4a7c15ull + run * 0x100000001b3ull + pid);
        auto pause = [&] {
          if (options.jitter && rng.below(4) == 0) std::this_thread::yield();
        };
        start.arrive_and_wait();
        NodeId v = t.entry();
        visits[pid] = 1;
        for (;;) {
          const Outcome o = registers[v].visit(pid, pause);
          ops[pid] += o == Outcome::kRight ? 2 : 4;
          if (o == Outcome::kStop) {
            status[pid] = {ProcessStatus::Kind::kFinished, v};
            return;
          }
          const WireTarget& w = t.node(v).wire(o == Outcome::kRight ? Port::kRight : Port::kDown);
          if (w.is_exit()) {
            status[pid] = {ProcessStatus::Kind::kOverflowed, v};
            return;
          }
          v = w.node();
          if (++visits[pid] > node_count) {
            throw StepBudgetExceeded("process " + std::to_string(pid) + " visited more splitters than exist");
          }
        }
      } catch (...) {
        errors[pid] = std::current_exception();
      }
    };

    std::vector<std::thread> threads;
    threads.reserve(processes);
    try {
      for (ProcessId pid = 0; pid < processes; ++pid) threads.emplace_back(worker, pid);
    } catch (...) {
      // Release the workers already parked on the latch before failing.
      start.count_down(static_cast<std::ptrdiff_t>(processes - threads.size()));
      for (auto& th : threads) th.join();
      throw;
    }
    for (auto& th : threads) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    results.push_back(make_result(t, std::move(status), std::move(visits), std::move(ops)));
  }
  return results;
}

}  // namespace splitnet

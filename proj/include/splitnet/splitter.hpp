#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <variant>

#include "splitnet/ids.hpp"

namespace splitnet {

enum class Outcome : std::uint8_t { kStop, kRight, kDown };

// Program counter of one process inside one splitter visit. The program is
//   X := pid; if Y then Right; Y := true; if X == pid then Stop else Down
// and every phase except kDone is exactly one register access.
enum class Phase : std::uint8_t { kWriteX, kReadY, kWriteY, kReadX, kDone };

enum class Register : std::uint8_t { kX, kY };
enum class Access : std::uint8_t { kRead, kWrite };

std::string_view to_string(Outcome o);
std::string_view to_string(Phase p);
std::string_view to_string(Register r);
std::string_view to_string(Access a);
std::optional<Outcome> outcome_from_string(std::string_view s);
std::optional<Phase> phase_from_string(std::string_view s);

// Raised when a caller breaks a precondition of the step protocol.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct StepCursor {
  Phase phase = Phase::kWriteX;
  // Only meaningful once phase == kDone.
  Outcome outcome = Outcome::kStop;

  bool done() const { return phase == Phase::kDone; }
  static StepCursor finished(Outcome o) { return {Phase::kDone, o}; }

  friend bool operator==(const StepCursor&, const StepCursor&) = default;
};

struct SplitterState {
  std::optional<ProcessId> x;  // empty until the first WriteX
  bool y = false;              // only ever goes false -> true

  friend bool operator==(const SplitterState&, const SplitterState&) = default;
};

// monostate is the never-written X register; reading it matches no pid.
using RegisterValue = std::variant<std::monostate, ProcessId, bool>;

struct RegisterEvent {
  ProcessId pid = 0;
  NodeId node = 0;
  Phase phase = Phase::kWriteX;
  Register reg = Register::kX;
  Access op = Access::kWrite;
  RegisterValue value;

  friend bool operator==(const RegisterEvent&, const RegisterEvent&) = default;
};

SplitterState new_splitter();

// Performs the single register access named by `cursor` and returns the
// advanced cursor together with the event describing the access. Throws
// ContractViolation if the cursor is already done.
std::pair<StepCursor, RegisterEvent> step(SplitterState& state, StepCursor cursor,
                                          ProcessId pid, NodeId node = 0);

// Runs one process alone through a fresh splitter.
Outcome run_solo(ProcessId pid);

// The same program over real shared registers, for the threaded executor.
// Every access is an individual seq_cst load or store; no RMW is used.
class AtomicSplitter {
 public:
  // `pause()` runs between consecutive register accesses.
  template <typename Pause>
  Outcome visit(ProcessId pid, Pause&& pause) {
    x_.store(pid, std::memory_order_seq_cst);
    pause();
    if (y_.load(std::memory_order_seq_cst)) return Outcome::kRight;
    pause();
    y_.store(true, std::memory_order_seq_cst);
    pause();
    return x_.load(std::memory_order_seq_cst) == pid ? Outcome::kStop : Outcome::kDown;
  }
  Outcome visit(ProcessId pid) {
    return visit(pid, [] {});
  }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  std::atomic<std::uint64_t> x_{kEmpty};
  std::atomic<bool> y_{false};
};

}  // namespace splitnet

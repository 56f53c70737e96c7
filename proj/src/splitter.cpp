#include "splitnet/splitter.hpp"

#include <string>

namespace splitnet {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kStop: return "stop";
    case Outcome::kRight: return "right";
    case Outcome::kDown: return "down";
  }
  return "?";
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kWriteX: return "write_x";
    case Phase::kReadY: return "read_y";
    case Phase::kWriteY: return "write_y";
    case Phase::kReadX: return "read_x";
    case Phase::kDone: return "done";
  }
  return "?";
}

std::string_view to_string(Register r) { return r == Register::kX ? "X" : "Y"; }
std::string_view to_string(Access a) { return a == Access::kRead ? "read" : "write"; }

std::optional<Outcome> outcome_from_string(std::string_view s) {
  for (Outcome o : {Outcome::kStop, Outcome::kRight, Outcome::kDown}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

std::optional<Phase> phase_from_string(std::string_view s) {
  for (Phase p : {Phase::kWriteX, Phase::kReadY, Phase::kWriteY, Phase::kReadX, Phase::kDone}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

SplitterState new_splitter() { return {}; }

std::pair<StepCursor, RegisterEvent> step(SplitterState& state, StepCursor cursor,
                                          ProcessId pid, NodeId node) {
  RegisterEvent ev;
  ev.pid = pid;
  ev.node = node;
  ev.phase = cursor.phase;
  StepCursor next = cursor;
  switch (cursor.phase) {
    case Phase::kWriteX:
      state.x = pid;
      ev.reg = Register::kX;
      ev.op = Access::kWrite;
      ev.value = pid;
      next.phase = Phase::kReadY;
      break;
    case Phase::kReadY:
      ev.reg = Register::kY;
      ev.op = Access::kRead;
      ev.value = state.y;
      next = state.y ? StepCursor::finished(Outcome::kRight) : StepCursor{Phase::kWriteY};
      break;
    case Phase::kWriteY:
      state.y = true;
      ev.reg = Register::kY;
      ev.op = Access::kWrite;
      ev.value = true;
      next.phase = Phase::kReadX;
      break;
    case Phase::kReadX:
      ev.reg = Register::kX;
      ev.op = Access::kRead;
      if (state.x) {
        ev.value = *state.x;
      } else {
        ev.value = std::monostate{};
      }
      next = StepCursor::finished(state.x == pid ? Outcome::kStop : Outcome::kDown);
      break;
    case Phase::kDone:
      throw ContractViolation("step on a finished splitter visit (pid " + std::to_string(pid) +
                              ", node " + std::to_string(node) + ")");
  }
  return {next, ev};
}

Outcome run_solo(ProcessId pid) {
  SplitterState state = new_splitter();
  StepCursor cursor;
  while (!cursor.done()) cursor = step(state, cursor, pid).first;
  return cursor.outcome;
}

}  // namespace splitnet

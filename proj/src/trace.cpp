#include "splitnet/trace.hpp"

#include <sstream>

#include "json.hpp"

namespace splitnet {

namespace {

using ojson = nlohmann::ordered_json;

ojson value_json(const RegisterValue& v) {
  if (std::holds_alternative<ProcessId>(v)) return std::get<ProcessId>(v);
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v);
  return nullptr;
}

template <typename T>
T get(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw FormatError(std::string("missing \"") + key + "\"", line);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("bad value for \"") + key + "\"", line);
  }
}

RegisterEvent parse_register_event(const nlohmann::json& j, std::size_t line) {
  RegisterEvent ev;
  ev.pid = get<ProcessId>(j, "pid", line);
  ev.node = get<NodeId>(j, "node", line);
  auto phase = phase_from_string(get<std::string>(j, "phase", line));
  if (!phase || *phase == Phase::kDone) throw FormatError("unknown phase", line);
  ev.phase = *phase;
  const auto reg = get<std::string>(j, "register", line);
  if (reg != "X" && reg != "Y") throw FormatError("register must be \"X\" or \"Y\"", line);
  ev.reg = reg == "X" ? Register::kX : Register::kY;
  const auto op = get<std::string>(j, "op", line);
  if (op != "read" && op != "write") throw FormatError("op must be \"read\" or \"write\"", line);
  ev.op = op == "read" ? Access::kRead : Access::kWrite;
  if (!j.contains("value")) throw FormatError("missing \"value\"", line);
  const auto& v = j["value"];
  if (v.is_null()) {
    ev.value = std::monostate{};
  } else if (v.is_boolean()) {
    ev.value = v.get<bool>();
  } else if (v.is_number_unsigned()) {
    ev.value = v.get<ProcessId>();
  } else {
    throw FormatError("bad register value", line);
  }
  return ev;
}

OutcomeEvent parse_outcome_event(const nlohmann::json& j, std::size_t line) {
  OutcomeEvent ev;
  ev.pid = get<ProcessId>(j, "pid", line);
  ev.node = get<NodeId>(j, "node", line);
  auto outcome = outcome_from_string(get<std::string>(j, "outcome", line));
  if (!outcome) throw FormatError("unknown outcome", line);
  ev.outcome = *outcome;
  if (ev.outcome != Outcome::kStop) {
    if (!j.contains("next")) throw FormatError("missing \"next\"", line);
    const auto& n = j["next"];
    if (n.is_string() && n.get<std::string>() == "exit") {
      ev.next = WireTarget::exit();
    } else if (n.is_number_unsigned()) {
      ev.next = WireTarget::to(n.get<NodeId>());
    } else {
      throw FormatError("\"next\" must be a node id or \"exit\"", line);
    }
  }
  return ev;
}

}  // namespace

std::vector<ProcessId> Trace::schedule() const {
  std::vector<ProcessId> out;
  for (const auto& ev : events) {
    if (const auto* r = std::get_if<RegisterEvent>(&ev)) out.push_back(r->pid);
  }
  return out;
}

std::string write_trace(const Trace& trace) {
  std::string out;
  ojson header;
  header["splitnet_trace"] = 1;
  header["topology_hash"] = trace.header.topology_hash;
  header["processes"] = trace.header.processes;
  header["policy"] = trace.header.policy;
  header["seed"] = trace.header.seed;
  out += header.dump();
  out += '\n';
  for (const auto& ev : trace.events) {
    ojson j;
    if (const auto* r = std::get_if<RegisterEvent>(&ev)) {
      j["pid"] = r->pid;
      j["node"] = r->node;
      j["phase"] = to_string(r->phase);
      j["register"] = to_string(r->reg);
      j["op"] = to_string(r->op);
      j["value"] = value_json(r->value);
    } else {
      const auto& o = std::get<OutcomeEvent>(ev);
      j["pid"] = o.pid;
      j["node"] = o.node;
      j["outcome"] = to_string(o.outcome);
      if (o.outcome != Outcome::kStop) {
        j["next"] = o.next.is_exit() ? ojson("exit") : ojson(o.next.node());
      }
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

Trace read_trace(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw FormatError("not valid JSON", lineno);
    }
    if (!j.is_object()) throw FormatError("expected a JSON object", lineno);
    if (!have_header) {
      if (!j.contains("splitnet_trace")) throw FormatError("missing trace header", lineno);
      trace.header.topology_hash = get<std::string>(j, "topology_hash", lineno);
      trace.header.processes = get<std::uint32_t>(j, "processes", lineno);
      trace.header.policy = get<std::string>(j, "policy", lineno);
      trace.header.seed = get<std::uint64_t>(j, "seed", lineno);
      have_header = true;
      continue;
    }
    if (j.contains("register")) {
      trace.events.emplace_back(parse_register_event(j, lineno));
    } else if (j.contains("outcome")) {
      trace.events.emplace_back(parse_outcome_event(j, lineno));
    } else {
      throw FormatError("neither a register nor an outcome event", lineno);
    }
  }
  if (!have_header) throw FormatError("empty trace", lineno + 1);
  return trace;
}

std::string write_schedule(const std::vector<ProcessId>& schedule) {
  return nlohmann::json(schedule).dump() + "\n";
}

std::vector<ProcessId> read_schedule(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<std::vector<ProcessId>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("schedule must be a JSON array of pids: ") + e.what(), 1);
  }
}

}  // namespace splitnet

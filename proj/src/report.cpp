#include "splitnet/report.hpp"

namespace splitnet {

using ojson = nlohmann::ordered_json;

ojson to_json(const BuildReport& report) {
  ojson j;
  j["splitter_count"] = report.splitter_count;
  j["depth"] = report.depth;
  j["stages"] = ojson::array();
  for (const StageReport& s : report.stages) {
    j["stages"].push_back({{"index", s.index},
                           {"n", s.n},
                           {"grid_nodes", s.grid_nodes},
                           {"tree_nodes", s.tree_nodes},
                           {"depth", s.depth}});
  }
  return j;
}

ojson to_json(const Violation& v) {
  return {{"kind", to_string(v.kind)},
          {"location", v.location},
          {"detail", v.detail},
          {"schedule_prefix", v.schedule_prefix}};
}

ojson to_json(const std::vector<Violation>& vs) {
  ojson out = ojson::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

namespace {

template <typename Map>
ojson keyed(const Map& m) {
  ojson j = ojson::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

}  // namespace

ojson to_json(const Metrics& m) {
  ojson j;
  j["names_assigned"] = m.names_assigned;
  j["max_name"] = m.max_name ? ojson(*m.max_name) : ojson(nullptr);
  j["finished"] = m.finished;
  j["overflowed"] = m.overflowed;
  j["per_process_visits"] = keyed(m.per_process_visits);
  j["per_process_register_ops"] = keyed(m.per_process_register_ops);
  j["stops_per_stage"] = keyed(m.stops_per_stage);
  j["grids"] = ojson::array();
  for (const GridOutputs& g : m.grids) {
    j["grids"].push_back({{"stage", g.stage},
                          {"side", g.side},
                          {"entrants", g.entrants},
                          {"stopped", g.stopped},
                          {"left", g.left},
                          {"nonempty_output_wires", g.nonempty_output_wires},
                          {"nonempty_output_splitters", g.nonempty_output_splitters}});
  }
  return j;
}

ojson to_json(const ExecutionResult& r) {
  ojson j;
  ojson status = ojson::array();
  for (const auto& s : r.status) {
    if (s.finished()) {
      status.push_back({{"name", s.node}});
    } else if (s.overflowed()) {
      status.push_back({{"overflow", s.node}});
    } else {
      status.push_back({{"running", s.node}});
    }
  }
  j["status"] = std::move(status);
  j["visits"] = r.visits;
  j["register_ops"] = r.register_ops;
  j["stops_per_stage"] = keyed(r.stops_per_stage);
  return j;
}

ojson to_json(const PropertyReport& r) {
  ojson j;
  j["interleavings"] = r.interleavings;
  j["estimate"] = r.estimate;
  j["states"] = r.states;
  j["terminal_checks"] = r.terminal_checks;
  j["min_stops"] = r.min_stops;
  j["max_stops"] = r.max_stops;
  j["violation_count"] = r.violation_count;
  j["violations"] = to_json(r.violations);
  j["outcome_vectors"] = r.outcome_vectors;
  return j;
}

}  // namespace splitnet

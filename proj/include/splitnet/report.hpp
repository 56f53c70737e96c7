#pragma once

#include "json.hpp"
#include "splitnet/analysis.hpp"
#include "splitnet/engine.hpp"
#include "splitnet/explore.hpp"
#include "splitnet/topology.hpp"

namespace splitnet {

// Schema-stable JSON renderings used by the CLI.
nlohmann::ordered_json to_json(const BuildReport& report);
nlohmann::ordered_json to_json(const Violation& v);
nlohmann::ordered_json to_json(const std::vector<Violation>& vs);
nlohmann::ordered_json to_json(const Metrics& m);
nlohmann::ordered_json to_json(const ExecutionResult& r);
nlohmann::ordered_json to_json(const PropertyReport& r);

}  // namespace splitnet

#pragma once

#include <string>
#include <string_view>

#include "splitnet/topology.hpp"

namespace splitnet {

enum class ExportFormat { kJson, kDot };

// JSON is lossless: import_topology(export_topology(t, kJson)) == t.
std::string export_topology(const Topology& t, ExportFormat format);

// Parses the JSON form. Throws TopologyError on malformed input; does not
// run the structural checks of validate().
Topology import_topology(std::string_view json_text);

// 16 hex digits of FNV-1a over a canonical binary encoding of the topology.
std::string topology_hash(const Topology& t);

}  // namespace splitnet

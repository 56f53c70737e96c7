#include "splitnet/topology_io.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace splitnet {

namespace {

using ojson = nlohmann::ordered_json;

ojson wire_json(const WireTarget& w) {
  if (w.is_exit()) return "exit";
  return w.node();
}

WireTarget wire_from_json(const nlohmann::json& j, NodeId id, const char* port) {
  if (j.is_string() && j.get<std::string>() == "exit") return WireTarget::exit();
  if (j.is_number_unsigned()) return WireTarget::to(j.get<NodeId>());
  throw TopologyError("node " + std::to_string(id) + ": " + port + " must be a node id or \"exit\"");
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw TopologyError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw TopologyError(where + ": bad value for \"" + key + "\"");
  }
}

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) byte(static_cast<std::uint8_t>(v >> (8 * k)));
  }
};

}  // namespace

std::string export_topology(const Topology& t, ExportFormat format) {
  if (format == ExportFormat::kDot) {
    std::ostringstream os;
    os << "digraph splitnet {\n";
    os << "  node [fontsize=10];\n";
    for (NodeId id = 0; id < t.node_count(); ++id) {
      const Node& n = t.node(id);
      os << "  n" << id << " [label=\"" << id;
      if (n.label) {
        os << "\\n" << to_string(n.label->region) << " s" << n.label->stage << " ("
           << n.label->coords[0] << "," << n.label->coords[1] << ")\"";
        os << (n.label->region == RegionKind::kGrid ? ", shape=box" : ", shape=ellipse");
      } else {
        os << "\"";
      }
      os << "];\n";
    }
    for (NodeId id = 0; id < t.node_count(); ++id) {
      for (Port p : {Port::kRight, Port::kDown}) {
        const WireTarget& w = t.node(id).wire(p);
        const char* tag = p == Port::kRight ? "R" : "D";
        const char* style = p == Port::kRight ? "solid" : "dashed";
        if (w.is_exit()) {
          os << "  x" << id << tag << " [shape=point];\n";
          os << "  n" << id << " -> x" << id << tag;
        } else {
          os << "  n" << id << " -> n" << w.node();
        }
        os << " [label=\"" << tag << "\", style=" << style << "];\n";
      }
    }
    os << "  entry [shape=plaintext];\n  entry -> n" << t.entry() << ";\n";
    os << "}\n";
    return os.str();
  }

  ojson j;
  j["node_count"] = t.node_count();
  j["entry"] = t.entry();
  j["kind"] = to_string(t.kind());
  j["param"] = t.meta().param;
  j["tree_attachment"] = to_string(t.meta().attachment);
  j["stages"] = ojson::array();
  for (const StageInfo& s : t.meta().stages) {
    j["stages"].push_back({{"index", s.index}, {"n", s.n}, {"network", s.network}});
  }
  j["networks"] = ojson::array();
  for (const NetworkInfo& n : t.meta().networks) {
    j["networks"].push_back({{"index", n.index},
                             {"n", n.n},
                             {"first_stage", n.first_stage},
                             {"stage_count", n.stage_count}});
  }
  ojson nodes = ojson::array();
  for (NodeId id = 0; id < t.node_count(); ++id) {
    const Node& n = t.node(id);
    ojson nj;
    nj["id"] = id;
    nj["right"] = wire_json(n.right);
    nj["down"] = wire_json(n.down);
    if (n.label) {
      nj["region"] = to_string(n.label->region);
      nj["stage"] = n.label->stage;
      nj["coords"] = {n.label->coords[0], n.label->coords[1]};
    }
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  return j.dump() + "\n";
}

Topology import_topology(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw TopologyError(std::string("topology JSON: ") + e.what());
  }
  if (!j.is_object()) throw TopologyError("topology JSON: expected an object");
  const std::string top = "topology";
  const auto count = field<std::uint32_t>(j, "node_count", top);
  const auto entry = field<NodeId>(j, "entry", top);
  TopologyMeta meta;
  if (j.contains("kind")) {
    auto kind = topology_kind_from_string(field<std::string>(j, "kind", top));
    if (!kind) throw TopologyError("topology: unknown kind");
    meta.kind = *kind;
  }
  if (j.contains("param")) meta.param = field<std::uint32_t>(j, "param", top);
  if (j.contains("tree_attachment")) {
    const auto a = field<std::string>(j, "tree_attachment", top);
    if (a == "merged") {
      meta.attachment = TreeAttachment::kMerged;
    } else if (a == "per_wire") {
      meta.attachment = TreeAttachment::kPerWire;
    } else {
      throw TopologyError("topology: unknown tree_attachment \"" + a + "\"");
    }
  }
  for (const auto& s : j.value("stages", nlohmann::json::array())) {
    meta.stages.push_back({field<std::uint32_t>(s, "index", "stage"), field<std::uint32_t>(s, "n", "stage"),
                           field<std::uint32_t>(s, "network", "stage")});
  }
  for (const auto& n : j.value("networks", nlohmann::json::array())) {
    meta.networks.push_back({field<std::uint32_t>(n, "index", "network"), field<std::uint32_t>(n, "n", "network"),
                             field<std::uint32_t>(n, "first_stage", "network"),
                             field<std::uint32_t>(n, "stage_count", "network")});
  }
  if (!j.contains("nodes") || !j["nodes"].is_array()) throw TopologyError("topology: missing \"nodes\" array");
  const auto& nodes_json = j["nodes"];
  if (nodes_json.size() != count) {
    throw TopologyError("topology: node_count " + std::to_string(count) + " but " +
                        std::to_string(nodes_json.size()) + " nodes listed");
  }
  std::vector<Node> nodes(count);
  std::vector<char> seen(count, 0);
  for (const auto& nj : nodes_json) {
    const auto id = field<NodeId>(nj, "id", "node");
    const std::string where = "node " + std::to_string(id);
    if (id >= count || seen[id]) throw TopologyError(where + ": id out of range or repeated");
    seen[id] = 1;
    Node& n = nodes[id];
    if (!nj.contains("right") || !nj.contains("down")) throw TopologyError(where + ": missing port wiring");
    n.right = wire_from_json(nj["right"], id, "right");
    n.down = wire_from_json(nj["down"], id, "down");
    if (nj.contains("region")) {
      NodeLabel label;
      const auto region = field<std::string>(nj, "region", where);
      if (region == "grid") {
        label.region = RegionKind::kGrid;
      } else if (region == "tree") {
        label.region = RegionKind::kTree;
      } else {
        throw TopologyError(where + ": unknown region \"" + region + "\"");
      }
      label.stage = field<std::uint32_t>(nj, "stage", where);
      const auto coords = field<std::vector<std::uint32_t>>(nj, "coords", where);
      if (coords.size() != 2) throw TopologyError(where + ": coords must have two entries");
      label.coords = {coords[0], coords[1]};
      n.label = label;
    }
  }
  return Topology(std::move(nodes), entry, std::move(meta));
}

std::string topology_hash(const Topology& t) {
  Fnv1a f;
  constexpr std::uint32_t kExit = 0xffffffffu;
  f.u32(t.node_count());
  f.u32(t.entry());
  f.u32(static_cast<std::uint32_t>(t.kind()));
  f.u32(t.meta().param);
  f.u32(static_cast<std::uint32_t>(t.meta().attachment));
  f.u32(static_cast<std::uint32_t>(t.meta().stages.size()));
  f.u32(static_cast<std::uint32_t>(t.meta().networks.size()));
  for (const StageInfo& s : t.meta().stages) {
    f.u32(s.index);
    f.u32(s.n);
    f.u32(s.network);
  }
  for (const NetworkInfo& n : t.meta().networks) {
    f.u32(n.index);
    f.u32(n.n);
    f.u32(n.first_stage);
    f.u32(n.stage_count);
  }
  for (const Node& n : t.nodes()) {
    f.u32(n.right.is_exit() ? kExit : n.right.node());
    f.u32(n.down.is_exit() ? kExit : n.down.node());
    f.byte(n.label ? 1 + static_cast<std::uint8_t>(n.label->region) : 0);
    if (n.label) {
      f.u32(n.label->stage);
      f.u32(n.label->coords[0]);
      f.u32(n.label->coords[1]);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(f.h));
  return buf;
}

}  // namespace splitnet

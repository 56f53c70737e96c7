#include "splitnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace splitnet {

std::string_view to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::kGrid: return "grid";
    case TopologyKind::kTree: return "tree";
    case TopologyKind::kStage: return "stage";
    case TopologyKind::kFull: return "full";
    case TopologyKind::kAdaptive: return "adaptive";
    case TopologyKind::kCustom: return "custom";
  }
  return "?";
}

std::string_view to_string(RegionKind k) { return k == RegionKind::kGrid ? "grid" : "tree"; }

std::string_view to_string(TreeAttachment a) {
  return a == TreeAttachment::kMerged ? "merged" : "per_wire";
}

std::optional<TopologyKind> topology_kind_from_string(std::string_view s) {
  for (auto k : {TopologyKind::kGrid, TopologyKind::kTree, TopologyKind::kStage,
                 TopologyKind::kFull, TopologyKind::kAdaptive, TopologyKind::kCustom}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::uint32_t ceil_sqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return static_cast<std::uint32_t>(r);
}

std::uint32_t ceil_log2(std::uint64_t n) {
  std::uint32_t k = 0;
  while ((std::uint64_t{1} << k) < n) ++k;
  return k;
}

Topology::Topology(std::vector<Node> nodes, NodeId entry, TopologyMeta meta)
    : nodes_(std::move(nodes)), entry_(entry), meta_(std::move(meta)) {
  using Key = std::tuple<std::uint32_t, int, std::uint32_t>;
  std::map<Key, Region> by_key;
  std::optional<Key> last_key;
  Region* last = nullptr;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const auto& label = nodes_[id].label;
    if (!label) continue;
    const bool grid = label->region == RegionKind::kGrid;
    Key key{label->stage, grid ? 0 : 1, grid ? 0 : label->coords[0]};
    bool fresh = false;
    if (key != last_key) {
      auto [it, inserted] = by_key.try_emplace(key);
      fresh = inserted;
      last = &it->second;
      last_key = key;
    }
    Region& r = *last;
    if (fresh) {
      r.kind = label->region;
      r.stage = label->stage;
      r.tree = grid ? 0 : label->coords[0];
      r.entry = id;
    }
    r.nodes.push_back(id);
    if (grid) {
      r.size = std::max(r.size, label->coords[0] + label->coords[1] + 1);
      if (label->coords[0] == 0 && label->coords[1] == 0) r.entry = id;
    } else {
      r.size += 1;
      if (label->coords[1] == 0) r.entry = id;
    }
  }
  region_index_.assign(nodes_.size(), -1);
  for (auto& [key, region] : by_key) {
    for (NodeId id : region.nodes) region_index_[id] = static_cast<std::int64_t>(regions_.size());
    regions_.push_back(std::move(region));
  }
}

std::optional<std::size_t> Topology::region_of(NodeId id) const {
  if (id >= region_index_.size() || region_index_[id] < 0) return std::nullopt;
  return static_cast<std::size_t>(region_index_[id]);
}

bool Topology::is_labeled() const {
  return !nodes_.empty() &&
         std::all_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.label.has_value(); });
}

std::optional<NodeId> Topology::stage_entry(std::uint32_t stage) const {
  for (const Region& r : regions_) {
    if (r.kind == RegionKind::kGrid && r.stage == stage) return r.entry;
  }
  return std::nullopt;
}

namespace {

struct GridParts {
  NodeId entry = 0;
  std::vector<NodeId> anti_diagonal;  // ordered by row j
};

struct StageRange {
  NodeId first = 0;
  NodeId end = 0;
  NodeId entry = 0;
};

TopologyMeta make_meta(TopologyKind kind, std::uint32_t param,
                       TreeAttachment attachment = TreeAttachment::kMerged) {
  TopologyMeta meta;
  meta.kind = kind;
  meta.param = param;
  meta.attachment = attachment;
  return meta;
}

void require_positive(std::uint32_t v, const char* what) {
  if (v == 0) throw TopologyError(std::string(what) + " must be at least 1");
}

GridParts append_grid(std::vector<Node>& out, std::uint32_t m, std::uint32_t stage) {
  const auto base = static_cast<NodeId>(out.size());
  // Row-major: rows are j, row j holds m - j nodes.
  auto id_of = [&](std::uint32_t i, std::uint32_t j) -> NodeId {
    return base + j * (2 * m - j + 1) / 2 + i;
  };
  GridParts parts;
  parts.entry = base;
  for (std::uint32_t j = 0; j < m; ++j) {
    for (std::uint32_t i = 0; i + j < m; ++i) {
      Node node;
      const bool last = i + j == m - 1;
      node.right = last ? WireTarget::exit() : WireTarget::to(id_of(i + 1, j));
      node.down = last ? WireTarget::exit() : WireTarget::to(id_of(i, j + 1));
      node.label = NodeLabel{RegionKind::kGrid, stage, {i, j}};
      out.push_back(node);
      if (last) parts.anti_diagonal.push_back(static_cast<NodeId>(out.size() - 1));
    }
  }
  return parts;
}

NodeId append_tree(std::vector<Node>& out, std::uint32_t size, std::uint32_t stage,
                   std::uint32_t tree_index) {
  const auto base = static_cast<NodeId>(out.size());
  for (std::uint32_t k = 0; k < size; ++k) {
    Node node;
    const std::uint64_t left = 2 * std::uint64_t{k} + 1;
    const std::uint64_t right = left + 1;
    node.right = left < size ? WireTarget::to(base + static_cast<NodeId>(left)) : WireTarget::exit();
    node.down = right < size ? WireTarget::to(base + static_cast<NodeId>(right)) : WireTarget::exit();
    node.label = NodeLabel{RegionKind::kTree, stage, {tree_index, k}};
    out.push_back(node);
  }
  return base;
}

StageRange append_stage(std::vector<Node>& out, std::uint32_t n, std::uint32_t stage,
                        TreeAttachment attachment) {
  const std::uint32_t s = ceil_sqrt(n);
  StageRange range;
  range.first = static_cast<NodeId>(out.size());
  GridParts grid = append_grid(out, 2 * s, stage);
  range.entry = grid.entry;
  std::uint32_t tree = 0;
  for (NodeId a : grid.anti_diagonal) {
    if (attachment == TreeAttachment::kMerged) {
      const NodeId root = append_tree(out, s, stage, tree++);
      out[a].right = WireTarget::to(root);
      out[a].down = WireTarget::to(root);
    } else {
      const NodeId r = append_tree(out, s, stage, tree++);
      const NodeId d = append_tree(out, s, stage, tree++);
      out[a].right = WireTarget::to(r);
      out[a].down = WireTarget::to(d);
    }
  }
  range.end = static_cast<NodeId>(out.size());
  return range;
}

// Every exit wire of stage k is routed into the entry of stage k + 1.
void chain_stages(std::vector<Node>& out, const std::vector<StageRange>& ranges) {
  for (std::size_t k = 0; k + 1 < ranges.size(); ++k) {
    const WireTarget next = WireTarget::to(ranges[k + 1].entry);
    for (NodeId id = ranges[k].first; id < ranges[k].end; ++id) {
      for (Port p : {Port::kRight, Port::kDown}) {
        if (out[id].wire(p).is_exit()) out[id].wire(p) = next;
      }
    }
  }
}

void append_full(std::vector<Node>& out, TopologyMeta& meta, std::vector<StageRange>& ranges,
                 std::uint32_t n) {
  NetworkInfo net;
  net.index = static_cast<std::uint32_t>(meta.networks.size());
  net.n = n;
  net.first_stage = static_cast<std::uint32_t>(meta.stages.size());
  net.stage_count = ceil_sqrt(n);
  for (std::uint32_t k = 0; k < net.stage_count; ++k) {
    const auto stage = static_cast<std::uint32_t>(meta.stages.size());
    meta.stages.push_back({stage, n, net.index});
    ranges.push_back(append_stage(out, n, stage, meta.attachment));
  }
  meta.networks.push_back(net);
}

}  // namespace

Topology build_grid(std::uint32_t m) {
  require_positive(m, "grid side m");
  std::vector<Node> nodes;
  nodes.reserve(std::size_t{m} * (m + 1) / 2);
  append_grid(nodes, m, 0);
  return Topology(std::move(nodes), 0, make_meta(TopologyKind::kGrid, m));
}

Topology build_tree(std::uint32_t m) {
  require_positive(m, "tree size m");
  std::vector<Node> nodes;
  append_tree(nodes, m, 0, 0);
  return Topology(std::move(nodes), 0, make_meta(TopologyKind::kTree, m));
}

Topology build_stage(std::uint32_t n, StageOptions options) {
  require_positive(n, "stage parameter n");
  TopologyMeta meta = make_meta(TopologyKind::kStage, n, options.attachment);
  meta.stages.push_back({0, n, 0});
  std::vector<Node> nodes;
  append_stage(nodes, n, 0, options.attachment);
  return Topology(std::move(nodes), 0, std::move(meta));
}

Topology build_full(std::uint32_t n, StageOptions options) {
  require_positive(n, "process bound n");
  TopologyMeta meta = make_meta(TopologyKind::kFull, n, options.attachment);
  std::vector<Node> nodes;
  std::vector<StageRange> ranges;
  append_full(nodes, meta, ranges, n);
  chain_stages(nodes, ranges);
  return Topology(std::move(nodes), 0, std::move(meta));
}

Topology build_adaptive(std::uint32_t max_n, StageOptions options) {
  require_positive(max_n, "max_n");
  TopologyMeta meta = make_meta(TopologyKind::kAdaptive, max_n, options.attachment);
  std::vector<Node> nodes;
  std::vector<StageRange> ranges;
  for (std::uint64_t n = 1;; n *= 2) {
    append_full(nodes, meta, ranges, static_cast<std::uint32_t>(n));
    if (n >= max_n) break;
  }
  chain_stages(nodes, ranges);
  return Topology(std::move(nodes), 0, std::move(meta));
}

namespace {

// Every node after everything it wires to. Assumes acyclic.
std::vector<NodeId> post_order(const Topology& t) {
  std::vector<NodeId> order;
  order.reserve(t.node_count());
  std::vector<char> seen(t.node_count(), 0);
  std::vector<std::pair<NodeId, int>> stack;
  for (NodeId root = 0; root < t.node_count(); ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [id, port] = stack.back();
      if (port < 2) {
        const WireTarget& w = t.node(id).wire(port == 0 ? Port::kRight : Port::kDown);
        ++port;
        if (!w.is_exit() && !seen[w.node()]) {
          seen[w.node()] = 1;
          stack.push_back({w.node(), 0});
        }
      } else {
        order.push_back(id);
        stack.pop_back();
      }
    }
  }
  return order;
}

// Longest path (in nodes) starting at each node, following only wires for
// which `keep(from, to)` holds.
template <typename Keep>
std::vector<std::uint32_t> longest_paths(const Topology& t, const std::vector<NodeId>& order, Keep keep) {
  std::vector<std::uint32_t> depth(t.node_count(), 0);
  for (NodeId id : order) {
    std::uint32_t best = 0;
    for (Port p : {Port::kRight, Port::kDown}) {
      const WireTarget& w = t.node(id).wire(p);
      if (!w.is_exit() && keep(id, w.node())) best = std::max(best, depth[w.node()]);
    }
    depth[id] = best + 1;
  }
  return depth;
}

std::string describe_cycle(const std::vector<NodeId>& cycle) {
  std::ostringstream os;
  os << "wiring cycle: ";
  for (NodeId id : cycle) os << id << " -> ";
  os << cycle.front();
  return os.str();
}

}  // namespace

std::vector<StructuralIssue> find_structural_issues(const Topology& t) {
  std::vector<StructuralIssue> issues;
  const std::uint32_t count = t.node_count();
  if (count == 0) {
    issues.push_back({std::nullopt, "topology has no splitters"});
    return issues;
  }
  if (t.entry() >= count) {
    issues.push_back({t.entry(), "entry node out of range"});
  }
  bool dangling = false;
  for (NodeId id = 0; id < count; ++id) {
    for (Port p : {Port::kRight, Port::kDown}) {
      const WireTarget& w = t.node(id).wire(p);
      if (!w.is_exit() && w.node() >= count) {
        dangling = true;
        issues.push_back({id, std::string(p == Port::kRight ? "right" : "down") +
                                  " wire targets missing node " + std::to_string(w.node())});
      }
    }
  }
  if (dangling) return issues;

  // Cycle detection: iterative DFS with white/gray/black colouring.
  std::vector<std::uint8_t> color(count, 0);
  for (NodeId root = 0; root < count; ++root) {
    if (color[root] != 0) continue;
    std::vector<std::pair<NodeId, int>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [id, port] = stack.back();
      if (port == 2) {
        color[id] = 2;
        stack.pop_back();
        continue;
      }
      const WireTarget& w = t.node(id).wire(port == 0 ? Port::kRight : Port::kDown);
      ++port;
      if (w.is_exit()) continue;
      const NodeId next = w.node();
      if (color[next] == 1) {
        std::vector<NodeId> cycle{next};
        for (auto it = stack.begin(); it != stack.end(); ++it) {
          if (it->first == next) {
            cycle.clear();
            for (auto jt = it; jt != stack.end(); ++jt) cycle.push_back(jt->first);
            break;
          }
        }
        issues.push_back({next, describe_cycle(cycle)});
      } else if (color[next] == 0) {
        color[next] = 1;
        stack.push_back({next, 0});
      }
    }
  }

  if (t.entry() < count) {
    std::vector<char> reached(count, 0);
    std::vector<NodeId> frontier{t.entry()};
    reached[t.entry()] = 1;
    while (!frontier.empty()) {
      const NodeId id = frontier.back();
      frontier.pop_back();
      for (Port p : {Port::kRight, Port::kDown}) {
        const WireTarget& w = t.node(id).wire(p);
        if (!w.is_exit() && !reached[w.node()]) {
          reached[w.node()] = 1;
          frontier.push_back(w.node());
        }
      }
    }
    for (NodeId id = 0; id < count; ++id) {
      if (!reached[id]) issues.push_back({id, "unreachable from entry"});
    }
  }

  for (const Region& r : t.regions()) {
    std::vector<std::uint64_t> keys;
    keys.reserve(r.nodes.size());
    for (NodeId id : r.nodes) {
      const auto& c = t.node(id).label->coords;
      keys.push_back(std::uint64_t{c[0]} << 32 | c[1]);
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
      issues.push_back({r.entry, "duplicate coordinates in " + std::string(to_string(r.kind)) + " region"});
    }
  }
  // Grid labels must agree with grid wiring.
  for (NodeId id = 0; id < count; ++id) {
    const auto& label = t.node(id).label;
    if (!label || label->region != RegionKind::kGrid) continue;
    for (Port p : {Port::kRight, Port::kDown}) {
      const WireTarget& w = t.node(id).wire(p);
      if (w.is_exit()) continue;
      const auto& other = t.node(w.node()).label;
      if (!other || other->region != RegionKind::kGrid || other->stage != label->stage) continue;
      auto expect = label->coords;
      ++expect[p == Port::kRight ? 0 : 1];
      if (other->coords != expect) {
        issues.push_back({id, "grid wire does not lead to the neighbouring position"});
      }
    }
  }
  for (const StageInfo& s : t.meta().stages) {
    if (!t.stage_entry(s.index)) issues.push_back({std::nullopt, "stage " + std::to_string(s.index) + " has no grid"});
  }
  return issues;
}

std::uint32_t network_depth(const Topology& t) {
  if (t.node_count() == 0) return 0;
  return longest_paths(t, post_order(t), [](NodeId, NodeId) { return true; })[t.entry()];
}

BuildReport validate(const Topology& t) {
  auto issues = find_structural_issues(t);
  if (!issues.empty()) {
    std::ostringstream os;
    os << "invalid topology (" << issues.size() << " issue" << (issues.size() == 1 ? "" : "s") << ")";
    for (const auto& issue : issues) {
      os << "\n  ";
      if (issue.node) os << "node " << *issue.node << ": ";
      os << issue.message;
    }
    throw TopologyError(os.str());
  }
  BuildReport report;
  report.splitter_count = t.node_count();
  const auto order = post_order(t);
  report.depth = longest_paths(t, order, [](NodeId, NodeId) { return true; })[t.entry()];
  const auto in_stage = longest_paths(t, order, [&](NodeId from, NodeId to) {
    const auto& a = t.node(from).label;
    const auto& b = t.node(to).label;
    return a && b && a->stage == b->stage;
  });
  for (const StageInfo& s : t.meta().stages) {
    StageReport sr;
    sr.index = s.index;
    sr.n = s.n;
    for (const Region& r : t.regions()) {
      if (r.stage != s.index) continue;
      (r.kind == RegionKind::kGrid ? sr.grid_nodes : sr.tree_nodes) +=
          static_cast<std::uint32_t>(r.nodes.size());
    }
    sr.depth = in_stage[*t.stage_entry(s.index)];
    report.stages.push_back(sr);
  }
  return report;
}

}  // namespace splitnet

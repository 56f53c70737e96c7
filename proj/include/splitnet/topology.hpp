#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitnet/ids.hpp"

namespace splitnet {

enum class Port : std::uint8_t { kRight, kDown };

// Where a splitter output port leads: another splitter, or out of the network.
class WireTarget {
 public:
  static constexpr WireTarget exit() { return WireTarget{}; }
  static constexpr WireTarget to(NodeId n) {
    WireTarget w;
    w.node_ = n;
    return w;
  }

  bool is_exit() const { return !node_.has_value(); }
  const std::optional<NodeId>& target() const { return node_; }
  NodeId node() const { return node_.value(); }

  friend bool operator==(const WireTarget&, const WireTarget&) = default;

 private:
  std::optional<NodeId> node_;
};

enum class RegionKind : std::uint8_t { kGrid, kTree };

struct NodeLabel {
  RegionKind region = RegionKind::kGrid;
  std::uint32_t stage = 0;
  // Grid: (i, j) with Right -> (i+1, j), Down -> (i, j+1).
  // Tree: (tree index within its stage, heap position).
  std::array<std::uint32_t, 2> coords{};

  friend bool operator==(const NodeLabel&, const NodeLabel&) = default;
};

struct Node {
  WireTarget right;
  WireTarget down;
  std::optional<NodeLabel> label;

  const WireTarget& wire(Port p) const { return p == Port::kRight ? right : down; }
  WireTarget& wire(Port p) { return p == Port::kRight ? right : down; }

  friend bool operator==(const Node&, const Node&) = default;
};

// One (n, ceil(sqrt n))-blocker stage of a staged network.
struct StageInfo {
  std::uint32_t index = 0;
  std::uint32_t n = 0;
  std::uint32_t network = 0;

  friend bool operator==(const StageInfo&, const StageInfo&) = default;
};

// One full renaming network (a chain of stages) inside an adaptive chain.
struct NetworkInfo {
  std::uint32_t index = 0;
  std::uint32_t n = 0;
  std::uint32_t first_stage = 0;
  std::uint32_t stage_count = 0;

  friend bool operator==(const NetworkInfo&, const NetworkInfo&) = default;
};

enum class TopologyKind : std::uint8_t { kGrid, kTree, kStage, kFull, kAdaptive, kCustom };

// How a stage hangs its binary trees off the grid's anti-diagonal: one tree
// per anti-diagonal splitter fed by both of its output wires (merged), or
// one tree per output wire.
enum class TreeAttachment : std::uint8_t { kMerged, kPerWire };

struct TopologyMeta {
  TopologyKind kind = TopologyKind::kCustom;
  std::uint32_t param = 0;
  TreeAttachment attachment = TreeAttachment::kMerged;
  std::vector<StageInfo> stages;
  std::vector<NetworkInfo> networks;

  friend bool operator==(const TopologyMeta&, const TopologyMeta&) = default;
};

// A labelled grid or tree inside a topology, derived from node labels.
struct Region {
  RegionKind kind = RegionKind::kGrid;
  std::uint32_t stage = 0;
  std::uint32_t tree = 0;  // tree index within the stage; 0 for grids
  std::uint32_t size = 0;  // grid side m, or number of tree nodes
  NodeId entry = 0;
  std::vector<NodeId> nodes;
};

std::string_view to_string(TopologyKind k);
std::string_view to_string(RegionKind k);
std::string_view to_string(TreeAttachment a);
std::optional<TopologyKind> topology_kind_from_string(std::string_view s);

// Immutable splitter network. Construction does not validate; call
// validate() for the structural checks.
class Topology {
 public:
  Topology(std::vector<Node> nodes, NodeId entry, TopologyMeta meta = {});

  std::uint32_t node_count() const { return static_cast<std::uint32_t>(nodes_.size()); }
  NodeId entry() const { return entry_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const TopologyMeta& meta() const { return meta_; }
  TopologyKind kind() const { return meta_.kind; }

  const std::vector<Region>& regions() const { return regions_; }
  // Index into regions(), or nullopt for an unlabelled node.
  std::optional<std::size_t> region_of(NodeId id) const;
  bool is_labeled() const;

  // Entry node of a stage (its grid corner), if the stage exists.
  std::optional<NodeId> stage_entry(std::uint32_t stage) const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.entry_ == b.entry_ && a.nodes_ == b.nodes_ && a.meta_ == b.meta_;
  }

 private:
  std::vector<Node> nodes_;
  NodeId entry_;
  TopologyMeta meta_;
  std::vector<Region> regions_;
  std::vector<std::int64_t> region_index_;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint32_t ceil_sqrt(std::uint64_t n);
std::uint32_t ceil_log2(std::uint64_t n);

struct StageOptions {
  TreeAttachment attachment = TreeAttachment::kMerged;
};

// Triangular grid {(i, j) : i + j <= m - 1} entered at (0, 0).
Topology build_grid(std::uint32_t m);
// Heap-shaped binary tree; Right leads to the left child, Down to the right.
Topology build_tree(std::uint32_t m);
// Grid of side 2*ceil(sqrt n) whose anti-diagonal feeds ceil(sqrt n)-node trees.
Topology build_stage(std::uint32_t n, StageOptions options = {});
// ceil(sqrt n) stages chained exit-to-entry.
Topology build_full(std::uint32_t n, StageOptions options = {});
// Full networks for n = 1, 2, 4, ... up to the first power of two >= max_n,
// each network's overflow feeding the next one's entry.
Topology build_adaptive(std::uint32_t max_n, StageOptions options = {});

struct StageReport {
  std::uint32_t index = 0;
  std::uint32_t n = 0;
  std::uint32_t grid_nodes = 0;
  std::uint32_t tree_nodes = 0;
  std::uint32_t depth = 0;
};

struct BuildReport {
  std::uint64_t splitter_count = 0;
  // Longest entry-to-exit path, counted in splitter visits.
  std::uint32_t depth = 0;
  std::vector<StageReport> stages;
};

struct StructuralIssue {
  std::optional<NodeId> node;
  std::string message;
};

// Every structural problem: bad entry, dangling wires, cycles, unreachable
// nodes, inconsistent labels. Empty means the topology is well formed.
std::vector<StructuralIssue> find_structural_issues(const Topology& t);

// Throws TopologyError listing every issue; otherwise measures the network.
BuildReport validate(const Topology& t);

// Longest path in splitter visits from the entry. Requires an acyclic topology.
std::uint32_t network_depth(const Topology& t);

}  // namespace splitnet

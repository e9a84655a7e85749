#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cascades/histogram.hpp"
#include "json.hpp"

namespace cascades {

// Dense index of an interned user id.
using NodeIndex = std::uint32_t;

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t dropped_self_loops = 0;
  std::size_t collapsed_duplicates = 0;
};

enum class DegreeDirection { in, out };

// Result of an adjacency query by external label. `known` is false when the
// label was never seen by the graph; `nodes` is then empty.
struct NeighborLookup {
  std::span<const NodeIndex> nodes;
  bool known = false;
};

// Immutable directed follower graph. Edge (u, v) means "u follows v": u sees
// v's activity, so information flows v -> u.
//
// Both adjacency directions are stored in CSR form over dense indices and are
// exact transposes of each other. Neighbor lists are sorted ascending.
class FollowerGraph {
 public:
  FollowerGraph() = default;

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return followee_targets_.size(); }

  // Users u with u -> v (u follows v).
  std::span<const NodeIndex> followers(NodeIndex v) const;
  // Users v with u -> v.
  std::span<const NodeIndex> followees(NodeIndex u) const;

  NeighborLookup followers(std::string_view label) const;
  NeighborLookup followees(std::string_view label) const;

  bool follows(NodeIndex follower, NodeIndex followee) const;

  std::optional<NodeIndex> find(std::string_view label) const;
  const std::string& label(NodeIndex v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t in_degree(NodeIndex v) const { return followers(v).size(); }
  std::size_t out_degree(NodeIndex u) const { return followees(u).size(); }

  const GraphSummary& summary() const { return summary_; }

  // All edges as (follower, followee), ordered by follower then followee.
  std::vector<std::pair<NodeIndex, NodeIndex>> edges() const;

 private:
  friend class GraphBuilder;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::size_t> followee_offsets_{0};
  std::vector<NodeIndex> followee_targets_;
  std::vector<std::size_t> follower_offsets_{0};
  std::vector<NodeIndex> follower_sources_;
  GraphSummary summary_;
};

// Accumulates nodes and edges, interning labels in first-seen order.
// Duplicate edges are collapsed and self-loops dropped; both are counted.
class GraphBuilder {
 public:
  NodeIndex add_node(std::string_view label);
  void add_edge(std::string_view follower, std::string_view followee);
  void add_edge(NodeIndex follower, NodeIndex followee);

  std::size_t node_count() const { return labels_.size(); }

  FollowerGraph build() &&;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
  std::unordered_set<std::uint64_t> seen_;
  std::size_t self_loops_ = 0;
  std::size_t duplicates_ = 0;
};

// Reads a whitespace-separated "follower followee" edge list. Lines starting
// with '#' and blank lines are ignored. Throws std::runtime_error with the
// offending line number on malformed input.
FollowerGraph load_follower_graph(const std::filesystem::path& path);
FollowerGraph parse_follower_graph(std::istream& in,
                                   std::string_view source = "<stream>");

// Writes one "follower<TAB>followee" line per edge.
void write_follower_graph(const FollowerGraph& g,
                          const std::filesystem::path& path);

Histogram degree_distribution(const FollowerGraph& g, DegreeDirection direction);

void to_json(nlohmann::json& j, const GraphSummary& summary);

}  // namespace cascades

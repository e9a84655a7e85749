#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cascades/events.hpp"
#include "cascades/graph.hpp"
#include "cascades/random.hpp"
#include "json.hpp"

namespace cascades {

// Index of a user within one story's validated activation order.
using Position = std::uint32_t;
// Activation edge (earlier followee, later follower), by position.
using ActivationEdge = std::pair<Position, Position>;

// Activation DAG of one story. Nodes are the activated users in temporal
// order, so position order is a topological order. There is an edge v -> u
// exactly when u follows v and v precedes u in the validated sequence.
class ActivationDag {
 public:
  const std::string& story_id() const { return story_id_; }
  std::size_t node_count() const { return users_.size(); }
  std::size_t edge_count() const { return in_sources_.size(); }

  const std::string& user(Position p) const { return users_.at(p); }
  const std::vector<std::string>& users() const { return users_; }
  // Graph index of the user, absent when the graph does not know them.
  std::optional<NodeIndex> graph_node(Position p) const;
  std::optional<Position> position_of(std::string_view user) const;

  // Earlier-activated followees of p, ascending.
  std::span<const Position> in_edges(Position p) const;
  // Later-activated followers of p, ascending.
  std::span<const Position> out_edges(Position p) const;

  // Sorted by (source, target).
  std::vector<ActivationEdge> edges() const;

  friend ActivationDag build_activation_dag(const FollowerGraph& g,
                                            const ActivationSequence& s);

 private:
  std::string story_id_;
  std::vector<std::string> users_;
  std::vector<NodeIndex> graph_nodes_;  // kAbsent when unknown
  std::vector<std::size_t> in_offsets_{0};
  std::vector<Position> in_sources_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<Position> out_targets_;

  static constexpr NodeIndex kAbsent = ~NodeIndex{0};
};

ActivationDag build_activation_dag(const FollowerGraph& g,
                                   const ActivationSequence& s);

// Nodes with no in-edges, in temporal order.
std::vector<Position> identify_seeds(const ActivationDag& d);

// A root plus everything reachable from it along activation edges.
struct Cascade {
  Position seed = 0;
  std::vector<Position> members;     // ascending
  std::vector<ActivationEdge> edges;  // sorted; every out-edge of a member

  std::size_t size() const { return members.size(); }
  bool contains(Position p) const;

  friend bool operator==(const Cascade&, const Cascade&) = default;
};

Cascade reachable_cascade(const ActivationDag& d, Position root);

// One cascade per seed, in seed order. Members may be shared between
// cascades.
std::vector<Cascade> extract_cascades(const ActivationDag& d);

struct PrincipalCascade {
  Cascade cascade;
  // False only when an explicit submitter override names a non-seed node.
  bool submitter_is_seed = true;
};

// Throws std::invalid_argument if the submitter did not act on the story.
PrincipalCascade principal_cascade(const ActivationDag& d,
                                   std::string_view submitter);

// A spanning forest of the DAG keeping one in-edge per non-seed node.
struct ObservedForest {
  std::vector<std::optional<Position>> parent;
  std::vector<Position> root;
  std::vector<std::uint32_t> depth;

  // Edges kept, sorted by (parent, child).
  std::vector<ActivationEdge> edges() const;
  // Maximum depth among nodes whose root is `r`.
  std::uint32_t height(Position r) const;
};

// Picks, for a node with `in_degree` candidates, the index of the kept edge.
using ParentChooser = std::function<std::size_t(Position node, std::size_t in_degree)>;

ObservedForest observed_forest(const ActivationDag& d, const ParentChooser& choose);

// Uniformly random in-edge per non-seed node.
ObservedForest sample_observed_tree(const ActivationDag& d, Rng& rng);

// Shortest and longest edge counts from `root` to every node; nullopt where
// unreachable.
std::vector<std::optional<std::uint32_t>> shortest_distances(const ActivationDag& d,
                                                             Position root);
std::vector<std::optional<std::uint32_t>> longest_distances(const ActivationDag& d,
                                                            Position root);

// {story_id, nodes, edges, seeds} with user labels.
nlohmann::json dag_to_json(const ActivationDag& d);

}  // namespace cascades

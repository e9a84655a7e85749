#include "cascades/cascade.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace cascades {

std::optional<NodeIndex> ActivationDag::graph_node(Position p) const {
  const NodeIndex v = graph_nodes_.at(p);
  if (v == kAbsent) return std::nullopt;
  return v;
}

std::optional<Position> ActivationDag::position_of(std::string_view user) const {
  auto it = std::find(users_.begin(), users_.end(), user);
  if (it == users_.end()) return std::nullopt;
  return static_cast<Position>(it - users_.begin());
}

std::span<const Position> ActivationDag::in_edges(Position p) const {
  if (p >= node_count()) throw std::out_of_range("position out of range");
  return {in_sources_.data() + in_offsets_[p], in_offsets_[p + 1] - in_offsets_[p]};
}

std::span<const Position> ActivationDag::out_edges(Position p) const {
  if (p >= node_count()) throw std::out_of_range("position out of range");
  return {out_targets_.data() + out_offsets_[p],
          out_offsets_[p + 1] - out_offsets_[p]};
}

std::vector<ActivationEdge> ActivationDag::edges() const {
  std::vector<ActivationEdge> out;
  out.reserve(edge_count());
  for (Position v = 0; v < node_count(); ++v)
    for (Position u : out_edges(v)) out.emplace_back(v, u);
  return out;
}

ActivationDag build_activation_dag(const FollowerGraph& g,
                                   const ActivationSequence& s) {
  ActivationDag d;
  d.story_id_ = s.story_id;
  const std::size_t n = s.activations.size();
  d.users_.reserve(n);
  d.graph_nodes_.reserve(n);

  std::unordered_map<NodeIndex, Position> position;
  position.reserve(n);
  for (const auto& a : s.activations) {
    const auto p = static_cast<Position>(d.users_.size());
    d.users_.push_back(a.user);
    const auto v = g.find(a.user);
    d.graph_nodes_.push_back(v.value_or(ActivationDag::kAbsent));
    if (v) position.emplace(*v, p);
  }

  // In-edges: for each activated user, the followees that acted earlier.
  std::vector<std::size_t> out_degree(n, 0);
  d.in_offsets_.assign(n + 1, 0);
  for (Position u = 0; u < n; ++u) {
    const NodeIndex gu = d.graph_nodes_[u];
    const auto begin = d.in_sources_.size();
    if (gu != ActivationDag::kAbsent) {
      for (NodeIndex followee : g.followees(gu)) {
        auto it = position.find(followee);
        if (it != position.end() && it->second < u) {
          d.in_sources_.push_back(it->second);
          ++out_degree[it->second];
        }
      }
    }
    std::sort(d.in_sources_.begin() + static_cast<std::ptrdiff_t>(begin),
              d.in_sources_.end());
    d.in_offsets_[u + 1] = d.in_sources_.size();
  }

  // Transpose; targets come out ascending because u is visited in order.
  d.out_offsets_.assign(n + 1, 0);
  for (Position v = 0; v < n; ++v) d.out_offsets_[v + 1] = d.out_offsets_[v] + out_degree[v];
  d.out_targets_.resize(d.in_sources_.size());
  std::vector<std::size_t> cursor(d.out_offsets_.begin(), d.out_offsets_.end() - 1);
  for (Position u = 0; u < n; ++u)
    for (Position v : d.in_edges(u)) d.out_targets_[cursor[v]++] = u;
  return d;
}

std::vector<Position> identify_seeds(const ActivationDag& d) {
  std::vector<Position> seeds;
  for (Position p = 0; p < d.node_count(); ++p)
    if (d.in_edges(p).empty()) seeds.push_back(p);
  return seeds;
}

bool Cascade::contains(Position p) const {
  return std::binary_search(members.begin(), members.end(), p);
}

Cascade reachable_cascade(const ActivationDag& d, Position root) {
  Cascade c;
  c.seed = root;
  std::vector<char> seen(d.node_count(), 0);
  std::vector<Position> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const Position v = stack.back();
    stack.pop_back();
    c.members.push_back(v);
    for (Position u : d.out_edges(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::sort(c.members.begin(), c.members.end());
  for (Position v : c.members)
    for (Position u : d.out_edges(v)) c.edges.emplace_back(v, u);
  return c;
}

std::vector<Cascade> extract_cascades(const ActivationDag& d) {
  std::vector<Cascade> out;
  for (Position seed : identify_seeds(d)) out.push_back(reachable_cascade(d, seed));
  return out;
}

PrincipalCascade principal_cascade(const ActivationDag& d,
                                   std::string_view submitter) {
  const auto p = d.position_of(submitter);
  if (!p)
    throw std::invalid_argument("submitter " + std::string(submitter) +
                                " did not act on story " + d.story_id());
  return {reachable_cascade(d, *p), d.in_edges(*p).empty()};
}

std::vector<ActivationEdge> ObservedForest::edges() const {
  std::vector<ActivationEdge> out;
  for (Position p = 0; p < parent.size(); ++p)
    if (parent[p]) out.emplace_back(*parent[p], p);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint32_t ObservedForest::height(Position r) const {
  std::uint32_t h = 0;
  for (Position p = 0; p < root.size(); ++p)
    if (root[p] == r) h = std::max(h, depth[p]);
  return h;
}

ObservedForest observed_forest(const ActivationDag& d, const ParentChooser& choose) {
  const std::size_t n = d.node_count();
  ObservedForest f;
  f.parent.resize(n);
  f.root.resize(n);
  f.depth.resize(n, 0);
  // Parents precede children, so one forward pass settles root and depth.
  for (Position p = 0; p < n; ++p) {
    const auto in = d.in_edges(p);
    if (in.empty()) {
      f.root[p] = p;
      continue;
    }
    const std::size_t pick = in.size() == 1 ? 0 : choose(p, in.size());
    if (pick >= in.size()) throw std::out_of_range("parent choice out of range");
    const Position parent = in[pick];
    f.parent[p] = parent;
    f.root[p] = f.root[parent];
    f.depth[p] = f.depth[parent] + 1;
  }
  return f;
}

ObservedForest sample_observed_tree(const ActivationDag& d, Rng& rng) {
  return observed_forest(d, [&rng](Position, std::size_t in_degree) {
    return static_cast<std::size_t>(uniform_index(rng, in_degree));
  });
}

std::vector<std::optional<std::uint32_t>> shortest_distances(const ActivationDag& d,
                                                             Position root) {
  std::vector<std::optional<std::uint32_t>> dist(d.node_count());
  std::deque<Position> queue{root};
  dist[root] = 0;
  while (!queue.empty()) {
    const Position v = queue.front();
    queue.pop_front();
    for (Position u : d.out_edges(v)) {
      if (!dist[u]) {
        dist[u] = *dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<std::optional<std::uint32_t>> longest_distances(const ActivationDag& d,
                                                            Position root) {
  std::vector<std::optional<std::uint32_t>> dist(d.node_count());
  dist[root] = 0;
  for (Position v = root; v < d.node_count(); ++v) {
    if (!dist[v]) continue;
    for (Position u : d.out_edges(v))
      if (!dist[u] || *dist[u] < *dist[v] + 1) dist[u] = *dist[v] + 1;
  }
  return dist;
}

nlohmann::json dag_to_json(const ActivationDag& d) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [v, u] : d.edges())
    edges.push_back(nlohmann::json::array({d.user(v), d.user(u)}));
  nlohmann::json seeds = nlohmann::json::array();
  for (Position s : identify_seeds(d)) seeds.push_back(d.user(s));
  return {{"story_id", d.story_id()},
          {"nodes", d.users()},
          {"edges", std::move(edges)},
          {"seeds", std::move(seeds)}};
}

}  // namespace cascades

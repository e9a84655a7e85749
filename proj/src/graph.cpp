#include "cascades/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cascades {

namespace {

std::uint64_t edge_key(NodeIndex u, NodeIndex v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Builds CSR arrays from (source, target) pairs sorted by source then target.
void fill_csr(std::size_t n,
              const std::vector<std::pair<NodeIndex, NodeIndex>>& sorted,
              std::vector<std::size_t>& offsets, std::vector<NodeIndex>& targets) {
  offsets.assign(n + 1, 0);
  targets.clear();
  targets.reserve(sorted.size());
  for (const auto& [u, v] : sorted) {
    ++offsets[u + 1];
    targets.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
}

}  // namespace

std::span<const NodeIndex> FollowerGraph::followers(NodeIndex v) const {
  if (v >= node_count()) throw std::out_of_range("node index out of range");
  return {follower_sources_.data() + follower_offsets_[v],
          follower_offsets_[v + 1] - follower_offsets_[v]};
}

std::span<const NodeIndex> FollowerGraph::followees(NodeIndex u) const {
  if (u >= node_count()) throw std::out_of_range("node index out of range");
  return {followee_targets_.data() + followee_offsets_[u],
          followee_offsets_[u + 1] - followee_offsets_[u]};
}

NeighborLookup FollowerGraph::followers(std::string_view label) const {
  auto v = find(label);
  if (!v) return {};
  return {followers(*v), true};
}

NeighborLookup FollowerGraph::followees(std::string_view label) const {
  auto u = find(label);
  if (!u) return {};
  return {followees(*u), true};
}

bool FollowerGraph::follows(NodeIndex follower, NodeIndex followee) const {
  auto out = followees(follower);
  return std::binary_search(out.begin(), out.end(), followee);
}

std::optional<NodeIndex> FollowerGraph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::pair<NodeIndex, NodeIndex>> FollowerGraph::edges() const {
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  out.reserve(edge_count());
  for (NodeIndex u = 0; u < node_count(); ++u)
    for (NodeIndex v : followees(u)) out.emplace_back(u, v);
  return out;
}

NodeIndex GraphBuilder::add_node(std::string_view label) {
  auto [it, inserted] =
      index_.try_emplace(std::string(label), static_cast<NodeIndex>(labels_.size()));
  if (inserted) labels_.emplace_back(label);
  return it->second;
}

void GraphBuilder::add_edge(std::string_view follower, std::string_view followee) {
  // A self-loop line does not introduce its user.
  if (follower == followee) {
    ++self_loops_;
    return;
  }
  const NodeIndex u = add_node(follower);
  const NodeIndex v = add_node(followee);
  add_edge(u, v);
}

void GraphBuilder::add_edge(NodeIndex follower, NodeIndex followee) {
  if (follower >= labels_.size() || followee >= labels_.size())
    throw std::out_of_range("add_edge: unknown node index");
  if (follower == followee) {
    ++self_loops_;
    return;
  }
  if (!seen_.insert(edge_key(follower, followee)).second) {
    ++duplicates_;
    return;
  }
  edges_.emplace_back(follower, followee);
}

FollowerGraph GraphBuilder::build() && {
  FollowerGraph g;
  const std::size_t n = labels_.size();
  g.labels_ = std::move(labels_);
  g.index_ = std::move(index_);

  std::sort(edges_.begin(), edges_.end());
  fill_csr(n, edges_, g.followee_offsets_, g.followee_targets_);

  for (auto& [u, v] : edges_) std::swap(u, v);
  std::sort(edges_.begin(), edges_.end());
  fill_csr(n, edges_, g.follower_offsets_, g.follower_sources_);

  g.summary_ = {n, g.followee_targets_.size(), self_loops_, duplicates_};
  edges_.clear();
  seen_.clear();
  return g;
}

FollowerGraph parse_follower_graph(std::istream& in, std::string_view source) {
  GraphBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a)) continue;  // blank
    if (a.front() == '#') continue;
    if (!(tokens >> b) || (tokens >> extra)) {
      throw std::runtime_error(std::string(source) + ":" + std::to_string(line_no) +
                               ": expected exactly two ids, got '" + line + "'");
    }
    builder.add_edge(a, b);
  }
  return std::move(builder).build();
}

FollowerGraph load_follower_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file " + path.string());
  return parse_follower_graph(in, path.string());
}

void write_follower_graph(const FollowerGraph& g,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [u, v] : g.edges())
    out << g.label(u) << '\t' << g.label(v) << '\n';
}

Histogram degree_distribution(const FollowerGraph& g, DegreeDirection direction) {
  Histogram h;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    const auto degree =
        direction == DegreeDirection::in ? g.in_degree(v) : g.out_degree(v);
    h.add(static_cast<double>(degree));
  }
  return h;
}

void to_json(nlohmann::json& j, const GraphSummary& summary) {
  j = nlohmann::json{{"nodes", summary.nodes},
                     {"edges", summary.edges},
                     {"dropped_self_loops", summary.dropped_self_loops},
                     {"collapsed_duplicates", summary.collapsed_duplicates}};
}

}  // namespace cascades

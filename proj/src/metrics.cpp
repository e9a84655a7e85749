#include "cascades/metrics.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace cascades {

CascadeMetrics cascade_metrics(const Cascade& c) {
  CascadeMetrics m;
  m.size = c.members.size();
  m.edge_count = c.edges.size();
  if (c.members.empty()) return m;

  // Members ascend in temporal (= topological) order; edges are sorted by
  // source, so each member's out-edges are one contiguous run.
  std::unordered_map<Position, std::size_t> local;
  local.reserve(c.members.size());
  for (std::size_t i = 0; i < c.members.size(); ++i) local.emplace(c.members[i], i);

  const std::size_t n = c.members.size();
  std::vector<std::size_t> begin(n + 1, 0);
  for (const auto& [v, u] : c.edges) ++begin[local.at(v) + 1];
  for (std::size_t i = 0; i < n; ++i) begin[i + 1] += begin[i];
  std::vector<std::size_t> targets(c.edges.size());
  {
    std::vector<std::size_t> cursor(begin.begin(), begin.end() - 1);
    for (const auto& [v, u] : c.edges) targets[cursor[local.at(v)]++] = local.at(u);
  }

  std::vector<std::uint64_t> longest(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    m.spread = std::max<std::uint64_t>(m.spread, begin[i + 1] - begin[i]);
    for (std::size_t e = begin[i]; e < begin[i + 1]; ++e)
      longest[targets[e]] = std::max(longest[targets[e]], longest[i] + 1);
    m.max_diameter = std::max(m.max_diameter, longest[i]);
  }

  std::vector<std::int64_t> dist(n, -1);
  const std::size_t root = local.at(c.seed);
  dist[root] = 0;
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    m.min_diameter = std::max<std::uint64_t>(m.min_diameter, dist[v]);
    for (std::size_t e = begin[v]; e < begin[v + 1]; ++e) {
      if (dist[targets[e]] < 0) {
        dist[targets[e]] = dist[v] + 1;
        queue.push_back(targets[e]);
      }
    }
  }
  return m;
}

StoryMetrics story_metrics(const ActivationDag& d, const std::vector<Cascade>& cascades,
                           std::string_view submitter) {
  StoryMetrics s;
  s.story_id = d.story_id();
  s.activated = d.node_count();
  s.community_value = d.edge_count();
  s.normalized_community_value =
      s.activated == 0 ? 0.0
                       : static_cast<double>(s.community_value) /
                             static_cast<double>(s.activated);
  if (d.node_count() == 0) return s;

  std::vector<Position> seeds;
  s.cascades.reserve(cascades.size());
  for (const auto& c : cascades) {
    seeds.push_back(c.seed);
    const auto m = cascade_metrics(c);
    s.largest_cascade_size = std::max(s.largest_cascade_size, m.size);
    s.global_max_diameter = std::max(s.global_max_diameter, m.max_diameter);
    s.global_spread = std::max(s.global_spread, m.spread);
    s.cascades.push_back(m);
  }
  s.seed_count = seeds.size();

  // Multi-source BFS: distance from the nearest seed.
  std::vector<std::int64_t> dist(d.node_count(), -1);
  std::deque<Position> queue;
  for (Position seed : seeds) {
    dist[seed] = 0;
    queue.push_back(seed);
  }
  while (!queue.empty()) {
    const Position v = queue.front();
    queue.pop_front();
    s.global_min_diameter = std::max<std::uint64_t>(s.global_min_diameter, dist[v]);
    for (Position u : d.out_edges(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }

  const auto principal = principal_cascade(d, submitter);
  s.principal_is_seed = principal.submitter_is_seed;
  auto it = std::find_if(cascades.begin(), cascades.end(),
                         [&](const Cascade& c) { return c.seed == principal.cascade.seed; });
  s.principal = it != cascades.end() ? s.cascades[it - cascades.begin()]
                                     : cascade_metrics(principal.cascade);
  return s;
}

StoryMetrics analyze_story(const FollowerGraph& g, const ActivationSequence& s) {
  const auto dag = build_activation_dag(g, s);
  const auto cascades = extract_cascades(dag);
  if (s.empty()) {
    StoryMetrics m;
    m.story_id = s.story_id;
    return m;
  }
  return story_metrics(dag, cascades, s.submitter());
}

void to_json(nlohmann::json& j, const CascadeMetrics& m) {
  j = nlohmann::json{{"size", m.size},
                     {"max_diameter", m.max_diameter},
                     {"min_diameter", m.min_diameter},
                     {"spread", m.spread},
                     {"edges", m.edge_count}};
}

void to_json(nlohmann::json& j, const StoryMetrics& m) {
  j = nlohmann::json{{"story_id", m.story_id},
                     {"activated", m.activated},
                     {"seeds", m.seed_count},
                     {"largest_cascade_size", m.largest_cascade_size},
                     {"global_max_diameter", m.global_max_diameter},
                     {"global_min_diameter", m.global_min_diameter},
                     {"global_spread", m.global_spread},
                     {"community_value", m.community_value},
                     {"normalized_community_value", m.normalized_community_value},
                     {"principal", m.principal},
                     {"principal_is_seed", m.principal_is_seed},
                     {"cascades", m.cascades}};
}

const std::vector<std::string>& corpus_metric_names() {
  static const std::vector<std::string> names = {
      "global_cascade_size",    "largest_cascade_size",   "principal_size",
      "global_max_diameter",    "principal_max_diameter", "global_min_diameter",
      "principal_min_diameter", "global_spread",          "principal_spread",
      "community_value",        "normalized_community_value"};
  return names;
}

std::map<std::string, Histogram> corpus_distributions(
    const std::vector<StoryMetrics>& stories) {
  std::map<std::string, Histogram> h;
  for (const auto& name : corpus_metric_names()) h[name];
  auto add = [&](const char* name, auto value) {
    h[name].add(static_cast<double>(value));
  };
  for (const auto& s : stories) {
    if (s.activated == 0) continue;
    for (const auto& c : s.cascades) add("global_cascade_size", c.size);
    add("largest_cascade_size", s.largest_cascade_size);
    add("principal_size", s.principal.size);
    add("global_max_diameter", s.global_max_diameter);
    add("principal_max_diameter", s.principal.max_diameter);
    add("global_min_diameter", s.global_min_diameter);
    add("principal_min_diameter", s.principal.min_diameter);
    add("global_spread", s.global_spread);
    add("principal_spread", s.principal.spread);
    add("community_value", s.community_value);
    add("normalized_community_value", s.normalized_community_value);
  }
  return h;
}

}  // namespace cascades

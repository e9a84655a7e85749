#include "cascades/sim.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cascades/parallel.hpp"

namespace cascades {

namespace {

std::uint64_t pair_key(std::size_t u, std::size_t v) {
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

// floor(mean) plus one with probability frac(mean).
std::size_t draw_degree(Rng& rng, double mean) {
  const double whole = std::floor(mean);
  return static_cast<std::size_t>(whole) + (bernoulli(rng, mean - whole) ? 1 : 0);
}

GraphBuilder builder_with_nodes(std::size_t n) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node(std::to_string(i));
  return b;
}

FollowerGraph uniform_random(const GraphConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.nodes;
  auto b = builder_with_nodes(n);
  const auto m = static_cast<std::size_t>(std::llround(cfg.mean_out_degree * n));
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  while (seen.size() < m) {
    const auto u = uniform_index(rng, n);
    const auto v = uniform_index(rng, n);
    if (u == v || !seen.insert(pair_key(u, v)).second) continue;
    b.add_edge(static_cast<NodeIndex>(u), static_cast<NodeIndex>(v));
  }
  return std::move(b).build();
}

// Nodes arrive in index order and follow earlier nodes with probability
// proportional to (followers + 1).
FollowerGraph preferential_attachment(const GraphConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.nodes;
  auto b = builder_with_nodes(n);
  std::vector<NodeIndex> urn;
  urn.reserve(static_cast<std::size_t>(n * (cfg.mean_out_degree + 2)));
  std::vector<NodeIndex> picked;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t want = std::min(draw_degree(rng, cfg.mean_out_degree), u);
    picked.clear();
    for (std::size_t attempts = 0; picked.size() < want && attempts < 64 * want + 64;
         ++attempts) {
      const NodeIndex v = urn[uniform_index(rng, urn.size())];
      if (std::find(picked.begin(), picked.end(), v) == picked.end()) picked.push_back(v);
    }
    for (NodeIndex v : picked) {
      b.add_edge(static_cast<NodeIndex>(u), v);
      urn.push_back(v);
    }
    urn.push_back(static_cast<NodeIndex>(u));
  }
  return std::move(b).build();
}

FollowerGraph community_blocks(const GraphConfig& cfg, Rng& rng) {
  const std::size_t n = cfg.nodes;
  const std::size_t k = cfg.blocks;
  auto b = builder_with_nodes(n);
  // Block j holds nodes [start(j), start(j + 1)).
  auto start = [&](std::size_t j) { return j * n / k; };
  auto block_of = [&](std::size_t u) { return ((u + 1) * k - 1) / n; };
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t u = 0; u < n; ++u) {
    const std::size_t bu = block_of(u);
    const std::size_t lo = start(bu), hi = start(bu + 1);
    const std::size_t inside = hi - lo - 1;
    const std::size_t outside = n - (hi - lo);
    const std::size_t want = draw_degree(rng, cfg.mean_out_degree);
    std::size_t placed = 0;
    for (std::size_t attempts = 0; placed < want && attempts < 64 * want + 64; ++attempts) {
      std::size_t v;
      if (bernoulli(rng, cfg.intra_fraction)) {
        if (inside == 0) continue;
        v = lo + uniform_index(rng, inside);
        if (v >= u) ++v;
      } else {
        if (outside == 0) continue;
        v = uniform_index(rng, outside);
        if (v >= lo) v += hi - lo;
      }
      if (!seen.insert(pair_key(u, v)).second) continue;
      b.add_edge(static_cast<NodeIndex>(u), static_cast<NodeIndex>(v));
      ++placed;
    }
  }
  return std::move(b).build();
}

// Draws from a story's background stream: every inactive node joins with
// probability `rate`. Geometric skipping keeps the cost proportional to hits.
void background_adoption(Rng& rng, double rate, std::vector<char>& active,
                         std::vector<NodeIndex>& joined) {
  const std::size_t n = active.size();
  if (rate <= 0.0) return;
  if (rate >= 1.0) {
    for (std::size_t v = 0; v < n; ++v)
      if (!active[v]) joined.push_back(static_cast<NodeIndex>(v));
    return;
  }
  const double log_miss = std::log1p(-rate);
  double pos = -1.0;
  while (true) {
    pos += 1.0 + std::floor(std::log(uniform_open01(rng)) / log_miss);
    if (pos >= static_cast<double>(n)) break;
    const auto v = static_cast<std::size_t>(pos);
    if (!active[v]) joined.push_back(static_cast<NodeIndex>(v));
  }
}

struct StoryStreams {
  Rng network;
  Rng background;
};

StoryStreams streams_for(std::uint64_t master_seed, std::size_t index) {
  return {Rng(derive_seed(master_seed, index, 1)), Rng(derive_seed(master_seed, index, 2))};
}

SimulatedStory evolve(const FollowerGraph& g, const std::vector<NodeIndex>& seeds,
                      double p, const std::optional<PromotionConfig>& promotion,
                      Rng& network, Rng* background) {
  SimulatedStory story;
  std::vector<char> active(g.node_count(), 0);
  std::vector<NodeIndex> frontier;
  for (NodeIndex s : seeds) {
    if (s >= g.node_count()) throw std::out_of_range("seed outside graph");
    if (active[s]) continue;
    active[s] = 1;
    frontier.push_back(s);
    story.sequence.activations.push_back({g.label(s), 0});
  }
  story.activations_per_step.push_back(frontier.size());
  std::size_t total = frontier.size();

  auto check_promotion = [&](std::int64_t step) {
    if (promotion && !story.promoted && total > 0 && total >= promotion->threshold) {
      story.promoted = true;
      story.promotion_step = step;
    }
  };
  check_promotion(0);

  std::vector<NodeIndex> next;
  for (std::int64_t step = 1;; ++step) {
    if (promotion ? step > promotion->horizon : frontier.empty()) break;
    if (frontier.empty() && !story.promoted) break;
    next.clear();
    for (NodeIndex v : frontier) {
      for (NodeIndex u : g.followers(v)) {
        if (active[u] || !bernoulli(network, p)) continue;
        active[u] = 1;
        next.push_back(u);
        story.transmissions.push_back({v, u});
      }
    }
    if (story.promoted && background) {
      const std::size_t before = next.size();
      background_adoption(*background, promotion->rate, active, next);
      for (std::size_t i = before; i < next.size(); ++i) active[next[i]] = 1;
    }
    for (NodeIndex u : next) story.sequence.activations.push_back({g.label(u), step});
    story.activations_per_step.push_back(next.size());
    total += next.size();
    frontier.swap(next);
    check_promotion(step);
  }
  return story;
}

std::vector<NodeIndex> choose_seeds(const FollowerGraph& g, std::size_t count, Rng& rng) {
  count = std::min(count, g.node_count());
  std::vector<NodeIndex> seeds;
  while (seeds.size() < count) {
    const auto v = static_cast<NodeIndex>(uniform_index(rng, g.node_count()));
    if (std::find(seeds.begin(), seeds.end(), v) == seeds.end()) seeds.push_back(v);
  }
  return seeds;
}

template <class T>
T require(const nlohmann::json& obj, const char* section, const char* field) {
  if (!obj.contains(field))
    throw ConfigError(std::string(section) + "." + field + ": missing");
  try {
    return obj.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(section) + "." + field + ": wrong type");
  }
}

template <class T>
T optional_field(const nlohmann::json& obj, const char* section, const char* field,
                 T fallback) {
  if (!obj.contains(field)) return fallback;
  return require<T>(obj, section, field);
}

std::size_t require_count(const nlohmann::json& obj, const char* section,
                          const char* field, std::optional<std::size_t> fallback = {}) {
  if (!obj.contains(field) && fallback) return *fallback;
  const auto& value = obj.contains(field) ? obj.at(field) : nlohmann::json();
  if (!value.is_number_integer() || value.get<long long>() < 0)
    throw ConfigError(std::string(section) + "." + field +
                      (obj.contains(field) ? ": must be a non-negative integer"
                                           : ": missing"));
  return value.get<std::size_t>();
}

Topology parse_topology(const std::string& name) {
  if (name == "uniform-random") return Topology::uniform_random;
  if (name == "preferential-attachment") return Topology::preferential_attachment;
  if (name == "community-blocks") return Topology::community_blocks;
  throw ConfigError("graph.topology: unknown topology '" + name + "'");
}

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::uniform_random: return "uniform-random";
    case Topology::preferential_attachment: return "preferential-attachment";
    case Topology::community_blocks: return "community-blocks";
  }
  return "?";
}

}  // namespace

void validate(const GraphConfig& cfg) {
  if (cfg.nodes < 1) throw ConfigError("graph.nodes: must be at least 1");
  if (!(cfg.mean_out_degree >= 0.0))
    throw ConfigError("graph.mean_out_degree: must be non-negative");
  if (cfg.mean_out_degree >= static_cast<double>(cfg.nodes) &&
      cfg.mean_out_degree > 0.0)
    throw ConfigError("graph.mean_out_degree: must be below the node count");
  if (cfg.topology == Topology::uniform_random &&
      cfg.mean_out_degree > static_cast<double>(cfg.nodes - 1))
    throw ConfigError("graph.mean_out_degree: exceeds n - 1");
  if (cfg.topology == Topology::community_blocks) {
    if (cfg.blocks < 1 || cfg.blocks > cfg.nodes)
      throw ConfigError("graph.blocks: must be in [1, nodes]");
    if (!(cfg.intra_fraction >= 0.0 && cfg.intra_fraction <= 1.0))
      throw ConfigError("graph.intra_fraction: must be in [0, 1]");
  }
}

void validate(const ContagionConfig& cfg) {
  if (!(cfg.transmission_probability >= 0.0 && cfg.transmission_probability <= 1.0))
    throw ConfigError("contagion.transmission_probability: must be in [0, 1]");
  if (cfg.seeds_per_story < 1)
    throw ConfigError("contagion.seeds_per_story: must be at least 1");
  if (cfg.promotion) {
    if (cfg.promotion->threshold < 1)
      throw ConfigError("contagion.promotion.threshold: must be at least 1");
    if (!(cfg.promotion->rate >= 0.0 && cfg.promotion->rate <= 1.0))
      throw ConfigError("contagion.promotion.rate: must be in [0, 1]");
    if (cfg.promotion->horizon < 0)
      throw ConfigError("contagion.promotion.horizon: must be non-negative");
  }
}

FollowerGraph generate_graph(const GraphConfig& cfg, Rng& rng) {
  validate(cfg);
  switch (cfg.topology) {
    case Topology::uniform_random: return uniform_random(cfg, rng);
    case Topology::preferential_attachment: return preferential_attachment(cfg, rng);
    case Topology::community_blocks: return community_blocks(cfg, rng);
  }
  throw ConfigError("graph.topology: unknown");
}

SimulatedStory run_independent_cascade(const FollowerGraph& g,
                                       const std::vector<NodeIndex>& seeds, double p,
                                       Rng& rng) {
  return evolve(g, seeds, p, std::nullopt, rng, nullptr);
}

SimulatedStory simulate_story(const FollowerGraph& g, const ContagionConfig& cfg,
                              std::uint64_t master_seed, std::size_t index) {
  auto streams = streams_for(master_seed, index);
  const auto seeds = choose_seeds(g, cfg.seeds_per_story, streams.network);
  auto story = evolve(g, seeds, cfg.transmission_probability, cfg.promotion,
                      streams.network, &streams.background);
  story.sequence.story_id = story_id_for(index, cfg.stories);
  return story;
}

std::string story_id_for(std::size_t index, std::size_t story_count) {
  const std::size_t width =
      std::max<std::size_t>(4, std::to_string(story_count > 0 ? story_count - 1 : 0).size());
  std::string digits = std::to_string(index);
  return "s" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

ActivationLog SimulatedCorpus::log() const {
  std::vector<ActivationSequence> sequences;
  sequences.reserve(stories.size());
  for (const auto& s : stories) sequences.push_back(s.sequence);
  return make_log(std::move(sequences));
}

std::vector<std::string> SimulatedCorpus::promoted_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : stories)
    if (s.promoted) ids.push_back(s.sequence.story_id);
  return ids;
}

SimulatedCorpus run_promotion_experiment(const FollowerGraph& g,
                                         const ContagionConfig& cfg,
                                         std::uint64_t master_seed, std::size_t jobs) {
  validate(cfg);
  if (g.node_count() == 0) throw ConfigError("graph: no nodes to seed stories");
  SimulatedCorpus corpus;
  corpus.stories.resize(cfg.stories);
  parallel_for(cfg.stories, jobs, [&](std::size_t i) {
    corpus.stories[i] = simulate_story(g, cfg, master_seed, i);
  });
  return corpus;
}

std::size_t tune_promotion_threshold(const FollowerGraph& g, const ContagionConfig& cfg,
                                     std::uint64_t master_seed, double target_fraction,
                                     std::size_t jobs) {
  if (!cfg.promotion) throw ConfigError("contagion.promotion: missing");
  if (!(target_fraction >= 0.0 && target_fraction <= 1.0))
    throw ConfigError("contagion.promotion.target_fraction: must be in [0, 1]");
  // Sizes reached by the horizon with promotion disabled; promotion only
  // changes what happens after the threshold is crossed.
  ContagionConfig probe = cfg;
  probe.promotion = PromotionConfig{std::numeric_limits<std::size_t>::max(), 0.0,
                                    cfg.promotion->horizon};
  const auto corpus = run_promotion_experiment(g, probe, master_seed, jobs);
  std::vector<std::size_t> sizes;
  for (const auto& s : corpus.stories) sizes.push_back(s.sequence.size());
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  const auto allowed = static_cast<std::size_t>(
      std::floor(target_fraction * static_cast<double>(sizes.size())));
  if (allowed == 0) return sizes.empty() ? 1 : sizes.front() + 1;
  if (allowed >= sizes.size()) return 1;
  // Promote the `allowed` largest, excluding a size tied with the first
  // story left out.
  return std::max<std::size_t>(1, sizes[allowed] + 1);
}

SimulationConfig parse_simulation_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  if (!j.contains("graph") || !j.at("graph").is_object())
    throw ConfigError("graph: missing section");
  if (!j.contains("contagion") || !j.at("contagion").is_object())
    throw ConfigError("contagion: missing section");
  SimulationConfig cfg;
  const auto& gj = j.at("graph");
  cfg.graph.topology = parse_topology(require<std::string>(gj, "graph", "topology"));
  cfg.graph.nodes = require_count(gj, "graph", "nodes");
  cfg.graph.mean_out_degree = require<double>(gj, "graph", "mean_out_degree");
  cfg.graph.blocks = require_count(gj, "graph", "blocks", 1);
  cfg.graph.intra_fraction = optional_field<double>(gj, "graph", "intra_fraction", 1.0);
  validate(cfg.graph);

  const auto& cj = j.at("contagion");
  cfg.contagion.transmission_probability =
      require<double>(cj, "contagion", "transmission_probability");
  cfg.contagion.seeds_per_story = require_count(cj, "contagion", "seeds_per_story", 1);
  cfg.contagion.stories = require_count(cj, "contagion", "stories");
  if (cj.contains("promotion") && !cj.at("promotion").is_null()) {
    const auto& pj = cj.at("promotion");
    if (!pj.is_object()) throw ConfigError("contagion.promotion: expected an object");
    PromotionConfig promo;
    const char* section = "contagion.promotion";
    promo.rate = require<double>(pj, section, "rate");
    promo.horizon = require<std::int64_t>(pj, section, "horizon");
    if (pj.contains("threshold")) {
      promo.threshold = require_count(pj, section, "threshold");
    } else if (pj.contains("target_fraction")) {
      cfg.target_promoted_fraction = require<double>(pj, section, "target_fraction");
      if (!(*cfg.target_promoted_fraction >= 0.0 && *cfg.target_promoted_fraction <= 1.0))
        throw ConfigError("contagion.promotion.target_fraction: must be in [0, 1]");
    } else {
      throw ConfigError("contagion.promotion.threshold: missing (or give target_fraction)");
    }
    cfg.contagion.promotion = promo;
  }
  validate(cfg.contagion);
  return cfg;
}

nlohmann::json to_json(const SimulationConfig& cfg) {
  nlohmann::json graph = {{"topology", topology_name(cfg.graph.topology)},
                          {"nodes", cfg.graph.nodes},
                          {"mean_out_degree", cfg.graph.mean_out_degree}};
  if (cfg.graph.topology == Topology::community_blocks) {
    graph["blocks"] = cfg.graph.blocks;
    graph["intra_fraction"] = cfg.graph.intra_fraction;
  }
  nlohmann::json contagion = {
      {"transmission_probability", cfg.contagion.transmission_probability},
      {"seeds_per_story", cfg.contagion.seeds_per_story},
      {"stories", cfg.contagion.stories}};
  if (cfg.contagion.promotion) {
    const auto& p = *cfg.contagion.promotion;
    contagion["promotion"] = {{"threshold", p.threshold},
                              {"rate", p.rate},
                              {"horizon", p.horizon}};
    if (cfg.target_promoted_fraction)
      contagion["promotion"]["target_fraction"] = *cfg.target_promoted_fraction;
  }
  return {{"graph", std::move(graph)}, {"contagion", std::move(contagion)}};
}

}  // namespace cascades

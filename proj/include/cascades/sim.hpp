#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cascades/events.hpp"
#include "cascades/graph.hpp"
#include "cascades/random.hpp"
#include "json.hpp"

namespace cascades {

enum class Topology { uniform_random, preferential_attachment, community_blocks };

struct GraphConfig {
  Topology topology = Topology::uniform_random;
  std::size_t nodes = 1;
  double mean_out_degree = 0.0;
  std::size_t blocks = 1;        // community_blocks only
  double intra_fraction = 1.0;   // community_blocks only
};

struct PromotionConfig {
  std::size_t threshold = 1;  // activations needed to reach the front page
  double rate = 0.0;          // per-step background adoption probability
  std::int64_t horizon = 0;   // last simulated step
};

struct ContagionConfig {
  double transmission_probability = 0.0;
  std::size_t seeds_per_story = 1;
  std::size_t stories = 1;
  std::optional<PromotionConfig> promotion;
};

// Invalid configuration; what() names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const GraphConfig& cfg);
void validate(const ContagionConfig& cfg);

// Node labels are "0" .. "n-1". Throws ConfigError on infeasible settings.
FollowerGraph generate_graph(const GraphConfig& cfg, Rng& rng);

struct Transmission {
  NodeIndex from;  // followee that was already active
  NodeIndex to;    // follower it activated
  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct SimulatedStory {
  ActivationSequence sequence;  // times are step indices
  std::vector<Transmission> transmissions;
  std::vector<std::size_t> activations_per_step;
  bool promoted = false;
  std::optional<std::int64_t> promotion_step;

  friend bool operator==(const SimulatedStory&, const SimulatedStory&) = default;
};

// Discrete-round independent cascade: every newly active node gets one
// chance per follower with probability p. Runs until no new activations.
SimulatedStory run_independent_cascade(const FollowerGraph& g,
                                       const std::vector<NodeIndex>& seeds, double p,
                                       Rng& rng);

// One story of a corpus. Network transmissions and background adoption draw
// from separate streams derived from (master_seed, index), so the dynamics
// before promotion do not depend on the promotion settings.
SimulatedStory simulate_story(const FollowerGraph& g, const ContagionConfig& cfg,
                              std::uint64_t master_seed, std::size_t index);

struct SimulatedCorpus {
  std::vector<SimulatedStory> stories;  // story ids sort in index order

  ActivationLog log() const;
  std::vector<std::string> promoted_ids() const;
};

std::string story_id_for(std::size_t index, std::size_t story_count);

SimulatedCorpus run_promotion_experiment(const FollowerGraph& g,
                                         const ContagionConfig& cfg,
                                         std::uint64_t master_seed,
                                         std::size_t jobs = 1);

// Smallest threshold promoting at most `target_fraction` of the stories
// (at least one vote). Uses the same streams as run_promotion_experiment.
std::size_t tune_promotion_threshold(const FollowerGraph& g, const ContagionConfig& cfg,
                                     std::uint64_t master_seed, double target_fraction,
                                     std::size_t jobs = 1);

struct SimulationConfig {
  GraphConfig graph;
  ContagionConfig contagion;
  // When set (and no explicit threshold is given) the promotion threshold is
  // tuned to promote about this share of stories.
  std::optional<double> target_promoted_fraction;
};

// JSON: {"graph": {topology, nodes, mean_out_degree, blocks, intra_fraction},
//        "contagion": {transmission_probability, seeds_per_story, stories,
//                      promotion: {threshold | target_fraction, rate, horizon}}}
SimulationConfig parse_simulation_config(const nlohmann::json& j);
nlohmann::json to_json(const SimulationConfig& cfg);

}  // namespace cascades

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cascades/cascade.hpp"
#include "cascades/histogram.hpp"
#include "json.hpp"

namespace cascades {

// Diameters are in edges (hops); a seed-only cascade has diameter 0.
struct CascadeMetrics {
  std::uint64_t size = 0;
  std::uint64_t max_diameter = 0;  // longest chain anywhere in the cascade
  std::uint64_t min_diameter = 0;  // eccentricity of the seed
  std::uint64_t spread = 0;        // largest out-degree of a member
  std::uint64_t edge_count = 0;

  friend bool operator==(const CascadeMetrics&, const CascadeMetrics&) = default;
};

CascadeMetrics cascade_metrics(const Cascade& c);

struct StoryMetrics {
  std::string story_id;
  std::uint64_t activated = 0;
  std::uint64_t seed_count = 0;
  std::vector<CascadeMetrics> cascades;  // seed order
  std::uint64_t largest_cascade_size = 0;
  std::uint64_t global_max_diameter = 0;
  // Max over activated nodes of the distance to the nearest seed.
  std::uint64_t global_min_diameter = 0;
  std::uint64_t global_spread = 0;
  std::uint64_t community_value = 0;  // activation-edge count
  double normalized_community_value = 0.0;
  CascadeMetrics principal;
  bool principal_is_seed = true;

  friend bool operator==(const StoryMetrics&, const StoryMetrics&) = default;
};

// `cascades` must be extract_cascades(d).
StoryMetrics story_metrics(const ActivationDag& d, const std::vector<Cascade>& cascades,
                           std::string_view submitter);

// Builds the DAG, cascades and metrics of one story.
StoryMetrics analyze_story(const FollowerGraph& g, const ActivationSequence& s);

void to_json(nlohmann::json& j, const CascadeMetrics& m);
void to_json(nlohmann::json& j, const StoryMetrics& m);

// Histogram per corpus metric, keyed by file-friendly metric name, e.g.
// "principal_size". global_cascade_size pools every cascade of every story.
std::map<std::string, Histogram> corpus_distributions(
    const std::vector<StoryMetrics>& stories);

// Names emitted by corpus_distributions, in a fixed order.
const std::vector<std::string>& corpus_metric_names();

}  // namespace cascades

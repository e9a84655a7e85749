#include <random>
#include <sstream>

#include "cascades/metrics.hpp"
#include "cascades/sim.hpp"
#include "doctest.h"
#include "support/fixture.hpp"
#include "support/instance.hpp"
#include "support/oracle.hpp"

using namespace cascades;

namespace {

StoryMetrics fixture_metrics() {
  return analyze_story(testing::fixture_graph(), testing::fixture_sequence());
}

}  // namespace

TEST_CASE("fixture cascade metrics") {
  const auto d =
      build_activation_dag(testing::fixture_graph(), testing::fixture_sequence());
  const auto cascades = extract_cascades(d);
  const auto yellow = cascade_metrics(cascades[0]);
  CHECK(yellow.size == 5);
  CHECK(yellow.max_diameter == 2);
  CHECK(yellow.min_diameter == 1);
  CHECK(yellow.spread == 4);
  CHECK(yellow.edge_count == 5);
  const auto red = cascade_metrics(cascades[1]);
  CHECK(red.size == 3);
  CHECK(red.spread == 2);
  CHECK(red.edge_count == 2);
}

TEST_CASE("fixture story metrics") {
  const auto m = fixture_metrics();
  CHECK(m.community_value == 7);
  CHECK(m.normalized_community_value == 1.0);
  CHECK(m.largest_cascade_size == 5);
  CHECK(m.global_spread == 4);
  CHECK(m.global_min_diameter == 1);
  CHECK(m.global_max_diameter == 2);
  CHECK(m.principal == m.cascades[0]);
  CHECK(m.seed_count == 2);
  const nlohmann::json j = m;
  CHECK(j.at("principal").at("spread") == 4);
  CHECK(j.at("cascades").size() == 2);
}

TEST_CASE("seed-only cascade metrics are zero") {
  Cascade c;
  c.seed = 0;
  c.members = {0};
  CHECK(cascade_metrics(c) == CascadeMetrics{1, 0, 0, 0, 0});
}

TEST_CASE("all-isolated story") {
  ActivationSequence s{"iso", {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}}, {}};
  const auto m = analyze_story(testing::fixture_graph(), s);
  CHECK(m.community_value == 0);
  CHECK(m.normalized_community_value == 0.0);
  CHECK(m.global_max_diameter == 0);
  CHECK(m.global_min_diameter == 0);
  CHECK(m.cascades.size() == 4);
}

TEST_CASE("random instances match the exhaustive oracle") {
  std::mt19937_64 rng(4321);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_instance(rng);
    const auto o = testing::brute_force(inst);
    const auto m =
        analyze_story(testing::graph_of(inst), testing::sequence_of(inst));
    REQUIRE(m.cascades.size() == o.cascades.size());
    for (std::size_t i = 0; i < o.cascades.size(); ++i) {
      CHECK(m.cascades[i].size == o.cascades[i].size);
      CHECK(m.cascades[i].max_diameter == o.cascades[i].max_diameter);
      CHECK(m.cascades[i].min_diameter == o.cascades[i].min_diameter);
      CHECK(m.cascades[i].spread == o.cascades[i].spread);
      CHECK(m.cascades[i].edge_count == o.cascades[i].edges);
    }
    CHECK(m.largest_cascade_size == o.largest);
    CHECK(m.global_max_diameter == o.global_max_diameter);
    CHECK(m.global_min_diameter == o.global_min_diameter);
    CHECK(m.global_spread == o.global_spread);
    CHECK(m.community_value == o.community_value);
    CHECK(m.normalized_community_value == o.normalized);
    CHECK(m.principal == m.cascades[0]);  // first activation is always a seed
  }
}

TEST_CASE("metric invariants on random instances") {
  std::mt19937_64 rng(999);
  for (int trial = 0; trial < 300; ++trial) {
    const auto inst = testing::random_instance(rng);
    const auto g = testing::graph_of(inst);
    const auto s = testing::sequence_of(inst);
    const auto d = build_activation_dag(g, s);
    const auto m = analyze_story(g, s);
    for (const auto& c : m.cascades) {
      CHECK(c.size >= 1);
      CHECK(c.min_diameter <= c.max_diameter);
      CHECK(c.max_diameter <= c.size - 1);
      CHECK(c.spread <= c.size - 1);
    }
    CHECK(m.global_min_diameter <= m.global_max_diameter);

    const double n = static_cast<double>(m.activated);
    const double bound = (n - static_cast<double>(m.seed_count)) / n;
    CHECK(m.normalized_community_value >= bound - 1e-12);
    bool tree_like = true;
    for (Position p = 0; p < d.node_count(); ++p)
      if (d.in_edges(p).size() > 1) tree_like = false;
    CHECK((m.normalized_community_value == bound) == tree_like);

    // Dropping a non-seed voter never raises the community value.
    const auto seeds = identify_seeds(d);
    for (Position p = 0; p < d.node_count(); ++p) {
      if (std::find(seeds.begin(), seeds.end(), p) != seeds.end()) continue;
      auto shorter = s;
      shorter.activations.erase(shorter.activations.begin() + p);
      CHECK(analyze_story(g, shorter).community_value <= m.community_value);
      break;
    }
  }
}

TEST_CASE("corpus distributions of the fixture") {
  const auto h = corpus_distributions({fixture_metrics()});
  const auto& sizes = h.at("global_cascade_size");
  CHECK(sizes.count(5) == 1);
  CHECK(sizes.count(3) == 1);
  CHECK(sizes.total() == 2);
  CHECK(h.at("principal_size").count(5) == 1);
  CHECK(h.at("community_value").count(7) == 1);
  CHECK(h.at("normalized_community_value").count(1.0) == 1);
  CHECK(h.size() == corpus_metric_names().size());

  const auto rows = sizes.rows();
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ccdf == 1.0);
  CHECK(rows[1].ccdf == 0.5);
}

TEST_CASE("corpus distributions are additive") {
  const auto one = corpus_distributions({fixture_metrics()});
  const auto two = corpus_distributions({fixture_metrics(), fixture_metrics()});
  for (const auto& [name, h] : one)
    for (const auto& [value, count] : h.counts()) CHECK(two.at(name).count(value) == 2 * count);
}

TEST_CASE("pooled cascade sizes total the per-story cascade counts") {
  Rng rng(17);
  const auto g = generate_graph({Topology::preferential_attachment, 2000, 5.0}, rng);
  ContagionConfig cfg;
  cfg.transmission_probability = 0.1;
  cfg.seeds_per_story = 3;
  cfg.stories = 500;
  const auto corpus = run_promotion_experiment(g, cfg, 5);
  const auto log = corpus.log();
  std::vector<StoryMetrics> all;
  std::size_t cascades = 0;
  for (const auto& [id, seq] : log.stories) {
    all.push_back(analyze_story(g, seq));
    cascades += all.back().cascades.size();
  }
  const auto h = corpus_distributions(all);
  CHECK(h.at("global_cascade_size").total() == cascades);
  CHECK(h.at("principal_size").total() == 500);
}

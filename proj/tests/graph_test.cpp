#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "cascades/graph.hpp"
#include "cascades/random.hpp"
#include "cascades/sim.hpp"
#include "doctest.h"
#include "support/fixture.hpp"

using namespace cascades;

namespace {

FollowerGraph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_follower_graph(in);
}

std::vector<std::string> labels_of(const FollowerGraph& g, std::span<const NodeIndex> xs) {
  std::vector<std::string> out;
  for (auto v : xs) out.push_back(g.label(v));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("loader reads follower/followee pairs") {
  const auto g = parse("4 1\n4 2\n");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  const auto out = g.followees("4");
  REQUIRE(out.known);
  CHECK(labels_of(g, out.nodes) == std::vector<std::string>{"1", "2"});
  CHECK(labels_of(g, g.followers("1").nodes) == std::vector<std::string>{"4"});
}

TEST_CASE("empty input is an empty graph") {
  const auto g = parse("");
  CHECK(g.node_count() == 0);
  CHECK(g.edge_count() == 0);
  CHECK(degree_distribution(g, DegreeDirection::in).empty());
}

TEST_CASE("duplicates collapse and self-loops drop") {
  const auto g = parse("a b\na b\nc c\n");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.summary().dropped_self_loops == 1);
  CHECK(g.summary().collapsed_duplicates == 1);
  const nlohmann::json j = g.summary();
  CHECK(j == nlohmann::json{{"nodes", 2},
                            {"edges", 1},
                            {"dropped_self_loops", 1},
                            {"collapsed_duplicates", 1}});
}

TEST_CASE("comments, blank lines and tabs are accepted") {
  const auto g = parse("# header\n\n1\t2\n  3   2  \n");
  CHECK(g.edge_count() == 2);
  CHECK(g.follows(*g.find("3"), *g.find("2")));
}

TEST_CASE("malformed lines report the line number") {
  CHECK_THROWS_WITH_AS(parse("1 2\n3\n"), doctest::Contains(":2:"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse("1 2\n\n1 2 3\n"), doctest::Contains(":3:"), std::runtime_error);
  CHECK_THROWS_AS(load_follower_graph("/nonexistent/graph.tsv"), std::runtime_error);
}

TEST_CASE("fixture followers") {
  const auto g = testing::fixture_graph();
  CHECK(labels_of(g, g.followers("1").nodes) ==
        std::vector<std::string>{"3", "4", "6", "7"});
  CHECK(g.followers("5").known);
  CHECK(g.followers("5").nodes.empty());
  const auto unknown = g.followers("42");
  CHECK_FALSE(unknown.known);
  CHECK(unknown.nodes.empty());
}

TEST_CASE("isolated node has no followers") {
  GraphBuilder b;
  b.add_node("lonely");
  const auto g = std::move(b).build();
  CHECK(g.followers(0).empty());
  const auto h = degree_distribution(g, DegreeDirection::in);
  CHECK(h.count(0) == 1);
  CHECK(h.total() == 1);
}

TEST_CASE("fixture in-degree histogram") {
  const auto g = testing::fixture_graph();
  const auto in = degree_distribution(g, DegreeDirection::in);
  CHECK(in.count(4) == 1);  // user 1
  CHECK(in.total() == g.node_count());
  // in: 1->4, 2->2, 3->1, others 0
  CHECK(in.count(0) == 4);
  CHECK(in.count(1) == 1);
  CHECK(in.count(2) == 1);
}

TEST_CASE("adjacency views match a scan of the edge list") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<int, int>> raw;
    std::ostringstream text;
    std::uniform_int_distribution<int> node(0, 9);
    for (int e = 0; e < 30; ++e) {
      const int u = node(rng), v = node(rng);
      raw.emplace_back(u, v);
      text << u << ' ' << v << '\n';
    }
    const auto g = parse(text.str());
    std::size_t in_sum = 0, out_sum = 0;
    for (NodeIndex v = 0; v < g.node_count(); ++v) {
      std::set<std::string> expected;
      for (auto [a, b] : raw)
        if (std::to_string(b) == g.label(v) && a != b) expected.insert(std::to_string(a));
      const auto got = labels_of(g, g.followers(v));
      CHECK(std::vector<std::string>(expected.begin(), expected.end()) == got);
      CHECK(std::is_sorted(g.followers(v).begin(), g.followers(v).end()));
      in_sum += g.in_degree(v);
      out_sum += g.out_degree(v);
      for (NodeIndex u : g.followers(v)) CHECK(g.follows(u, v));
    }
    CHECK(in_sum == g.edge_count());
    CHECK(out_sum == g.edge_count());
    // Queries are repeatable.
    for (NodeIndex v = 0; v < g.node_count(); ++v)
      CHECK(labels_of(g, g.followees(v)) == labels_of(g, g.followees(v)));
  }
}

TEST_CASE("write then load preserves the edge set") {
  Rng rng(11);
  const auto g = generate_graph({Topology::uniform_random, 60, 4.0}, rng);
  const auto path = std::filesystem::temp_directory_path() / "cascades_graph_roundtrip.tsv";
  write_follower_graph(g, path);
  const auto back = load_follower_graph(path);
  std::set<std::pair<std::string, std::string>> a, b;
  for (auto [u, v] : g.edges()) a.emplace(g.label(u), g.label(v));
  for (auto [u, v] : back.edges()) b.emplace(back.label(u), back.label(v));
  CHECK(a == b);
  std::filesystem::remove(path);
}

TEST_CASE("preferential attachment in-degree is heavy tailed") {
  Rng rng(2024);
  const auto g = generate_graph({Topology::preferential_attachment, 1000, 10.0}, rng);
  std::vector<std::size_t> in;
  for (NodeIndex v = 0; v < g.node_count(); ++v) in.push_back(g.in_degree(v));
  std::sort(in.begin(), in.end());
  const double median = 0.5 * static_cast<double>(in[499] + in[500]);
  CHECK(static_cast<double>(in.back()) >= 10.0 * median);
  const auto h = degree_distribution(g, DegreeDirection::in);
  CHECK(h.total() == 1000);
  CHECK(h.counts().rbegin()->first == static_cast<double>(in.back()));
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cascades/commands.hpp"
#include "cascades/histogram.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support/fixture.hpp"
#include "support/synthetic.hpp"

using namespace cascades;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("cascades_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(read_file(path)); }

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd =
      std::string(CASCADES_CLI) + " " + args + " >/dev/null 2>" + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_sim_config(const fs::path& path, double p, std::size_t stories,
                      const std::string& promotion = "") {
  std::ostringstream cfg;
  cfg << R"({"graph": {"topology": "preferential-attachment", "nodes": 2000,
                       "mean_out_degree": 5},
             "contagion": {"transmission_probability": )"
      << p << R"(, "stories": )" << stories
      << (promotion.empty() ? "" : ", \"promotion\": " + promotion) << "}}";
  write_file(path, cfg.str());
}

}  // namespace

TEST_CASE("analyze the fixture end to end") {
  TempDir dir("analyze_fixture");
  write_file(dir.path / "graph.tsv", testing::kFixtureEdges);
  write_file(dir.path / "log.csv", testing::kFixtureLog);
  const auto summary =
      cmd_analyze({dir.path / "graph.tsv", dir.path / "log.csv", dir.path / "out", 2, true});
  CHECK(summary.stories == 1);
  CHECK(summary.cascades == 2);
  CHECK(summary.activation_edges == 7);

  const auto principal = Histogram::read_csv(dir.path / "out/distributions/principal_size.csv");
  CHECK(principal.count(5) == 1);
  CHECK(read_file(dir.path / "out/distributions/principal_size.csv") ==
        "value,count,ccdf\n5,1,1\n");
  const auto story = nlohmann::json::parse(read_file(dir.path / "out/stories.jsonl"));
  CHECK(story.at("community_value") == 7);
  CHECK(story.at("principal").at("max_diameter") == 2);
  const auto dag = nlohmann::json::parse(read_file(dir.path / "out/dags.jsonl"));
  CHECK(dag.at("seeds") == nlohmann::json::array({"1", "2"}));
  const auto s = read_json(dir.path / "out/summary.json");
  CHECK(s.at("graph").at("edges") == 7);
  CHECK(s.at("validation").at("unknown_users") == 0);
  CHECK(fs::exists(dir.path / "out/timing.json"));
}

TEST_CASE("analyze an empty log") {
  TempDir dir("analyze_empty");
  write_file(dir.path / "graph.tsv", testing::kFixtureEdges);
  write_file(dir.path / "log.csv", "story_id,user_id,timestamp\n");
  const auto summary =
      cmd_analyze({dir.path / "graph.tsv", dir.path / "log.csv", dir.path / "out", 1, false});
  CHECK(summary.stories == 0);
  CHECK(read_json(dir.path / "out/summary.json").at("stories") == 0);
  CHECK(read_file(dir.path / "out/distributions/principal_size.csv") == "value,count,ccdf\n");
}

TEST_CASE("simulate then analyze") {
  TempDir dir("sim_analyze");
  write_sim_config(dir.path / "cfg.json", 0.1, 100);
  cmd_simulate({dir.path / "cfg.json", 42, dir.path / "sim", 2});
  const auto summary = cmd_analyze(
      {dir.path / "sim/graph.tsv", dir.path / "sim/activations.csv", dir.path / "a", 2, false});
  CHECK(summary.stories == 100);
  const auto manifest = read_json(dir.path / "sim/manifest.json");
  CHECK(manifest.at("master_seed") == 42);
  CHECK(manifest.at("promoted").empty());

  // Same inputs, same outputs (timing.json aside), whatever the thread count.
  cmd_analyze({dir.path / "sim/graph.tsv", dir.path / "sim/activations.csv", dir.path / "b",
               1, false});
  for (const auto& entry : fs::recursive_directory_iterator(dir.path / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "timing.json") continue;
    const auto other = dir.path / "b" / fs::relative(entry.path(), dir.path / "a");
    CHECK_MESSAGE(read_file(entry.path()) == read_file(other), entry.path());
  }
}

TEST_CASE("simulate is byte-identical for a fixed seed") {
  TempDir dir("sim_repeat");
  write_sim_config(dir.path / "cfg.json", 0.1, 30,
                   R"({"threshold": 5, "rate": 0.01, "horizon": 10})");
  cmd_simulate({dir.path / "cfg.json", 42, dir.path / "one", 1});
  cmd_simulate({dir.path / "cfg.json", 42, dir.path / "two", 3});
  for (const char* name : {"graph.tsv", "activations.csv", "manifest.json"})
    CHECK(read_file(dir.path / "one" / name) == read_file(dir.path / "two" / name));
}

TEST_CASE("zero transmission corpus is all seed-only cascades") {
  TempDir dir("sim_p0");
  write_sim_config(dir.path / "cfg.json", 0.0, 50);
  cmd_simulate({dir.path / "cfg.json", 1, dir.path / "sim", 1});
  cmd_analyze({dir.path / "sim/graph.tsv", dir.path / "sim/activations.csv", dir.path / "a",
               1, false});
  const auto sizes = Histogram::read_csv(dir.path / "a/distributions/global_cascade_size.csv");
  CHECK(sizes.counts().size() == 1);
  CHECK(sizes.count(1) == 50);
}

TEST_CASE("tuned promotion config promotes about five percent") {
  TempDir dir("sim_promo");
  write_sim_config(dir.path / "cfg.json", 0.15, 400,
                   R"({"target_fraction": 0.05, "rate": 0.01, "horizon": 30})");
  cmd_simulate({dir.path / "cfg.json", 7, dir.path / "sim", 1});
  const auto manifest = read_json(dir.path / "sim/manifest.json");
  const auto promoted = manifest.at("promoted").size();
  CHECK(promoted >= 10);
  CHECK(promoted <= 20);
  CHECK(manifest.at("config").at("contagion").at("promotion").contains("threshold"));
}

TEST_CASE("fit ranks per metric and flags degenerate input") {
  TempDir dir("fit");
  std::mt19937_64 rng(3);
  Histogram ln;
  for (double x : testing::lognormal_draws(rng, 5000, 2.0, 0.8)) ln.add(x);
  ln.write_csv(dir.path / "lognormal_metric.csv");
  write_file(dir.path / "single.csv", "value,count,ccdf\n5,4,1\n");
  write_file(dir.path / "one.csv", "value,count,ccdf\n0,3,1\n5,1,0.25\n");

  const auto results = cmd_fit({{dir.path}, {Family::lognormal, Family::weibull,
                                             Family::powerlaw}, dir.path / "fits"});
  REQUIRE(results.size() == 3);
  const auto& by_name = [&](const std::string& name) -> const MetricFits& {
    return *std::find_if(results.begin(), results.end(),
                         [&](const MetricFits& m) { return m.metric == name; });
  };
  CHECK(by_name("lognormal_metric").fits.ranked.front().family() == Family::lognormal);
  CHECK(by_name("single").fits.ranked.front().degenerate);
  CHECK(by_name("one").dropped_nonpositive == 3);
  CHECK(by_name("one").fits.ranked.empty());
  CHECK(by_name("one").fits.failures.size() == 3);

  const auto csv = read_file(dir.path / "fits/fits.csv");
  CHECK(csv.find("lognormal_metric,1,lognormal,mu=") != std::string::npos);
  CHECK(csv.find("single,1,lognormal") != std::string::npos);
  CHECK(csv.find(",degenerate\n") != std::string::npos);
  CHECK(csv.find("one,,powerlaw") != std::string::npos);
  const auto doc = read_json(dir.path / "fits/fits.json");
  CHECK(doc.at("lognormal_metric").at("ranked").size() == 3);
}

TEST_CASE("report merges distributions and fits") {
  TempDir dir("report");
  write_file(dir.path / "graph.tsv", testing::kFixtureEdges);
  write_file(dir.path / "log.csv", testing::kFixtureLog);
  cmd_analyze({dir.path / "graph.tsv", dir.path / "log.csv", dir.path / "out", 1, false});
  cmd_report({dir.path / "out", dir.path / "report"});
  const auto report = read_file(dir.path / "report/report.csv");
  CHECK(report.find("principal_size,1,5,5,5,") != std::string::npos);
  CHECK(report.find("global_cascade_size,2,4,4,5,") != std::string::npos);
}

TEST_CASE("cli exit codes and diagnostics") {
  TempDir dir("cli");
  const auto err = dir.path / "stderr.txt";
  write_file(dir.path / "graph.tsv", testing::kFixtureEdges);
  write_file(dir.path / "log.csv", testing::kFixtureLog);
  write_file(dir.path / "bad.tsv", "1 2\n3\n");

  const auto d = dir.path.string();
  CHECK(run_cli("analyze --graph " + d + "/graph.tsv --log " + d + "/log.csv --out " + d +
                    "/out --jobs 1",
                err) == 0);
  CHECK(run_cli("report --in " + d + "/out --out " + d + "/out", err) == 0);
  CHECK(run_cli("fit --in " + d + "/out --families lognormal,powerlaw --out " + d + "/out",
                err) == 0);
  CHECK(fs::exists(dir.path / "out/fits.csv"));
  CHECK(run_cli("report --in " + d + "/out --out " + d + "/out", err) == 0);

  CHECK(run_cli("analyze --graph " + d + "/bad.tsv --log " + d + "/log.csv --out " + d +
                    "/x",
                err) != 0);
  CHECK(read_file(err).find("bad.tsv:2:") != std::string::npos);
  CHECK(run_cli("analyze --graph " + d + "/missing.tsv --log " + d + "/log.csv --out " + d +
                    "/x",
                err) != 0);
  write_file(dir.path / "cfg.json", R"({"graph": {"topology": "uniform-random", "nodes": 5,
      "mean_out_degree": 9}, "contagion": {"transmission_probability": 0.1, "stories": 1}})");
  CHECK(run_cli("simulate --config " + d + "/cfg.json --seed 1 --out " + d + "/s", err) != 0);
  CHECK(read_file(err).find("graph.mean_out_degree") != std::string::npos);
  CHECK(run_cli("fit --in " + d + "/out --families gamma --out " + d + "/f", err) != 0);
}

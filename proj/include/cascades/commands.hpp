#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cascades/fitting.hpp"
#include "cascades/parallel.hpp"

namespace cascades {

namespace fs = std::filesystem;

struct AnalyzeOptions {
  fs::path graph;
  fs::path log;
  fs::path out;
  std::size_t jobs = default_jobs();
  bool export_dags = false;
};

struct AnalyzeSummary {
  std::size_t stories = 0;
  std::size_t activations = 0;
  std::size_t cascades = 0;
  std::size_t activation_edges = 0;
  double elapsed_seconds = 0.0;
};

// Writes into `out`:
//   stories.jsonl            one metrics object per story, sorted by story id
//   distributions/<m>.csv    value,count,ccdf per corpus metric, plus the
//                            follower/followee/activity distributions
//   summary.json             counts, graph summary and validation report
//   timing.json              wall-clock time (kept apart so the rest of the
//                            output is reproducible byte for byte)
//   dags.jsonl               with export_dags
AnalyzeSummary cmd_analyze(const AnalyzeOptions& options);

struct FitOptions {
  std::vector<fs::path> inputs;  // CSV files or directories of CSV files
  std::vector<Family> families{Family::lognormal, Family::weibull, Family::powerlaw};
  fs::path out;
  std::size_t bootstrap = 0;  // repetitions; 0 disables p-values
  std::uint64_t seed = 0;
};

struct MetricFits {
  std::string metric;
  std::size_t dropped_nonpositive = 0;
  RankedFits fits;
};

// Writes fits.csv (one row per metric and family, ranked within a metric)
// and fits.json. Samples <= 0 are left out of every fit and counted.
std::vector<MetricFits> cmd_fit(const FitOptions& options);

struct SimulateOptions {
  fs::path config;
  std::uint64_t seed = 0;
  fs::path out;
  std::size_t jobs = default_jobs();
};

// Writes graph.tsv, activations.csv and manifest.json
// {master_seed, config, promoted, promotion_steps}.
void cmd_simulate(const SimulateOptions& options);

struct ReportOptions {
  fs::path in;
  fs::path out;
};

// Merges distributions and fits (fits.json if present, otherwise fitted on
// the spot) into report.csv.
void cmd_report(const ReportOptions& options);

// CSV files of a distribution directory; `dir/distributions` is preferred
// when it exists.
std::vector<fs::path> distribution_files(const fs::path& dir);

}  // namespace cascades

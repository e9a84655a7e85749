#include "cascades/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "cascades/cascade.hpp"
#include "cascades/events.hpp"
#include "cascades/graph.hpp"
#include "cascades/histogram.hpp"
#include "cascades/metrics.hpp"
#include "cascades/sim.hpp"
#include "json.hpp"

namespace cascades {

namespace {

using nlohmann::json;

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<double> positive_samples(const Histogram& h, std::size_t& dropped) {
  std::vector<double> out;
  dropped = 0;
  for (const auto& [value, count] : h.counts()) {
    if (value > 0.0) {
      out.insert(out.end(), count, value);
    } else {
      dropped += count;
    }
  }
  return out;
}

std::string status_of(const FitResult& r) {
  if (r.degenerate) return "degenerate";
  if (r.low_confidence) return "low_confidence";
  return "ok";
}

std::pair<std::string, std::string> param_cells(const FitResult& r) {
  return std::visit(
      [](const auto& p) -> std::pair<std::string, std::string> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LognormalParams>)
          return {"mu=" + format_number(p.mu), "sigma=" + format_number(p.sigma)};
        else if constexpr (std::is_same_v<P, WeibullParams>)
          return {"shape=" + format_number(p.shape), "scale=" + format_number(p.scale)};
        else
          return {"alpha=" + format_number(p.alpha), "xmin=" + format_number(p.xmin)};
      },
      r.params);
}

}  // namespace

std::vector<fs::path> distribution_files(const fs::path& dir) {
  fs::path base = dir;
  if (fs::is_directory(dir / "distributions")) base = dir / "distributions";
  if (!fs::is_directory(base)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(base))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

AnalyzeSummary cmd_analyze(const AnalyzeOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const auto graph = load_follower_graph(options.graph);
  const auto log = load_activation_log(options.log);

  std::vector<const ActivationSequence*> stories;
  stories.reserve(log.stories.size());
  for (const auto& [id, seq] : log.stories) stories.push_back(&seq);

  std::vector<StoryMetrics> metrics(stories.size());
  std::vector<std::string> dag_lines(options.export_dags ? stories.size() : 0);
  parallel_for(stories.size(), options.jobs, [&](std::size_t i) {
    const auto& seq = *stories[i];
    const auto dag = build_activation_dag(graph, seq);
    const auto cascades = extract_cascades(dag);
    metrics[i] = story_metrics(dag, cascades, seq.submitter());
    if (options.export_dags) dag_lines[i] = dag_to_json(dag).dump();
  });

  fs::create_directories(options.out / "distributions");
  AnalyzeSummary summary;
  summary.stories = stories.size();
  summary.activations = log.events;
  {
    std::ofstream out(options.out / "stories.jsonl");
    if (!out) throw std::runtime_error("cannot write stories.jsonl");
    for (const auto& m : metrics) {
      out << json(m).dump() << '\n';
      summary.cascades += m.cascades.size();
      summary.activation_edges += m.community_value;
    }
  }
  if (options.export_dags) {
    std::ofstream out(options.out / "dags.jsonl");
    for (const auto& line : dag_lines) out << line << '\n';
  }

  auto distributions = corpus_distributions(metrics);
  distributions["fans_per_user"] = degree_distribution(graph, DegreeDirection::in);
  distributions["friends_per_user"] = degree_distribution(graph, DegreeDirection::out);
  distributions["activations_per_user"] = activity_distribution(log);
  for (const auto& [name, histogram] : distributions)
    histogram.write_csv(options.out / "distributions" / (name + ".csv"));

  const auto report = validation_report(log, &graph);
  write_json(options.out / "summary.json",
             {{"stories", summary.stories},
              {"activations", summary.activations},
              {"cascades", summary.cascades},
              {"activation_edges", summary.activation_edges},
              {"graph", graph.summary()},
              {"validation", report}});

  summary.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json(options.out / "timing.json",
             {{"elapsed_seconds", summary.elapsed_seconds}, {"jobs", options.jobs}});
  return summary;
}

std::vector<MetricFits> cmd_fit(const FitOptions& options) {
  std::vector<fs::path> files;
  for (const auto& input : options.inputs) {
    if (fs::is_directory(input)) {
      auto found = distribution_files(input);
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(input);
    }
  }
  if (files.empty()) throw std::runtime_error("fit: no distribution CSV files given");

  std::vector<MetricFits> results;
  Rng rng(options.seed);
  for (const auto& file : files) {
    MetricFits mf;
    mf.metric = file.stem().string();
    const auto samples = positive_samples(Histogram::read_csv(file), mf.dropped_nonpositive);
    mf.fits = compare_fits(samples, options.families);
    if (options.bootstrap > 0)
      for (auto& r : mf.fits.ranked)
        r.p_value = bootstrap_p_value(samples, r, options.bootstrap, rng);
    results.push_back(std::move(mf));
  }

  fs::create_directories(options.out);
  std::ofstream csv(options.out / "fits.csv");
  if (!csv) throw std::runtime_error("cannot write fits.csv");
  csv << "metric,rank,family,param1,param2,ks,log_likelihood,samples,tail_samples,"
         "dropped_nonpositive,status\n";
  json doc = json::object();
  for (const auto& mf : results) {
    std::size_t rank = 0;
    json ranked = json::array();
    for (const auto& r : mf.fits.ranked) {
      const auto [p1, p2] = param_cells(r);
      csv << mf.metric << ',' << ++rank << ',' << to_string(r.family()) << ',' << p1
          << ',' << p2 << ',' << format_number(r.ks) << ','
          << format_number(r.log_likelihood) << ',' << r.sample_count << ','
          << r.tail_count << ',' << mf.dropped_nonpositive << ',' << status_of(r)
          << '\n';
      ranked.push_back(r);
    }
    json failures = json::array();
    for (const auto& [family, why] : mf.fits.failures) {
      csv << mf.metric << ",," << to_string(family) << ",,,,,,," << mf.dropped_nonpositive
          << ",failed\n";
      failures.push_back({{"family", to_string(family)}, {"error", why}});
    }
    doc[mf.metric] = {{"ranked", std::move(ranked)},
                      {"failures", std::move(failures)},
                      {"dropped_nonpositive", mf.dropped_nonpositive}};
  }
  write_json(options.out / "fits.json", doc);
  return results;
}

void cmd_simulate(const SimulateOptions& options) {
  auto config = parse_simulation_config(read_json(options.config));
  Rng graph_rng(derive_seed(options.seed, 0, 0x67726170ULL));
  const auto graph = generate_graph(config.graph, graph_rng);
  if (config.target_promoted_fraction) {
    config.contagion.promotion->threshold =
        tune_promotion_threshold(graph, config.contagion, options.seed,
                                 *config.target_promoted_fraction, options.jobs);
  }
  const auto corpus =
      run_promotion_experiment(graph, config.contagion, options.seed, options.jobs);

  fs::create_directories(options.out);
  write_follower_graph(graph, options.out / "graph.tsv");
  write_activation_log(corpus.log(), options.out / "activations.csv");
  json steps = json::object();
  for (const auto& s : corpus.stories)
    if (s.promotion_step) steps[s.sequence.story_id] = *s.promotion_step;
  write_json(options.out / "manifest.json",
             {{"master_seed", options.seed},
              {"config", to_json(config)},
              {"graph", graph.summary()},
              {"promoted", corpus.promoted_ids()},
              {"promotion_steps", std::move(steps)}});
}

void cmd_report(const ReportOptions& options) {
  const auto files = distribution_files(options.in);
  json fits;
  const bool have_fits = fs::exists(options.in / "fits.json");
  if (have_fits) fits = read_json(options.in / "fits.json");

  fs::create_directories(options.out);
  std::ofstream csv(options.out / "report.csv");
  if (!csv) throw std::runtime_error("cannot write report.csv");
  csv << "metric,observations,mean,median,max,best_family,param1,param2,ks\n";
  const std::vector<Family> all{Family::lognormal, Family::weibull, Family::powerlaw};
  for (const auto& file : files) {
    const auto metric = file.stem().string();
    const auto values = Histogram::read_csv(file).expand();
    csv << metric << ',' << values.size() << ',';
    if (values.empty()) {
      csv << ",,,,,,\n";
      continue;
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    const std::size_t mid = values.size() / 2;
    const double median =
        values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    csv << format_number(mean) << ',' << format_number(median) << ','
        << format_number(values.back()) << ',';

    if (have_fits) {
      const auto it = fits.find(metric);
      if (it != fits.end() && !it->at("ranked").empty()) {
        const auto& best = it->at("ranked").front();
        const auto& params = best.at("params");
        const auto family = parse_family(best.at("family").get<std::string>());
        const auto names = family == Family::lognormal ? std::array{"mu", "sigma"}
                           : family == Family::weibull ? std::array{"shape", "scale"}
                                                       : std::array{"alpha", "xmin"};
        std::vector<std::string> cells;
        for (const char* name : names) {
          const auto& value = params.at(name);
          cells.push_back(std::string(name) + "=" +
                          (value.is_number() ? format_number(value.get<double>()) : ""));
        }
        const auto& ks = best.at("ks");
        csv << best.at("family").get<std::string>() << ',' << cells[0] << ',' << cells[1]
            << ',' << (ks.is_number() ? format_number(ks.get<double>()) : "") << '\n';
      } else {
        csv << ",,,\n";
      }
      continue;
    }
    std::vector<double> positive;
    std::copy_if(values.begin(), values.end(), std::back_inserter(positive),
                 [](double v) { return v > 0.0; });
    const auto ranked = compare_fits(positive, all);
    if (ranked.ranked.empty()) {
      csv << ",,,\n";
      continue;
    }
    const auto& best = ranked.ranked.front();
    const auto [p1, p2] = param_cells(best);
    csv << to_string(best.family()) << ',' << p1 << ',' << p2 << ','
        << format_number(best.ks) << '\n';
  }
}

}  // namespace cascades

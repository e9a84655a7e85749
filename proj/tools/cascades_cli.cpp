// Command-line front end: analyze, fit, simulate, report.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cascades/commands.hpp"

namespace {

std::vector<cascades::Family> parse_families(const std::string& list) {
  std::vector<cascades::Family> out;
  std::istringstream in(list);
  std::string name;
  while (std::getline(in, name, ','))
    if (!name.empty()) out.push_back(cascades::parse_family(name));
  if (out.empty()) throw std::invalid_argument("--families: no family given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information cascade reconstruction, metrics, fitting and simulation"};
  app.require_subcommand(1);

  cascades::AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Extract cascades and compute metrics");
  analyze_cmd->add_option("--graph", analyze.graph, "Follower edge list")->required();
  analyze_cmd->add_option("--log", analyze.log, "Activation log CSV")->required();
  analyze_cmd->add_option("--out", analyze.out, "Output directory")->required();
  analyze_cmd->add_option("--jobs", analyze.jobs, "Worker threads")->check(CLI::PositiveNumber);
  analyze_cmd->add_flag("--export-dags", analyze.export_dags, "Write dags.jsonl");

  cascades::FitOptions fit;
  std::string families = "lognormal,weibull,powerlaw";
  auto* fit_cmd = app.add_subcommand("fit", "Fit distribution families to metric CSVs");
  fit_cmd->add_option("--in", fit.inputs, "Distribution directory or CSV files")->required();
  fit_cmd->add_option("--families", families, "Comma-separated families");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();
  fit_cmd->add_option("--bootstrap", fit.bootstrap, "Bootstrap repetitions for p-values");
  fit_cmd->add_option("--seed", fit.seed, "Seed for bootstrap draws");

  cascades::SimulateOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a graph and contagion corpus");
  sim_cmd->add_option("--config", simulate.config, "JSON configuration")->required();
  sim_cmd->add_option("--seed", simulate.seed, "Master seed")->required();
  sim_cmd->add_option("--out", simulate.out, "Output directory")->required();
  sim_cmd->add_option("--jobs", simulate.jobs, "Worker threads")->check(CLI::PositiveNumber);

  cascades::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Summarize distributions and fits");
  report_cmd->add_option("--in", report.in, "Analysis directory")->required();
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze_cmd->parsed()) {
      const auto summary = cascades::cmd_analyze(analyze);
      std::cout << summary.stories << " stories, " << summary.cascades << " cascades, "
                << summary.activations << " activations in " << summary.elapsed_seconds
                << " s\n";
    } else if (fit_cmd->parsed()) {
      fit.families = parse_families(families);
      const auto results = cascades::cmd_fit(fit);
      for (const auto& mf : results) {
        std::cout << mf.metric << ": ";
        if (mf.fits.ranked.empty()) {
          std::cout << "no usable fit\n";
        } else {
          const auto& best = mf.fits.ranked.front();
          std::cout << cascades::to_string(best.family()) << " (ks " << best.ks << ")"
                    << (best.degenerate ? " degenerate" : "") << '\n';
        }
      }
    } else if (sim_cmd->parsed()) {
      cascades::cmd_simulate(simulate);
    } else if (report_cmd->parsed()) {
      cascades::cmd_report(report);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

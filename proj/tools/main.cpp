#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rmtnet/config.hpp"
#include "rmtnet/error.hpp"
#include "rmtnet/graph_io.hpp"
#include "rmtnet/pipeline.hpp"
#include "rmtnet/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int exit_code_for(const rmt::Error& e) {
  switch (e.code()) {
    case rmt::Errc::InvariantViolation:
    case rmt::Errc::LengthMismatch:
    case rmt::Errc::ZeroVariance:
    case rmt::Errc::EmptyGraph:
    case rmt::Errc::DegenerateSamples:
      return 3;
    default:
      return 2;
  }
}

int cmd_run(const std::string& config_path, std::optional<int> week, std::optional<int> jobs,
            bool strict, std::optional<std::uint64_t> seed) {
  rmt::PipelineConfig config = rmt::PipelineConfig::from_ini(rmt::Ini::parse_file(config_path));
  if (jobs) config.jobs = *jobs;
  if (seed) config.seed = *seed;
  config.strict = config.strict || strict;

  const rmt::PipelineResult result = rmt::run_pipeline_from_files(config, week);
  rmt::write_outputs(result, config);
  std::cout << "report written to " << (fs::path(config.out_dir) / "report.json").string()
            << " (" << result.week_count << " weeks";
  if (!result.input_errors.empty()) {
    std::cout << ", " << result.input_errors.size() << " malformed input rows skipped";
  }
  std::cout << ")\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, const std::string& format_token) {
  rmt::ScenarioConfig config = rmt::scenario_from_ini(rmt::Ini::parse_file(config_path));
  if (seed) config.seed = *seed;
  auto format = rmt::parse_log_format(format_token);
  if (!format) throw rmt::Error(rmt::Errc::ConfigInvalid, "unknown format " + format_token);

  const rmt::Scenario scenario = rmt::generate_scenario(config);
  rmt::write_scenario(scenario, out_dir, *format);
  std::cout << "scenario written to " << out_dir << ": " << scenario.trades.size() << " trades, "
            << scenario.play.size() << " play records, " << scenario.market.size()
            << " market records\n";
  return 0;
}

int cmd_evaluate(const std::string& run_dir, const std::string& truth_dir,
                 const std::string& metrics_out) {
  const rmt::GroundTruth truth = rmt::read_ground_truth(truth_dir);
  const std::vector<rmt::WeekAssignment> weeks = rmt::load_week_assignments(run_dir);
  if (weeks.empty()) {
    throw rmt::Error(rmt::Errc::IoError, "no weekly outputs found in " + run_dir);
  }
  const rmt::DetectionMetrics metrics = rmt::evaluate_detection(weeks, truth);

  ordered_json j;
  auto prf = [](const rmt::PrfRow& r) {
    return ordered_json{{"precision", r.precision},
                        {"recall", r.recall},
                        {"f1", r.f1},
                        {"support", r.support}};
  };
  ordered_json types;
  for (const auto& [name, row] : metrics.node_type) types[name] = prf(row);
  j["node_type"] = std::move(types);
  j["star_any"] = prf(metrics.star_any);
  j["provider_role"] = prf(metrics.provider_role);
  j["rmt_events"] = prf(metrics.rmt_events);
  j["mean_weekly_nmi"] = metrics.mean_weekly_nmi;
  j["giant_match_type"] = metrics.giant_match_type;
  j["giant_matched_consumer"] = metrics.giant_matched_consumer;

  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!metrics_out.empty()) {
    std::ofstream f(metrics_out, std::ios::binary);
    f << text;
  }
  return 0;
}

int cmd_export_graph(const std::string& config_path, int week, const std::string& out_path,
                     const std::string& format) {
  rmt::PipelineConfig config = rmt::PipelineConfig::from_ini(rmt::Ini::parse_file(config_path));
  std::ifstream trade_in(config.trade_log, std::ios::binary);
  if (!trade_in) {
    throw rmt::Error(rmt::Errc::IoError, "cannot open trade log " + config.trade_log);
  }
  auto trades = rmt::parse_trade_log(trade_in, config.trade_format);
  auto batches = rmt::window_weekly(std::move(trades.items), config.epoch);
  if (week < 0 || week >= static_cast<int>(batches.size())) {
    throw rmt::Error(rmt::Errc::ConfigInvalid, "week " + std::to_string(week) + " out of range");
  }
  const rmt::TradeNetwork net =
      rmt::build_trading_network(batches[static_cast<std::size_t>(week)]);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw rmt::Error(rmt::Errc::IoError, "cannot write " + out_path);
  if (format == "dot") {
    rmt::write_dot(out, net);
  } else {
    rmt::write_graphml(out, net);
  }
  std::cout << "wrote " << out_path << " (" << net.node_count() << " nodes, " << net.edge_count()
            << " edges)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RMT black-market analysis for online-game trade logs"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "sim", truth_dir, run_dir, metrics_out, out_path;
  std::string format = "csv";
  std::string graph_format = "graphml";
  int week = -1;
  int jobs = -1;
  std::uint64_t seed = 0;
  bool seed_set = false, strict = false;

  CLI::App* run = app.add_subcommand("run", "execute the five-phase pipeline");
  run->add_option("--config", config_path, "pipeline config (INI)")->required();
  run->add_option("--week", week, "process a single week only");
  run->add_option("--jobs", jobs, "parallel weekly workers");
  run->add_flag("--strict", strict, "abort on the first malformed input row");
  run->add_option("--seed", seed, "override detection seed")->each([&](const std::string&) {
    seed_set = true;
  });

  CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic economy");
  simulate->add_option("--config", config_path, "scenario config (INI)")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--seed", seed, "override scenario seed")->each([&](const std::string&) {
    seed_set = true;
  });
  simulate->add_option("--format", format, "csv or jsonl");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a run against planted truth");
  evaluate->add_option("--run", run_dir, "cmd_run output directory")->required();
  evaluate->add_option("--truth", truth_dir, "simulator truth directory")->required();
  evaluate->add_option("--out", metrics_out, "write metrics.json here");

  CLI::App* export_graph = app.add_subcommand("export-graph", "export one weekly network");
  export_graph->add_option("--config", config_path, "pipeline config (INI)")->required();
  export_graph->add_option("--week", week, "week index")->required();
  export_graph->add_option("--out", out_path, "output file")->required();
  export_graph->add_option("--format", graph_format, "graphml or dot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, week >= 0 ? std::optional<int>(week) : std::nullopt,
                     jobs > 0 ? std::optional<int>(jobs) : std::nullopt, strict,
                     seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    if (simulate->parsed()) {
      return cmd_simulate(config_path, out_dir,
                          seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt, format);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(run_dir, truth_dir, metrics_out);
    }
    if (export_graph->parsed()) {
      return cmd_export_graph(config_path, week, out_path, graph_format);
    }
  } catch (const rmt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmtnet/community.hpp"
#include "rmtnet/config.hpp"
#include "rmtnet/estimation.hpp"
#include "rmtnet/features.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/tagging.hpp"

namespace rmt {

/// Everything derived from one weekly window.
struct WeekResult {
  int week_index = 0;
  TradeNetwork net;
  NetworkSummary summary;
  CommunityPartition partition;
  std::vector<std::vector<int>> community_members;
  std::vector<CommunityProfile> profiles;
  CategorizedWeek categorized;
};

struct PipelineResult {
  std::vector<std::unique_ptr<WeekResult>> weeks;
  int week_count = 0;

  // user play-style layer (whole observation window)
  std::optional<ClusteringResult> user_clusters;
  std::map<int, PlayStyle> cluster_styles;

  RmtEstimate estimate;
  std::vector<BanRateRow> ban_rates;
  std::vector<AlgoComparisonRow> comparison;

  std::vector<ParseError> input_errors;
};

PipelineResult run_pipeline(const PipelineConfig& config,
                            std::vector<TradeEvent> events,
                            std::vector<PlayActivityRecord> play,
                            std::vector<MarketRecord> market,
                            std::optional<int> only_week = std::nullopt);

/// Load the configured input files and run. Throws Error with code
/// IoError / ConfigInvalid on unusable inputs.
PipelineResult run_pipeline_from_files(const PipelineConfig& config,
                                       std::optional<int> only_week = std::nullopt);

nlohmann::ordered_json report_json(const PipelineResult& result, const PipelineConfig& config);

/// report.json, per-week exports and CSV tables under config.out_dir.
void write_outputs(const PipelineResult& result, const PipelineConfig& config);

/// Flatten an in-memory run for evaluate_detection.
std::vector<WeekAssignment> week_assignments(const PipelineResult& result);

/// Rebuild the same structures from a cmd_run output directory.
std::vector<WeekAssignment> load_week_assignments(const std::string& out_dir);

}  // namespace rmt

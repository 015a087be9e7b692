#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmtnet/community.hpp"
#include "rmtnet/estimation.hpp"
#include "rmtnet/ingest.hpp"
#include "rmtnet/tagging.hpp"

namespace rmt {

enum class AgentClass : std::uint8_t { Normal, Farmer, Banker, Merchant, ChainMember, Outcast };

const char* agent_class_name(AgentClass c);

/// One consolidation phase of the provider market. From `start_week` on,
/// only the top `active_providers` groups sell, with share weights
/// proportional to (rank+1)^-skew.
struct PhaseSpec {
  int start_week = 0;
  int active_providers = 0;  // 0 = all
  double skew = 0.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 7;
  int weeks = 12;

  // consumer economy: each cluster mixes a few high-volume hub traders
  // with a preferential-attachment friend mesh
  int consumer_clusters = 12;
  int players_per_cluster = 800;
  int hubs_per_cluster = 3;
  double hub_trade_fraction = 0.55;       // trades that go through a hub
  double player_activity = 0.85;          // P(active in a week)
  double trades_per_active_player = 2.0;  // intra-cluster events per active week
  double cross_cluster_fraction = 0.02;   // consumer trades bridging clusters
  double warehouse_fraction = 0.05;       // consumer trades routed via warehouse
  double consumer_money_log_mu = 13.0;    // lognormal game-money per trade
  double consumer_money_log_sigma = 1.8;

  // gold-farming star groups
  int large_star_groups = 5;
  int large_star_farmers_min = 60;
  int large_star_farmers_max = 120;
  int small_star_groups = 18;
  int small_star_farmers_min = 8;
  int small_star_farmers_max = 34;
  double farmer_deliveries_per_week = 3.0;
  double farmer_activity = 0.92;

  // arbitrage chain rings
  int chain_rings = 5;
  int ring_length_min = 10;
  int ring_length_max = 22;
  int rotation_period_weeks = 1;
  int shop_limit = 40;  // weekly shop events that trigger the hand-off

  // socially closed normal pairs
  int outcast_pairs = 300;

  // RMT calibration
  double target_inter_rmt_share = 0.05;  // of all trade events
  double rmt_weekly_volatility = 0.15;   // lognormal sigma of weekly intensity
  double rmt_money_log_mu = 16.3;        // lognormal game-money per sale
  double rmt_money_log_sigma = 1.0;

  // out-game market records
  double market_noise = 0.25;       // volume jitter + miss rate + spurious rate
  double base_unit_price = 5.0e-6;  // cash per game-money unit
  std::string server_id = "S1";

  // ban flags per agent class
  double ban_prob_normal = 0.08;
  double ban_prob_farmer = 0.70;
  double ban_prob_banker = 0.60;
  double ban_prob_merchant = 0.50;
  double ban_prob_chain = 0.35;
  double ban_prob_outcast = 0.05;

  std::vector<PhaseSpec> phases;  // empty = one phase, all providers, no skew

  std::int64_t epoch = 0;

  /// Throws ConfigInvalid.
  void validate() const;

  // presets used by the acceptance suite and shipped as config files
  static ScenarioConfig paper_default();
  static ScenarioConfig coupled();
  static ScenarioConfig maturing();
  static ScenarioConfig tiny();
};

struct GroundTruth {
  struct NodeInfo {
    AgentClass cls = AgentClass::Normal;
    int planted_community = -1;
    CommunityType intended_type = CommunityType::GiantConsumer;
    bool banned = false;
  };
  std::unordered_map<std::string, NodeInfo> nodes;
  std::vector<CommunityType> planted_type;  // by planted community id
  std::vector<bool> event_rmt;              // aligned with trade log order
};

struct Scenario {
  std::vector<TradeEvent> trades;
  std::vector<PlayActivityRecord> play;
  std::vector<MarketRecord> market;
  GroundTruth truth;
};

/// Deterministic per (config, seed). Generated logs satisfy every ingest
/// invariant and round-trip losslessly through the parsers.
Scenario generate_scenario(const ScenarioConfig& config);

void write_scenario(const Scenario& scenario, const std::string& dir, LogFormat format);

struct GroundTruthFiles {
  GroundTruth truth;
};
GroundTruth read_ground_truth(const std::string& dir);

struct PrfRow {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // truth positives
};

/// One week of pipeline output in the flat form the evaluator consumes;
/// buildable from an in-memory run or from the files cmd_run wrote.
struct WeekAssignment {
  int week_index = 0;
  std::vector<std::string> node_ids;
  std::vector<int> community;  // aligned with node_ids
  std::vector<CommunityType> type_of_community;
  std::vector<std::pair<std::uint64_t, TradeCategory>> events;  // (input index, category)
};

struct DetectionMetrics {
  std::map<std::string, PrfRow> node_type;  // per community type, node-week level
  PrfRow star_any;                          // LargeStar and SmallStar pooled
  PrfRow provider_role;
  PrfRow rmt_events;
  double mean_weekly_nmi = 0.0;
  /// Predicted type of the community best overlapping the largest planted
  /// consumer cluster, worst week ("" when unavailable).
  std::string giant_match_type;
  bool giant_matched_consumer = false;
};

DetectionMetrics evaluate_detection(std::span<const WeekAssignment> weeks,
                                    const GroundTruth& truth);

}  // namespace rmt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <sstream>

#include "doctest.h"
#include "rmtnet/error.hpp"
#include "rmtnet/estimation.hpp"
#include "rmtnet/features.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/simulator.hpp"

using namespace rmt;

TEST_CASE("scenario validation rejects bad configs") {
  ScenarioConfig c = ScenarioConfig::tiny();
  SUBCASE("weeks") {
    c.weeks = 0;
    CHECK_THROWS_AS(generate_scenario(c), Error);
  }
  SUBCASE("share") {
    c.target_inter_rmt_share = 1.5;
    CHECK_THROWS_AS(generate_scenario(c), Error);
  }
  SUBCASE("ring length") {
    c.ring_length_min = 2;
    CHECK_THROWS_AS(generate_scenario(c), Error);
  }
}

TEST_CASE("generation is deterministic per seed") {
  const ScenarioConfig c = ScenarioConfig::tiny();
  const Scenario a = generate_scenario(c);
  const Scenario b = generate_scenario(c);
  CHECK(a.trades == b.trades);
  CHECK(a.play == b.play);
  CHECK(a.market == b.market);
  CHECK(a.truth.event_rmt == b.truth.event_rmt);

  ScenarioConfig other = c;
  other.seed = c.seed + 1;
  const Scenario d = generate_scenario(other);
  CHECK(a.trades != d.trades);
}

TEST_CASE("generated logs satisfy the ingest invariants and round-trip") {
  const Scenario s = generate_scenario(ScenarioConfig::tiny());
  REQUIRE(s.trades.size() > 100);
  REQUIRE(s.truth.event_rmt.size() == s.trades.size());

  std::ostringstream trade_out, play_out, market_out;
  write_trade_log(trade_out, s.trades, LogFormat::Csv);
  write_play_log(play_out, s.play, LogFormat::Csv);
  write_market_records(market_out, s.market, LogFormat::Csv);

  std::istringstream trade_in(trade_out.str());
  const auto trades = parse_trade_log(trade_in, LogFormat::Csv);
  CHECK(trades.errors.empty());
  CHECK(trades.items == s.trades);

  std::istringstream play_in(play_out.str());
  const auto play = parse_play_log(play_in, LogFormat::Csv);
  CHECK(play.errors.empty());
  CHECK(play.items.size() == s.play.size());

  std::istringstream market_in(market_out.str());
  const auto market = parse_market_records(market_in, LogFormat::Csv);
  CHECK(market.errors.empty());
  CHECK(market.items.size() == s.market.size());

  // events windows cleanly from the configured epoch
  auto batches = window_weekly(trades.items, 0);
  CHECK(static_cast<int>(batches.size()) <= ScenarioConfig::tiny().weeks);
  std::size_t total = 0;
  for (const auto& b : batches) total += b.events.size();
  CHECK(total == s.trades.size());
}

TEST_CASE("planted chain ring shows chain structure in the aggregate") {
  ScenarioConfig c = ScenarioConfig::tiny();
  c.consumer_clusters = 0;
  c.large_star_groups = 0;
  c.small_star_groups = 0;
  c.outcast_pairs = 0;
  c.chain_rings = 1;
  c.ring_length_min = 12;
  c.ring_length_max = 12;
  c.weeks = 12;
  const Scenario s = generate_scenario(c);

  WeeklyBatch all;
  all.events = s.trades;
  const TradeNetwork net = build_trading_network(all);
  CHECK(net.node_count() == 12);
  CHECK(diameter(net) >= 4);
  const auto r = degree_assortativity(net);
  REQUIRE(r.has_value());
  CHECK(*r > 0.0);
  const DegreeStats deg = degree_stats(net);
  CHECK(deg.mean <= 2.5);
}

TEST_CASE("single star group is a star with sales") {
  ScenarioConfig c = ScenarioConfig::tiny();
  c.consumer_clusters = 1;
  c.players_per_cluster = 60;
  c.large_star_groups = 0;
  c.small_star_groups = 1;
  c.small_star_farmers_min = 10;
  c.small_star_farmers_max = 10;
  c.chain_rings = 0;
  c.outcast_pairs = 0;
  c.weeks = 1;
  const Scenario s = generate_scenario(c);

  // the farmers all point at the banker
  WeeklyBatch batch;
  batch.events = s.trades;
  const TradeNetwork net = build_trading_network(batch);
  const int banker = net.index_of("bankS0");
  REQUIRE(banker >= 0);
  int farmer_edges = 0;
  for (const auto& e : net.edges()) {
    if (net.node_id(e.src).rfind("farmS0_", 0) == 0) {
      CHECK(e.dst == banker);
      ++farmer_edges;
    }
  }
  CHECK(farmer_edges >= 5);

  // flagged sales exist and leave the star
  std::size_t rmt = 0;
  for (std::size_t i = 0; i < s.trades.size(); ++i) {
    if (s.truth.event_rmt[i]) {
      ++rmt;
      CHECK(s.trades[i].source_id == "bankS0");
      CHECK(s.trades[i].target_id.rfind("u0_", 0) == 0);
    }
  }
  CHECK(rmt > 0);
}

TEST_CASE("flagged share approaches the configured target") {
  ScenarioConfig c = ScenarioConfig::tiny();
  c.weeks = 6;
  const Scenario s = generate_scenario(c);
  std::size_t rmt = 0;
  for (bool f : s.truth.event_rmt) rmt += f ? 1 : 0;
  const double share = static_cast<double>(rmt) / static_cast<double>(s.trades.size());
  CHECK(share > 0.02);
  CHECK(share < 0.09);
}

TEST_CASE("market records track planted sales at zero noise") {
  ScenarioConfig c = ScenarioConfig::tiny();
  c.market_noise = 0.0;
  c.weeks = 10;
  c.rmt_weekly_volatility = 0.6;
  const Scenario s = generate_scenario(c);

  std::vector<double> sales(static_cast<std::size_t>(c.weeks), 0.0);
  for (std::size_t i = 0; i < s.trades.size(); ++i) {
    if (!s.truth.event_rmt[i]) continue;
    const auto w = static_cast<std::size_t>(s.trades[i].timestamp / kWeekSeconds);
    sales[w] += 1.0;
  }
  const std::vector<double> market = weekly_market_counts(s.market, 0, c.weeks);
  const CorrelationResult r = pearson_correlation(sales, market);
  CHECK(r.rho >= 0.8);
}

TEST_CASE("ban flags follow the class probabilities") {
  ScenarioConfig c = ScenarioConfig::tiny();
  c.ban_prob_farmer = 1.0;
  c.ban_prob_normal = 0.0;
  const Scenario s = generate_scenario(c);
  for (const auto& [id, info] : s.truth.nodes) {
    if (info.cls == AgentClass::Farmer) CHECK(info.banned);
    if (info.cls == AgentClass::Normal) CHECK_FALSE(info.banned);
  }
}

TEST_CASE("scenario files round-trip through the directory writer") {
  const Scenario s = generate_scenario(ScenarioConfig::tiny());
  const std::string dir = "sim_test_out";
  write_scenario(s, dir, LogFormat::Csv);
  const GroundTruth truth = read_ground_truth(dir);
  CHECK(truth.nodes.size() == s.truth.nodes.size());
  CHECK(truth.event_rmt == s.truth.event_rmt);
  for (const auto& [id, info] : s.truth.nodes) {
    auto it = truth.nodes.find(id);
    REQUIRE(it != truth.nodes.end());
    CHECK(it->second.cls == info.cls);
    CHECK(it->second.planted_community == info.planted_community);
    CHECK(it->second.intended_type == info.intended_type);
    CHECK(it->second.banned == info.banned);
  }
}

TEST_CASE("evaluate_detection on constructed predictions") {
  // two planted communities: a star (provider) and a consumer blob
  GroundTruth truth;
  truth.planted_type = {CommunityType::SmallStar, CommunityType::GiantConsumer};
  for (int i = 0; i < 10; ++i) {
    GroundTruth::NodeInfo info;
    info.cls = i < 5 ? AgentClass::Farmer : AgentClass::Normal;
    info.planted_community = i < 5 ? 0 : 1;
    info.intended_type = truth.planted_type[static_cast<std::size_t>(info.planted_community)];
    truth.nodes["n" + std::to_string(i)] = info;
  }
  truth.event_rmt = {true, false, false, false};

  WeekAssignment week;
  week.week_index = 0;
  for (int i = 0; i < 10; ++i) week.node_ids.push_back("n" + std::to_string(i));

  SUBCASE("perfect prediction scores one") {
    week.community = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    week.type_of_community = {CommunityType::SmallStar, CommunityType::GiantConsumer};
    week.events = {{0, TradeCategory::InterRmt},
                   {1, TradeCategory::Intra},
                   {2, TradeCategory::Inter},
                   {3, TradeCategory::Intra}};
    const DetectionMetrics m = evaluate_detection(std::vector<WeekAssignment>{week}, truth);
    CHECK(m.star_any.precision == doctest::Approx(1.0));
    CHECK(m.star_any.recall == doctest::Approx(1.0));
    CHECK(m.rmt_events.precision == doctest::Approx(1.0));
    CHECK(m.rmt_events.recall == doctest::Approx(1.0));
    CHECK(m.mean_weekly_nmi == doctest::Approx(1.0));
    CHECK(m.giant_matched_consumer);
  }
  SUBCASE("predicting everything outcast zeroes provider recall") {
    week.community = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    week.type_of_community = {CommunityType::Outcast, CommunityType::Outcast};
    const DetectionMetrics m = evaluate_detection(std::vector<WeekAssignment>{week}, truth);
    CHECK(m.star_any.recall == 0.0);
    CHECK(m.provider_role.recall == 0.0);
    CHECK_FALSE(m.giant_matched_consumer);
  }
}

TEST_CASE("random event flags score precision near the base rate") {
  GroundTruth truth;
  truth.planted_type = {CommunityType::GiantConsumer};
  truth.nodes["n0"] = {AgentClass::Normal, 0, CommunityType::GiantConsumer, false};
  Rng rng = Rng::seeded(77);
  const double base_rate = 0.3;
  const int n = 20000;
  truth.event_rmt.resize(static_cast<std::size_t>(n));
  WeekAssignment week;
  week.node_ids = {"n0"};
  week.community = {0};
  week.type_of_community = {CommunityType::GiantConsumer};
  for (int i = 0; i < n; ++i) {
    truth.event_rmt[static_cast<std::size_t>(i)] = rng.bernoulli(base_rate);
    week.events.emplace_back(static_cast<std::uint64_t>(i),
                             rng.bernoulli(0.5) ? TradeCategory::InterRmt
                                                : TradeCategory::Intra);
  }
  const DetectionMetrics m = evaluate_detection(std::vector<WeekAssignment>{week}, truth);
  // independent flags: precision converges on the truth base rate
  CHECK(m.rmt_events.precision == doctest::Approx(base_rate).epsilon(0.05));
}

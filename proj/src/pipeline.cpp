#include "rmtnet/pipeline.hpp"

#include <atomic>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "rmtnet/csv.hpp"
#include "rmtnet/error.hpp"
#include "rmtnet/graph_io.hpp"

namespace rmt {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::unordered_map<std::string, std::string> load_account_map(const std::string& path) {
  std::unordered_map<std::string, std::string> map;
  if (path.empty()) return map;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open account map " + path);
  csv::Reader reader(f);
  std::size_t line = 0;
  auto header = reader.next(line);  // id,account
  while (auto row = reader.next(line)) {
    if (row->size() >= 2 && !(*row)[0].empty()) map[(*row)[0]] = (*row)[1];
  }
  return map;
}

/// Per-user style labels and ban flags derived from the play log.
struct UserLayer {
  std::optional<ClusteringResult> clusters;
  std::map<int, PlayStyle> styles;
  std::unordered_map<std::string, PlayStyle> style_of_user;
  std::unordered_map<std::string, bool> banned;
};

UserLayer build_user_layer(const std::vector<PlayActivityRecord>& play,
                           const PipelineConfig& config) {
  UserLayer layer;
  if (play.empty()) return layer;

  std::map<std::string, std::vector<PlayActivityRecord>> by_user;
  for (const PlayActivityRecord& rec : play) by_user[rec.user_id].push_back(rec);

  std::vector<UserFeatures> features;
  features.reserve(by_user.size());
  for (const auto& [user, records] : by_user) {
    features.push_back(user_feature_vector(records));
    layer.banned[user] = features.back().banned;
  }
  const int k = std::min<int>(config.user_k, static_cast<int>(features.size()));
  if (k < 1) return layer;
  layer.clusters = cluster_users(features, k, config.cluster_seed);
  layer.styles = label_play_styles(layer.clusters->centroids);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int cluster = layer.clusters->assignments[i];
    layer.style_of_user[features[i].user_id] = layer.styles.at(cluster);
  }
  return layer;
}

std::unique_ptr<WeekResult> process_week(const WeeklyBatch& batch, const PipelineConfig& config,
                                         const UserLayer& users, int threads) {
  auto result = std::make_unique<WeekResult>();
  result->week_index = batch.week_index;
  result->net = build_trading_network(batch);
  TradeNetwork& net = result->net;
  if (net.node_count() == 0) {
    result->categorized.week_index = batch.week_index;
    return result;
  }
  result->summary = config.network_betweenness
                        ? summarize(net, threads)
                        : [&] {
                            NetworkSummary s;
                            s.node_count = net.node_count();
                            s.edge_count = net.edge_count();
                            const DegreeStats d = degree_stats(net);
                            s.degree_mean = d.mean;
                            s.degree_std = d.stddev;
                            s.clustering_coefficient = clustering_coefficient(net);
                            return s;
                          }();

  if (net.edge_count() == 0) {
    result->categorized.week_index = batch.week_index;
    return result;
  }
  result->partition =
      detect_communities(net, config.algorithm,
                         config.seed + static_cast<std::uint64_t>(batch.week_index),
                         config.resolution, config.weighted);
  result->community_members = result->partition.members();

  // phase 2: structural features per community
  const auto& members = result->community_members;
  result->profiles.resize(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    CommunityProfile& p = result->profiles[c];
    p.community_id = static_cast<int>(c);
    p.features = community_feature_vector(net, members[c]);
    if (!p.features.assortativity_defined) p.features.assortativity = 0.0;
    // play-style composition
    std::size_t styled = 0;
    std::array<double, 7> frac{};
    for (int v : members[c]) {
      auto it = users.style_of_user.find(net.node_id(v));
      if (it == users.style_of_user.end()) continue;
      ++styled;
      frac[static_cast<std::size_t>(it->second)] += 1.0;
    }
    if (styled > 0) {
      for (double& x : frac) x /= static_cast<double>(styled);
    }
    p.style_fractions = frac;
    p.styled_members = styled;
  }

  // phase 2b: k-means grouping of community feature vectors
  if (!result->profiles.empty()) {
    std::vector<CommunityFeatures> feats;
    feats.reserve(result->profiles.size());
    for (const CommunityProfile& p : result->profiles) feats.push_back(p.features);
    const int k = std::min<int>(config.community_k, static_cast<int>(feats.size()));
    if (k >= 1) {
      const ClusteringResult clusters =
          cluster_communities(feats, k, config.cluster_seed);
      for (std::size_t c = 0; c < result->profiles.size(); ++c) {
        result->profiles[c].cluster_id = clusters.assignments[c];
      }
    }
  }

  // phase 4: community typing
  classify_communities(result->profiles, net, members, net.node_count(), config.tagging);

  // phase 5 input: per-event categories
  std::vector<CommunityRole> roles(static_cast<std::size_t>(result->partition.community_count),
                                   CommunityRole::Filtered);
  for (const CommunityProfile& p : result->profiles) {
    roles[static_cast<std::size_t>(p.community_id)] = p.role;
  }
  result->categorized = categorize_trades(batch, net, result->partition, roles);
  return result;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json summary_json(const NetworkSummary& s) {
  ordered_json j;
  j["nodes"] = s.node_count;
  j["edges"] = s.edge_count;
  j["average_path_length"] = s.average_path_length;
  j["path_length_defined"] = s.path_length_defined;
  j["clustering_coefficient"] = s.clustering_coefficient;
  j["degree_mean"] = s.degree_mean;
  j["degree_std"] = s.degree_std;
  j["betweenness_mean"] = s.betweenness_mean;
  j["betweenness_std"] = s.betweenness_std;
  return j;
}

ordered_json volume_json(const VolumeSummary& v) {
  ordered_json j;
  j["min"] = v.min;
  j["q1"] = v.q1;
  j["median"] = v.median;
  j["q3"] = v.q3;
  j["max"] = v.max;
  j["mean"] = v.mean;
  j["std"] = v.stddev;
  j["n"] = v.n;
  return j;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::vector<TradeEvent> events,
                            std::vector<PlayActivityRecord> play,
                            std::vector<MarketRecord> market, std::optional<int> only_week) {
  PipelineResult result;

  std::vector<WeeklyBatch> batches = window_weekly(std::move(events), config.epoch);
  if (config.weeks > 0) {
    batches.resize(static_cast<std::size_t>(config.weeks));
    for (std::size_t w = 0; w < batches.size(); ++w) {
      batches[w].week_index = static_cast<int>(w);
    }
  }
  result.week_count = static_cast<int>(batches.size());

  const UserLayer users = build_user_layer(play, config);
  if (users.clusters) {
    result.user_clusters = users.clusters;
    result.cluster_styles = users.styles;
  }

  // phases 1-5 per week, optionally in parallel
  result.weeks.resize(batches.size());
  std::vector<int> todo;
  for (int w = 0; w < result.week_count; ++w) {
    if (!only_week || *only_week == w) todo.push_back(w);
  }
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1 || todo.size() <= 1) {
    for (int w : todo) {
      result.weeks[static_cast<std::size_t>(w)] =
          process_week(batches[static_cast<std::size_t>(w)], config, users, jobs);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= todo.size()) break;
        const int w = todo[i];
        result.weeks[static_cast<std::size_t>(w)] =
            process_week(batches[static_cast<std::size_t>(w)], config, users, 1);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // phase 5: estimation over every processed week
  std::vector<CategorizedWeek> categorized;
  std::vector<const TradeNetwork*> nets(static_cast<std::size_t>(result.week_count), nullptr);
  for (const auto& week : result.weeks) {
    if (!week) continue;
    categorized.push_back(week->categorized);
    nets[static_cast<std::size_t>(week->week_index)] = &week->net;
  }
  RmtEstimate& est = result.estimate;
  est.series = weekly_series(categorized, result.week_count);

  std::vector<double> intra_vol, inter_vol, rmt_vol;
  for (const CategorizedWeek& week : categorized) {
    for (std::size_t e = 0; e < week.events.size(); ++e) {
      const double money = static_cast<double>(week.events[e].money_value);
      switch (week.categories[e]) {
        case TradeCategory::Intra: intra_vol.push_back(money); break;
        case TradeCategory::Inter: inter_vol.push_back(money); break;
        case TradeCategory::InterRmt:
          inter_vol.push_back(money);
          rmt_vol.push_back(money);
          break;
      }
    }
  }
  if (!intra_vol.empty()) est.intra_volume = volume_summary(intra_vol);
  if (!inter_vol.empty()) est.inter_volume = volume_summary(inter_vol);
  if (!rmt_vol.empty()) est.inter_rmt_volume = volume_summary(rmt_vol);

  if (!market.empty()) {
    std::vector<double> website;
    website.reserve(market.size());
    for (const MarketRecord& rec : market) website.push_back(rec.trade_volume);
    est.website_volume = volume_summary(website);
    if (!rmt_vol.empty()) est.normalization = median_normalize(website, rmt_vol);

    const std::vector<double> market_counts =
        weekly_market_counts(market, config.epoch, result.week_count);
    const std::pair<const char*, const std::vector<double>*> series[] = {
        {"intra", &est.series.intra_count},
        {"inter", &est.series.inter_count},
        {"inter_rmt", &est.series.inter_rmt_count},
    };
    for (const auto& [name, counts] : series) {
      try {
        est.market_correlations[name] = pearson_correlation(*counts, market_counts);
        if (config.permutation_test) {
          est.permutation_pvalues[name] = pearson_permutation_pvalue(
              *counts, market_counts, config.permutation_iterations, config.seed);
        }
      } catch (const Error&) {
        // constant series or too few weeks; leave the entry out
      }
    }
    if (!rmt_vol.empty()) {
      est.market_size =
          market_size_estimate(categorized, result.week_count, market, config.epoch, nets);
    }
  }
  est.concentration = temporal_concentration(categorized, result.week_count);

  // ban rates per community type, distinct users over the whole window
  {
    std::map<CommunityType, std::set<std::string>> users_of_type;
    for (const auto& week : result.weeks) {
      if (!week) continue;
      for (std::size_t c = 0; c < week->profiles.size(); ++c) {
        auto& bucket = users_of_type[week->profiles[c].type];
        for (int v : week->community_members[c]) {
          if (week->net.node_role(v) == NodeRole::Character) {
            bucket.insert(week->net.node_id(v));
          }
        }
      }
    }
    for (CommunityType t : {CommunityType::GiantConsumer, CommunityType::LargeStar,
                            CommunityType::SmallStar, CommunityType::Chain,
                            CommunityType::Outcast}) {
      BanRateRow row;
      row.type = t;
      row.data_missing = users.banned.empty();
      for (const std::string& id : users_of_type[t]) {
        ++row.members;
        auto it = users.banned.find(id);
        if (it != users.banned.end() && it->second) ++row.banned;
      }
      row.rate = row.members > 0
                     ? static_cast<double>(row.banned) / static_cast<double>(row.members)
                     : 0.0;
      result.ban_rates.push_back(row);
    }
  }

  // optional algorithm comparison table
  if (!config.compare.empty()) {
    std::vector<std::string> algos;
    std::stringstream ss(config.compare);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) algos.push_back(token);
    }
    std::vector<TradeNetwork> networks;
    for (const auto& week : result.weeks) {
      if (week && week->net.edge_count() > 0) networks.push_back(week->net);
    }
    result.comparison = compare_algorithms(networks, algos, config.seed);
  }
  return result;
}

PipelineResult run_pipeline_from_files(const PipelineConfig& config,
                                       std::optional<int> only_week) {
  if (config.trade_log.empty()) throw Error(Errc::ConfigInvalid, "inputs.trade_log is required");
  std::ifstream trade_in(config.trade_log, std::ios::binary);
  if (!trade_in) throw Error(Errc::IoError, "cannot open trade log " + config.trade_log);
  Parsed<TradeEvent> trades = parse_trade_log(trade_in, config.trade_format);

  Parsed<PlayActivityRecord> play;
  if (!config.play_log.empty()) {
    std::ifstream f(config.play_log, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot open play log " + config.play_log);
    play = parse_play_log(f, config.play_format);
  }
  Parsed<MarketRecord> market;
  if (!config.market_log.empty()) {
    std::ifstream f(config.market_log, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot open market log " + config.market_log);
    market = parse_market_records(f, config.market_format);
  }

  std::vector<ParseError> all_errors;
  for (const auto* errs : {&trades.errors, &play.errors, &market.errors}) {
    all_errors.insert(all_errors.end(), errs->begin(), errs->end());
  }
  if (config.strict && !all_errors.empty()) {
    const ParseError& first = all_errors.front();
    throw Error(first.code, "strict mode: line " + std::to_string(first.line) + ": " +
                                first.message);
  }

  if (!config.account_map.empty()) {
    apply_account_map(trades.items, load_account_map(config.account_map));
  }

  PipelineResult result = run_pipeline(config, std::move(trades.items), std::move(play.items),
                                       std::move(market.items), only_week);
  result.input_errors = std::move(all_errors);
  return result;
}

ordered_json report_json(const PipelineResult& result, const PipelineConfig& config) {
  ordered_json root;
  root["generated_at"] = iso_timestamp();
  root["config"] = {
      {"algorithm", config.algorithm},
      {"seed", config.seed},
      {"resolution", config.resolution},
      {"weighted", config.weighted},
      {"community_k", config.community_k},
      {"user_k", config.user_k},
      {"epoch", config.epoch},
  };
  root["week_count"] = result.week_count;
  root["input_errors"] = result.input_errors.size();

  ordered_json weeks = ordered_json::array();
  for (const auto& week : result.weeks) {
    if (!week) continue;
    ordered_json w;
    w["week"] = week->week_index;
    w["summary"] = summary_json(week->summary);
    w["algorithm"] = week->partition.algorithm;
    w["modularity"] = week->partition.modularity;
    w["communities"] = week->partition.community_count;
    ordered_json profiles = ordered_json::array();
    for (const CommunityProfile& p : week->profiles) {
      ordered_json pj;
      pj["id"] = p.community_id;
      pj["size"] = p.features.size;
      pj["degree_mean"] = p.features.degree_mean;
      pj["degree_std"] = p.features.degree_std;
      pj["betweenness_mean"] = p.features.betweenness_mean;
      pj["betweenness_std"] = p.features.betweenness_std;
      pj["assortativity"] = p.features.assortativity;
      pj["assortativity_defined"] = p.features.assortativity_defined;
      pj["clustering_coefficient"] = p.features.clustering;
      pj["radius"] = p.features.diameter;
      pj["cluster"] = p.cluster_id;
      pj["type"] = community_type_name(p.type);
      pj["role"] = community_role_name(p.role);
      if (p.degree_fit) {
        pj["alpha"] = p.degree_fit->alpha;
        pj["alpha_x_min"] = p.degree_fit->x_min;
      }
      if (p.styled_members > 0) {
        ordered_json styles;
        for (int s = 0; s < 7; ++s) {
          styles[play_style_name(static_cast<PlayStyle>(s))] =
              p.style_fractions[static_cast<std::size_t>(s)];
        }
        pj["style_fractions"] = styles;
      }
      profiles.push_back(std::move(pj));
    }
    w["profiles"] = std::move(profiles);
    weeks.push_back(std::move(w));
  }
  root["weeks"] = std::move(weeks);

  if (result.user_clusters) {
    ordered_json uj;
    uj["k"] = result.user_clusters->k;
    uj["inertia"] = result.user_clusters->inertia;
    ordered_json styles;
    for (const auto& [cluster, style] : result.cluster_styles) {
      styles[std::to_string(cluster)] = play_style_name(style);
    }
    uj["styles"] = std::move(styles);
    root["user_clustering"] = std::move(uj);
  }

  const RmtEstimate& est = result.estimate;
  ordered_json ej;
  ej["weekly"] = {
      {"intra_count", est.series.intra_count},
      {"inter_count", est.series.inter_count},
      {"inter_rmt_count", est.series.inter_rmt_count},
      {"intra_money", est.series.intra_money},
      {"inter_money", est.series.inter_money},
      {"inter_rmt_money", est.series.inter_rmt_money},
      {"total_count", est.series.total_count},
  };
  ordered_json volumes;
  if (est.intra_volume) volumes["Intra"] = volume_json(*est.intra_volume);
  if (est.inter_volume) volumes["Inter"] = volume_json(*est.inter_volume);
  if (est.inter_rmt_volume) volumes["InterRMT"] = volume_json(*est.inter_rmt_volume);
  if (est.website_volume) volumes["website"] = volume_json(*est.website_volume);
  ej["volume_per_transaction"] = std::move(volumes);
  if (est.normalization) {
    ej["median_normalization_scale"] = est.normalization->scale;
  }
  ordered_json corr;
  for (const auto& [name, r] : est.market_correlations) {
    corr[name] = {{"rho", r.rho}, {"p_value", r.p_value}, {"n", r.n}};
    if (auto it = est.permutation_pvalues.find(name); it != est.permutation_pvalues.end()) {
      corr[name]["permutation_p"] = it->second;
    }
  }
  ej["market_correlations"] = std::move(corr);
  if (est.market_size) {
    ordered_json mj;
    mj["total_cash"] = est.market_size->total_cash;
    mj["weekly_cash"] = est.market_size->weekly_cash;
    mj["mean_weekly_seller_sales"] = est.market_size->mean_weekly_seller_sales;
    mj["sellers"] = est.market_size->sellers.size();
    ordered_json top = ordered_json::array();
    for (std::size_t i = 0; i < est.market_size->sellers.size() && i < 10; ++i) {
      const SellerSales& s = est.market_size->sellers[i];
      top.push_back({{"node", s.node_id},
                     {"total_cash", s.total_cash},
                     {"active_weeks", s.active_weeks}});
    }
    mj["top_sellers"] = std::move(top);
    ej["market_size"] = std::move(mj);
  }
  ordered_json conc = ordered_json::array();
  for (const ConcentrationWeek& cw : est.concentration) {
    conc.push_back({{"week", cw.week_index},
                    {"providers", cw.provider_count},
                    {"hhi", cw.hhi}});
  }
  ej["concentration"] = std::move(conc);
  root["estimation"] = std::move(ej);

  ordered_json bans = ordered_json::array();
  for (const BanRateRow& row : result.ban_rates) {
    bans.push_back({{"type", community_type_name(row.type)},
                    {"members", row.members},
                    {"banned", row.banned},
                    {"rate", row.rate},
                    {"data_missing", row.data_missing}});
  }
  root["ban_rates"] = std::move(bans);

  if (!result.comparison.empty()) {
    ordered_json rows = ordered_json::array();
    for (const AlgoComparisonRow& row : result.comparison) {
      rows.push_back({{"algorithm", row.algorithm},
                      {"min_q", row.min_q},
                      {"mean_q", row.mean_q},
                      {"max_q", row.max_q}});
    }
    root["algorithm_comparison"] = std::move(rows);
  }
  return root;
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

void write_outputs(const PipelineResult& result, const PipelineConfig& config) {
  fs::create_directories(config.out_dir);
  const fs::path out(config.out_dir);

  atomic_write(out / "report.json", report_json(result, config).dump(2) + "\n");

  // per-week exports
  for (const auto& week : result.weeks) {
    if (!week) continue;
    const std::string suffix = "week" + std::to_string(week->week_index);
    std::vector<CommunityType> types(
        static_cast<std::size_t>(week->partition.community_count), CommunityType::Outcast);
    for (const CommunityProfile& p : week->profiles) {
      types[static_cast<std::size_t>(p.community_id)] = p.type;
    }
    NodeAnnotations ann;
    ann.partition = &week->partition;
    ann.type_of_community = &types;
    if (config.graphml) {
      std::ostringstream ss;
      write_graphml(ss, week->net, ann);
      atomic_write(out / (suffix + ".graphml"), ss.str());
    }
    if (config.dot) {
      std::ostringstream ss;
      write_dot(ss, week->net, ann);
      atomic_write(out / (suffix + ".dot"), ss.str());
    }
    {
      std::ostringstream ss;
      csv::write_row(ss, {"node", "community", "type", "role"});
      for (int v = 0; v < week->net.node_count(); ++v) {
        const int c = week->partition.assignment.empty()
                          ? 0
                          : week->partition.assignment[static_cast<std::size_t>(v)];
        const CommunityType t = types.empty() ? CommunityType::Outcast
                                              : types[static_cast<std::size_t>(c)];
        csv::write_row(ss, {week->net.node_id(v), std::to_string(c), community_type_name(t),
                            community_role_name(role_for(t))});
      }
      atomic_write(out / ("communities_" + suffix + ".csv"), ss.str());
    }
  }

  // per-event categories across all weeks
  {
    std::ostringstream ss;
    csv::write_row(ss, {"event_index", "week", "category"});
    for (const auto& week : result.weeks) {
      if (!week) continue;
      const CategorizedWeek& cat = week->categorized;
      for (std::size_t e = 0; e < cat.events.size(); ++e) {
        csv::write_row(ss, {std::to_string(cat.events[e].index),
                            std::to_string(week->week_index),
                            trade_category_name(cat.categories[e])});
      }
    }
    atomic_write(out / "events_categorized.csv", ss.str());
  }

  // flat CSV tables
  {
    std::ostringstream ss;
    csv::write_row(ss, {"week", "intra_count", "inter_count", "inter_rmt_count", "intra_money",
                        "inter_money", "inter_rmt_money", "total_count"});
    const WeeklySeries& s = result.estimate.series;
    for (int w = 0; w < result.week_count; ++w) {
      const auto i = static_cast<std::size_t>(w);
      csv::write_row(ss, {std::to_string(w), std::to_string(s.intra_count[i]),
                          std::to_string(s.inter_count[i]), std::to_string(s.inter_rmt_count[i]),
                          std::to_string(s.intra_money[i]), std::to_string(s.inter_money[i]),
                          std::to_string(s.inter_rmt_money[i]), std::to_string(s.total_count[i])});
    }
    atomic_write(out / "weekly_series.csv", ss.str());
  }
  {
    std::ostringstream ss;
    csv::write_row(ss, {"type", "members", "banned", "rate"});
    for (const BanRateRow& row : result.ban_rates) {
      csv::write_row(ss, {community_type_name(row.type), std::to_string(row.members),
                          std::to_string(row.banned), std::to_string(row.rate)});
    }
    atomic_write(out / "ban_rates.csv", ss.str());
  }
  {
    std::ostringstream ss;
    csv::write_row(ss, {"week", "providers", "hhi"});
    for (const ConcentrationWeek& cw : result.estimate.concentration) {
      csv::write_row(ss, {std::to_string(cw.week_index), std::to_string(cw.provider_count),
                          std::to_string(cw.hhi)});
    }
    atomic_write(out / "concentration.csv", ss.str());
  }
  if (!result.comparison.empty()) {
    std::ostringstream ss;
    csv::write_row(ss, {"algorithm", "min_q", "mean_q", "max_q"});
    for (const AlgoComparisonRow& row : result.comparison) {
      csv::write_row(ss, {row.algorithm, std::to_string(row.min_q), std::to_string(row.mean_q),
                          std::to_string(row.max_q)});
    }
    atomic_write(out / "comparison.csv", ss.str());
  }
}

std::vector<WeekAssignment> week_assignments(const PipelineResult& result) {
  std::vector<WeekAssignment> out;
  for (const auto& week : result.weeks) {
    if (!week) continue;
    WeekAssignment wa;
    wa.week_index = week->week_index;
    wa.node_ids = week->net.node_ids();
    wa.community = week->partition.assignment;
    if (wa.community.empty()) wa.community.assign(wa.node_ids.size(), 0);
    wa.type_of_community.assign(
        static_cast<std::size_t>(std::max(1, week->partition.community_count)),
        CommunityType::Outcast);
    for (const CommunityProfile& p : week->profiles) {
      wa.type_of_community[static_cast<std::size_t>(p.community_id)] = p.type;
    }
    const CategorizedWeek& cat = week->categorized;
    wa.events.reserve(cat.events.size());
    for (std::size_t e = 0; e < cat.events.size(); ++e) {
      wa.events.emplace_back(cat.events[e].index, cat.categories[e]);
    }
    out.push_back(std::move(wa));
  }
  return out;
}

std::vector<WeekAssignment> load_week_assignments(const std::string& out_dir) {
  std::map<int, WeekAssignment> by_week;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    const std::string prefix = "communities_week";
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") continue;
    const int week = std::stoi(name.substr(prefix.size()));
    WeekAssignment& wa = by_week[week];
    wa.week_index = week;
    std::ifstream f(entry.path(), std::ios::binary);
    csv::Reader reader(f);
    std::size_t line = 0;
    auto header = reader.next(line);
    std::map<int, CommunityType> types;
    while (auto row = reader.next(line)) {
      if (row->size() < 4) continue;
      wa.node_ids.push_back((*row)[0]);
      const int c = std::stoi((*row)[1]);
      wa.community.push_back(c);
      if (auto t = parse_community_type((*row)[2])) types[c] = *t;
    }
    int max_c = -1;
    for (int c : wa.community) max_c = std::max(max_c, c);
    wa.type_of_community.assign(static_cast<std::size_t>(max_c + 1), CommunityType::Outcast);
    for (const auto& [c, t] : types) {
      wa.type_of_community[static_cast<std::size_t>(c)] = t;
    }
  }
  {
    std::ifstream f(fs::path(out_dir) / "events_categorized.csv", std::ios::binary);
    if (!f) throw Error(Errc::IoError, "missing events_categorized.csv in " + out_dir);
    csv::Reader reader(f);
    std::size_t line = 0;
    auto header = reader.next(line);
    while (auto row = reader.next(line)) {
      if (row->size() < 3) continue;
      const auto idx = static_cast<std::uint64_t>(std::stoull((*row)[0]));
      const int week = std::stoi((*row)[1]);
      TradeCategory cat = TradeCategory::Intra;
      if ((*row)[2] == "Inter") cat = TradeCategory::Inter;
      else if ((*row)[2] == "InterRMT") cat = TradeCategory::InterRmt;
      auto it = by_week.find(week);
      if (it != by_week.end()) it->second.events.emplace_back(idx, cat);
    }
  }
  std::vector<WeekAssignment> out;
  out.reserve(by_week.size());
  for (auto& [week, wa] : by_week) out.push_back(std::move(wa));
  return out;
}

}  // namespace rmt

#include "rmtnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "rmtnet/csv.hpp"
#include "rmtnet/error.hpp"
#include "rmtnet/rng.hpp"

namespace rmt {

const char* agent_class_name(AgentClass c) {
  switch (c) {
    case AgentClass::Normal: return "normal";
    case AgentClass::Farmer: return "farmer";
    case AgentClass::Banker: return "banker";
    case AgentClass::Merchant: return "merchant";
    case AgentClass::ChainMember: return "chain-member";
    case AgentClass::Outcast: return "outcast";
  }
  return "normal";
}

namespace {

std::optional<AgentClass> parse_agent_class(const std::string& s) {
  for (AgentClass c : {AgentClass::Normal, AgentClass::Farmer, AgentClass::Banker,
                       AgentClass::Merchant, AgentClass::ChainMember, AgentClass::Outcast}) {
    if (s == agent_class_name(c)) return c;
  }
  return std::nullopt;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (weeks <= 0) throw Error(Errc::ConfigInvalid, "weeks must be positive");
  if (consumer_clusters < 0 || players_per_cluster < 0 || large_star_groups < 0 ||
      small_star_groups < 0 || chain_rings < 0 || outcast_pairs < 0) {
    throw Error(Errc::ConfigInvalid, "counts must be non-negative");
  }
  if (target_inter_rmt_share <= 0.0 || target_inter_rmt_share >= 1.0) {
    throw Error(Errc::ConfigInvalid, "target_inter_rmt_share must be in (0,1)");
  }
  if (player_activity < 0.0 || player_activity > 1.0 || farmer_activity < 0.0 ||
      farmer_activity > 1.0) {
    throw Error(Errc::ConfigInvalid, "activity probabilities must be in [0,1]");
  }
  if (ring_length_min < 4 || ring_length_max < ring_length_min) {
    throw Error(Errc::ConfigInvalid, "ring lengths must satisfy 4 <= min <= max");
  }
  if (large_star_farmers_max < large_star_farmers_min ||
      small_star_farmers_max < small_star_farmers_min) {
    throw Error(Errc::ConfigInvalid, "farmer ranges must satisfy min <= max");
  }
  if (base_unit_price <= 0.0) throw Error(Errc::ConfigInvalid, "base_unit_price must be > 0");
  if (market_noise < 0.0 || market_noise > 1.0) {
    throw Error(Errc::ConfigInvalid, "market_noise must be in [0,1]");
  }
  for (const PhaseSpec& p : phases) {
    if (p.start_week < 0 || p.start_week >= weeks) {
      throw Error(Errc::ConfigInvalid, "phase start_week out of range");
    }
    if (p.active_providers < 0) throw Error(Errc::ConfigInvalid, "active_providers < 0");
    if (p.skew < 0.0) throw Error(Errc::ConfigInvalid, "phase skew < 0");
  }
}

ScenarioConfig ScenarioConfig::paper_default() {
  ScenarioConfig c;
  c.seed = 7;
  c.weeks = 12;
  c.consumer_clusters = 14;
  c.players_per_cluster = 1400;
  c.player_activity = 0.86;
  c.trades_per_active_player = 2.1;
  c.large_star_groups = 5;
  c.small_star_groups = 18;
  c.chain_rings = 5;
  c.outcast_pairs = 300;
  c.phases = {{0, 0, 0.3}};
  return c;
}

ScenarioConfig ScenarioConfig::coupled() {
  ScenarioConfig c;
  c.seed = 11;
  c.weeks = 26;
  c.consumer_clusters = 6;
  c.players_per_cluster = 450;
  c.large_star_groups = 3;
  c.large_star_farmers_min = 50;
  c.large_star_farmers_max = 90;
  c.small_star_groups = 8;
  c.chain_rings = 3;
  c.outcast_pairs = 120;
  c.rmt_weekly_volatility = 0.55;
  c.market_noise = 0.35;
  c.phases = {{0, 0, 0.2}};
  return c;
}

ScenarioConfig ScenarioConfig::maturing() {
  ScenarioConfig c;
  c.seed = 13;
  c.weeks = 15;
  c.consumer_clusters = 6;
  c.players_per_cluster = 500;
  c.large_star_groups = 8;
  c.large_star_farmers_min = 55;
  c.large_star_farmers_max = 90;
  c.small_star_groups = 6;
  c.chain_rings = 4;
  c.outcast_pairs = 120;
  c.rmt_weekly_volatility = 0.10;
  // competitive -> consolidation -> monopoly
  c.phases = {{0, 0, 0.1}, {5, 6, 1.0}, {10, 2, 2.2}};
  return c;
}

ScenarioConfig ScenarioConfig::tiny() {
  ScenarioConfig c;
  c.seed = 3;
  c.weeks = 4;
  c.consumer_clusters = 2;
  c.players_per_cluster = 90;
  c.large_star_groups = 1;
  c.large_star_farmers_min = 60;
  c.large_star_farmers_max = 60;
  c.small_star_groups = 2;
  c.small_star_farmers_min = 10;
  c.small_star_farmers_max = 16;
  c.chain_rings = 1;
  c.ring_length_min = 12;
  c.ring_length_max = 12;
  c.outcast_pairs = 10;
  c.phases = {{0, 0, 0.2}};
  return c;
}

namespace {

/// Provider group handle: stars sell through the banker, rings through a
/// rotating member.
struct ProviderGroup {
  int planted_id = 0;
  bool is_chain = false;
  std::string banker;                 // stars
  std::vector<std::string> members;   // ring members for chains
};

struct Generator {
  const ScenarioConfig& cfg;
  Rng rng;
  Scenario out;

  // consumer topology
  std::vector<std::vector<std::string>> cluster_players;
  std::vector<std::vector<std::vector<int>>> cluster_friends;  // per cluster adjacency
  std::vector<std::string> cluster_warehouse;

  // provider topology
  struct StarGroup {
    int planted_id;
    std::string banker;
    std::string merchant;  // empty if none
    std::string warehouse; // empty if none
    std::vector<std::string> farmers;
    std::vector<int> farmer_sink;  // 0 banker, 1 merchant, 2 warehouse
  };
  std::vector<StarGroup> stars;
  struct ChainRing {
    int planted_id;
    std::vector<std::string> members;
    int chords = 0;  // i -> i+2 links inside the leading arc
  };
  std::vector<ChainRing> rings;
  std::vector<ProviderGroup> providers;  // sale order: large stars, small stars, rings

  struct OutcastPair {
    int planted_id;
    std::string a, b;
  };
  std::vector<OutcastPair> outcasts;

  // per-user persona for play-log generation
  struct Persona {
    AgentClass cls = AgentClass::Normal;
    int flavor = 0;  // normal sub-style, see play_record()
  };
  std::unordered_map<std::string, Persona> personas;

  std::vector<std::string> weekly_buyers;  // consumers seen trading this week

  explicit Generator(const ScenarioConfig& config)
      : cfg(config), rng(Rng::seeded(config.seed)) {}

  int register_node(const std::string& id, AgentClass cls, int planted, CommunityType type,
                    int flavor = 0) {
    GroundTruth::NodeInfo info;
    info.cls = cls;
    info.planted_community = planted;
    info.intended_type = type;
    out.truth.nodes.emplace(id, info);
    personas[id] = {cls, flavor};
    return planted;
  }

  void build_population() {
    int planted = 0;
    // consumer clusters with preferential-attachment friend graphs
    cluster_players.resize(static_cast<std::size_t>(cfg.consumer_clusters));
    cluster_friends.resize(static_cast<std::size_t>(cfg.consumer_clusters));
    cluster_warehouse.resize(static_cast<std::size_t>(cfg.consumer_clusters));
    for (int g = 0; g < cfg.consumer_clusters; ++g) {
      const int id = planted++;
      out.truth.planted_type.push_back(CommunityType::GiantConsumer);
      auto& players = cluster_players[static_cast<std::size_t>(g)];
      auto& friends = cluster_friends[static_cast<std::size_t>(g)];
      players.reserve(static_cast<std::size_t>(cfg.players_per_cluster));
      friends.resize(static_cast<std::size_t>(cfg.players_per_cluster));
      std::vector<int> stubs;  // endpoint list; sampling it is preferential
      for (int i = 0; i < cfg.players_per_cluster; ++i) {
        const std::string uid = "u" + std::to_string(g) + "_" + std::to_string(i);
        players.push_back(uid);
        // normal sub-styles: 0 genuine, 1 fisher, 2 shop, 3 party, 4 worker,
        // 5 hardcore, 6 light
        const double roll = rng.uniform();
        int flavor = 0;
        if (roll < 0.08) flavor = 1;
        else if (roll < 0.16) flavor = 2;
        else if (roll < 0.24) flavor = 3;
        else if (roll < 0.34) flavor = 4;
        else if (roll < 0.37) flavor = 5;
        else if (roll < 0.62) flavor = 6;
        register_node(uid, AgentClass::Normal, id, CommunityType::GiantConsumer, flavor);
        if (i == 0) continue;
        const int links = 2 + (rng.bernoulli(0.25) ? 1 : 0);
        for (int l = 0; l < links && l < i; ++l) {
          int peer;
          if (stubs.empty() || rng.bernoulli(0.25)) {
            peer = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
          } else {
            peer = stubs[rng.below(stubs.size())];
          }
          if (peer == i) continue;
          friends[static_cast<std::size_t>(i)].push_back(peer);
          friends[static_cast<std::size_t>(peer)].push_back(i);
          stubs.push_back(i);
          stubs.push_back(peer);
        }
      }
      const std::string wid = "wh" + std::to_string(g);
      cluster_warehouse[static_cast<std::size_t>(g)] = wid;
      register_node(wid, AgentClass::Normal, id, CommunityType::GiantConsumer);
    }

    // star groups, large then small
    auto make_star = [&](int index, bool large) {
      StarGroup star;
      star.planted_id = planted++;
      out.truth.planted_type.push_back(large ? CommunityType::LargeStar
                                             : CommunityType::SmallStar);
      const std::string tag = (large ? "L" : "S") + std::to_string(index);
      star.banker = "bank" + tag;
      register_node(star.banker, AgentClass::Banker, star.planted_id,
                    out.truth.planted_type.back());
      const int lo = large ? cfg.large_star_farmers_min : cfg.small_star_farmers_min;
      const int hi = large ? cfg.large_star_farmers_max : cfg.small_star_farmers_max;
      const int farmers = static_cast<int>(rng.range(lo, hi));
      if (large) {
        star.merchant = "mer" + tag;
        register_node(star.merchant, AgentClass::Merchant, star.planted_id,
                      out.truth.planted_type.back());
        star.warehouse = "swh" + tag;
        register_node(star.warehouse, AgentClass::Banker, star.planted_id,
                      out.truth.planted_type.back());
      }
      for (int f = 0; f < farmers; ++f) {
        const std::string fid = "farm" + tag + "_" + std::to_string(f);
        star.farmers.push_back(fid);
        register_node(fid, AgentClass::Farmer, star.planted_id, out.truth.planted_type.back());
        // one fixed delivery sink per farmer keeps the spokes at degree one
        int sink = 0;
        if (large) {
          const double roll = rng.uniform();
          if (roll < 0.08) sink = 1;
          else if (roll < 0.15) sink = 2;
        }
        star.farmer_sink.push_back(sink);
      }
      stars.push_back(std::move(star));
    };
    for (int s = 0; s < cfg.large_star_groups; ++s) make_star(s, true);
    for (int s = 0; s < cfg.small_star_groups; ++s) make_star(s, false);

    // chain rings with a chord arc (senior members passing inventory ahead)
    for (int r = 0; r < cfg.chain_rings; ++r) {
      ChainRing ring;
      ring.planted_id = planted++;
      out.truth.planted_type.push_back(CommunityType::Chain);
      const int len = static_cast<int>(rng.range(cfg.ring_length_min, cfg.ring_length_max));
      for (int j = 0; j < len; ++j) {
        const std::string cid = "chain" + std::to_string(r) + "_" + std::to_string(j);
        ring.members.push_back(cid);
        register_node(cid, AgentClass::ChainMember, ring.planted_id, CommunityType::Chain);
      }
      ring.chords = std::max(2, len / 5);
      rings.push_back(std::move(ring));
    }

    // socially closed pairs
    for (int p = 0; p < cfg.outcast_pairs; ++p) {
      OutcastPair pair;
      pair.planted_id = planted++;
      out.truth.planted_type.push_back(CommunityType::Outcast);
      pair.a = "out" + std::to_string(p) + "_a";
      pair.b = "out" + std::to_string(p) + "_b";
      register_node(pair.a, AgentClass::Outcast, pair.planted_id, CommunityType::Outcast);
      register_node(pair.b, AgentClass::Outcast, pair.planted_id, CommunityType::Outcast);
      outcasts.push_back(std::move(pair));
    }

    // provider sale order: large stars, small stars, then rings
    for (const StarGroup& s : stars) {
      ProviderGroup g;
      g.planted_id = s.planted_id;
      g.banker = s.banker;
      providers.push_back(std::move(g));
    }
    for (const ChainRing& r : rings) {
      ProviderGroup g;
      g.planted_id = r.planted_id;
      g.is_chain = true;
      g.members = r.members;
      providers.push_back(std::move(g));
    }

  }

  /// Ban flags drawn in a stable (sorted id) order.
  void assign_bans() {
    std::vector<std::string> ids;
    ids.reserve(out.truth.nodes.size());
    for (const auto& [id, info] : out.truth.nodes) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    Rng ban_rng = Rng::seeded(cfg.seed).fork(0xba5eba11);
    for (const std::string& id : ids) {
      auto& info = out.truth.nodes[id];
      double p = cfg.ban_prob_normal;
      switch (info.cls) {
        case AgentClass::Farmer: p = cfg.ban_prob_farmer; break;
        case AgentClass::Banker: p = cfg.ban_prob_banker; break;
        case AgentClass::Merchant: p = cfg.ban_prob_merchant; break;
        case AgentClass::ChainMember: p = cfg.ban_prob_chain; break;
        case AgentClass::Outcast: p = cfg.ban_prob_outcast; break;
        case AgentClass::Normal: p = cfg.ban_prob_normal; break;
      }
      info.banned = ban_rng.bernoulli(p);
    }
  }

  std::int64_t week_time(int week) {
    return cfg.epoch + static_cast<std::int64_t>(week) * kWeekSeconds +
           rng.range(0, kWeekSeconds - 1);
  }

  void emit(int week, const std::string& src, const std::string& dst, const std::string& item,
            std::uint64_t qty, double money, bool is_rmt, TradeKind kind = TradeKind::Direct,
            std::int64_t at = -1) {
    TradeEvent ev;
    ev.timestamp = at >= 0 ? at : week_time(week);
    ev.source_id = src;
    ev.target_id = dst;
    ev.kind = kind;
    ev.item_id = item;
    ev.quantity = qty;
    ev.money_value = static_cast<std::uint64_t>(std::max(0.0, money));
    ev.index = out.trades.size();
    out.trades.push_back(std::move(ev));
    out.truth.event_rmt.push_back(is_rmt);
  }

  double consumer_money() {
    return std::floor(rng.lognormal(cfg.consumer_money_log_mu, cfg.consumer_money_log_sigma));
  }

  /// One consumer trade, possibly routed through the cluster warehouse.
  void consumer_trade(int week, int cluster, const std::string& a, const std::string& b) {
    const std::string item = "itm" + std::to_string(rng.below(40));
    const std::uint64_t qty = 1 + rng.below(5);
    const double money = consumer_money();
    if (rng.bernoulli(cfg.warehouse_fraction)) {
      const std::string& wh = cluster_warehouse[static_cast<std::size_t>(cluster)];
      const std::int64_t t0 = week_time(week);
      const std::int64_t t1 =
          std::min(t0 + rng.range(1800, 86400),
                   cfg.epoch + static_cast<std::int64_t>(week + 1) * kWeekSeconds - 1);
      emit(week, a, wh, item, qty, money, false, TradeKind::WarehouseDeposit, t0);
      emit(week, wh, b, item, qty, money, false, TradeKind::WarehouseWithdraw, t1);
    } else {
      emit(week, a, b, item, qty, money, false);
    }
  }

  /// Consumer economy for one week. Returns the count of active players.
  int consumers_week(int week) {
    weekly_buyers.clear();
    int active_total = 0;
    std::unordered_map<std::string, int> appearances;
    for (int g = 0; g < cfg.consumer_clusters; ++g) {
      const auto& players = cluster_players[static_cast<std::size_t>(g)];
      const auto& friends = cluster_friends[static_cast<std::size_t>(g)];
      const int hubs = std::min<int>(cfg.hubs_per_cluster, static_cast<int>(players.size()));
      for (int i = 0; i < static_cast<int>(players.size()); ++i) {
        if (!rng.bernoulli(cfg.player_activity)) continue;
        ++active_total;
        const int trades = rng.poisson(cfg.trades_per_active_player);
        for (int t = 0; t < trades; ++t) {
          std::string partner;
          int partner_cluster = g;
          if (cfg.consumer_clusters > 1 && rng.bernoulli(cfg.cross_cluster_fraction)) {
            partner_cluster = static_cast<int>(rng.below(
                static_cast<std::uint64_t>(cfg.consumer_clusters)));
            if (partner_cluster == g) partner_cluster = (g + 1) % cfg.consumer_clusters;
            const auto& others = cluster_players[static_cast<std::size_t>(partner_cluster)];
            partner = others[rng.below(others.size())];
          } else if (hubs > 0 && i >= hubs && rng.bernoulli(cfg.hub_trade_fraction)) {
            // market-square trade with one of the cluster's popular traders
            partner = players[rng.below(static_cast<std::uint64_t>(hubs))];
          } else {
            const auto& fr = friends[static_cast<std::size_t>(i)];
            if (fr.empty()) continue;
            partner = players[static_cast<std::size_t>(fr[rng.below(fr.size())])];
          }
          if (partner == players[static_cast<std::size_t>(i)]) continue;
          appearances[players[static_cast<std::size_t>(i)]] += 1;
          appearances[partner] += 1;
          if (rng.bernoulli(0.5)) {
            consumer_trade(week, g, players[static_cast<std::size_t>(i)], partner);
          } else {
            consumer_trade(week, partner_cluster == g ? g : partner_cluster, partner,
                           players[static_cast<std::size_t>(i)]);
          }
        }
      }
      // buyers must be firmly anchored in their own community before a
      // provider sells to them; order is the cluster player order
      for (const std::string& id : players) {
        auto it = appearances.find(id);
        if (it != appearances.end() && it->second >= 2) weekly_buyers.push_back(id);
      }
      appearances.clear();
    }
    return active_total;
  }

  void stars_week(int week) {
    for (const StarGroup& star : stars) {
      bool warehouse_fed = false;
      for (std::size_t f = 0; f < star.farmers.size(); ++f) {
        if (!rng.bernoulli(cfg.farmer_activity)) continue;
        const int deliveries = rng.poisson(cfg.farmer_deliveries_per_week);
        const int sink_kind = star.farmer_sink[f];
        for (int d = 0; d < deliveries; ++d) {
          const double money = std::floor(rng.lognormal(14.0, 0.8));
          if (sink_kind == 2 && !star.warehouse.empty()) {
            emit(week, star.farmers[f], star.warehouse, "gold", 1, money, false,
                 TradeKind::WarehouseDeposit);
            warehouse_fed = true;
          } else if (sink_kind == 1 && !star.merchant.empty()) {
            emit(week, star.farmers[f], star.merchant, "gold", 1, money, false);
          } else {
            emit(week, star.farmers[f], star.banker, "gold", 1, money, false);
          }
        }
      }
      if (!star.merchant.empty()) {
        const int transfers = 1 + static_cast<int>(rng.below(2));
        for (int t = 0; t < transfers; ++t) {
          emit(week, star.merchant, star.banker, "gold", 1,
               std::floor(rng.lognormal(16.0, 0.6)), false);
        }
      }
      if (warehouse_fed) {
        const int withdrawals = 1 + static_cast<int>(rng.below(2));
        for (int t = 0; t < withdrawals; ++t) {
          emit(week, star.warehouse, star.banker, "gold", 1,
               std::floor(rng.lognormal(15.5, 0.6)), false, TradeKind::WarehouseWithdraw);
        }
      }
    }
  }

  void chains_week(int week) {
    if (cfg.rotation_period_weeks <= 0) return;
    const bool rotate = week % cfg.rotation_period_weeks == 0;
    for (const ChainRing& ring : rings) {
      const int len = static_cast<int>(ring.members.size());
      if (rotate) {
        for (int j = 0; j < len; ++j) {
          // the shop limit forces the full inventory onto the next member
          const int parts = 1 + static_cast<int>(rng.below(2));
          for (int p = 0; p < parts; ++p) {
            emit(week, ring.members[static_cast<std::size_t>(j)],
                 ring.members[static_cast<std::size_t>((j + 1) % len)], "stock",
                 30 + rng.below(20), std::floor(rng.lognormal(17.0, 0.7)), false);
          }
        }
      }
      for (int c = 0; c < ring.chords; ++c) {
        if (rng.bernoulli(0.85)) {
          emit(week, ring.members[static_cast<std::size_t>(c)],
               ring.members[static_cast<std::size_t>(c + 2)], "stock", 10 + rng.below(10),
               std::floor(rng.lognormal(16.5, 0.7)), false);
        }
      }
    }
  }

  void outcasts_week(int week) {
    for (const OutcastPair& pair : outcasts) {
      if (!rng.bernoulli(0.55)) continue;
      const int trades = 1 + static_cast<int>(rng.below(3));
      for (int t = 0; t < trades; ++t) {
        const bool ab = rng.bernoulli(0.5);
        emit(week, ab ? pair.a : pair.b, ab ? pair.b : pair.a,
             "itm" + std::to_string(rng.below(40)), 1 + rng.below(3), consumer_money(), false);
      }
    }
  }

  const PhaseSpec& phase_for(int week) const {
    static const PhaseSpec kAll{0, 0, 0.0};
    const PhaseSpec* best = &kAll;
    for (const PhaseSpec& p : phases_sorted) {
      if (p.start_week <= week) best = &p;
    }
    return *best;
  }
  std::vector<PhaseSpec> phases_sorted;

  /// RMT sales for one week, calibrated so flagged events approach the
  /// target share of all events. Returns sale count.
  int sales_week(int week, std::size_t baseline_events, double intensity) {
    if (providers.empty() || weekly_buyers.empty()) return 0;
    const PhaseSpec& phase = phase_for(week);
    int active = phase.active_providers > 0
                     ? std::min<int>(phase.active_providers, static_cast<int>(providers.size()))
                     : static_cast<int>(providers.size());
    std::vector<double> weights(static_cast<std::size_t>(active));
    for (int i = 0; i < active; ++i) {
      weights[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(i + 1), -phase.skew);
    }

    const double share = cfg.target_inter_rmt_share;
    const double want = intensity * share / (1.0 - share) * static_cast<double>(baseline_events);
    const int sales = std::max(0, static_cast<int>(want + 0.5));
    for (int s = 0; s < sales; ++s) {
      const ProviderGroup& g = providers[rng.weighted(weights)];
      const std::string* seller = &g.banker;
      if (g.is_chain) seller = &g.members[rng.below(g.members.size())];
      const std::string& buyer = weekly_buyers[rng.below(weekly_buyers.size())];
      const double money = std::floor(rng.lognormal(cfg.rmt_money_log_mu, cfg.rmt_money_log_sigma));
      const std::int64_t at = week_time(week);
      emit(week, *seller, buyer, "gold", 1, money, true, TradeKind::Direct, at);

      // matching market record, with noise
      const double miss = 0.25 * cfg.market_noise;
      if (!rng.bernoulli(miss)) {
        MarketRecord rec;
        rec.trade_volume =
            std::floor(money * rng.lognormal(0.0, 0.05 + 0.3 * cfg.market_noise) + 1.0);
        rec.unit_price = cfg.base_unit_price * rng.lognormal(0.0, 0.05 + 0.15 * cfg.market_noise);
        rec.server_id = cfg.server_id;
        const std::int64_t horizon =
            cfg.epoch + static_cast<std::int64_t>(cfg.weeks) * kWeekSeconds - 1;
        rec.completion_time = std::clamp(at + rng.range(-2 * 86400, 4 * 86400), cfg.epoch, horizon);
        out.market.push_back(std::move(rec));
      }
    }
    // unrelated listings
    const int spurious = rng.poisson(0.30 * cfg.market_noise * static_cast<double>(sales));
    for (int s = 0; s < spurious; ++s) {
      MarketRecord rec;
      rec.trade_volume = std::floor(rng.lognormal(cfg.rmt_money_log_mu, 1.2) + 1.0);
      rec.unit_price = cfg.base_unit_price * rng.lognormal(0.0, 0.25);
      rec.server_id = cfg.server_id;
      rec.completion_time = week_time(week);
      out.market.push_back(std::move(rec));
    }
    return sales;
  }

  /// Class- and flavor-conditional weekly play record.
  PlayActivityRecord play_record(const std::string& uid, int week) {
    const Persona persona = personas[uid];
    PlayActivityRecord rec;
    rec.user_id = uid;
    rec.week_index = week;
    rec.banned = out.truth.nodes[uid].banned;
    auto& f = rec.f;
    auto pos = [&](double mu, double sigma) { return std::max(0.0, rng.normal(mu, sigma)); };

    switch (persona.cls) {
      case AgentClass::Normal:
      case AgentClass::Outcast: {
        // baseline casual player
        f[0] = pos(6.0, 2.5) * 3600.0;
        f[1] = std::min(7.0, 1.0 + pos(2.5, 1.2));
        f[2] = pos(70000, 25000);
        f[3] = pos(3, 2);
        f[4] = pos(4, 3);
        f[5] = pos(180, 70);
        f[6] = pos(4, 2);
        f[7] = pos(3, 2);
        f[8] = pos(2, 1.5);
        f[9] = pos(4, 2);
        f[10] = pos(300000, 150000);
        f[11] = pos(280000, 140000);
        f[12] = pos(500000, 200000);
        f[13] = pos(450000, 200000);
        f[14] = pos(0.4, 0.6) * 3600.0;
        f[15] = pos(0.7, 0.6) * 3600.0;
        switch (persona.flavor) {
          case 1:  // fisher
            f[14] = pos(20.0, 5.0) * 3600.0;
            f[0] += f[14];
            break;
          case 2:  // shop-minded
            f[15] = pos(14.0, 4.0) * 3600.0;
            f[9] = pos(18, 5);
            break;
          case 3:  // party animal
            f[7] = pos(25, 6);
            f[6] = pos(12, 4);
            break;
          case 4:  // worker
            f[12] = pos(2500000, 600000);
            f[13] = pos(150000, 80000);
            f[5] = pos(500, 120);
            f[2] = pos(160000, 40000);
            break;
          case 5:  // hardcore
            for (std::size_t i = 0; i < 14; ++i) f[i] *= 3.2;
            f[0] = std::min(f[0] * 1.6, 6.5 * 86400.0);
            f[1] = 7.0;
            break;
          case 6:  // light
            for (double& v : f) v *= 0.22;
            f[1] = std::min(f[1], 2.0);
            break;
          default: break;
        }
        break;
      }
      case AgentClass::Farmer: {
        // short sessions, pure production, everything else minimal
        f[0] = pos(2.2, 0.7) * 3600.0;
        f[1] = std::min(7.0, 1.0 + pos(1.5, 0.8));
        f[2] = pos(15000, 6000);
        f[5] = pos(350, 90);
        f[9] = pos(4, 1.5);
        f[11] = pos(1800000, 500000);
        f[12] = pos(2200000, 600000);
        f[13] = pos(30000, 15000);
        break;
      }
      case AgentClass::Banker:
      case AgentClass::Merchant: {
        // merchant desk: heavy shop time and trades, money flows both ways
        f[0] = pos(10.0, 3.0) * 3600.0;
        f[1] = std::min(7.0, 3.0 + pos(2.5, 1.0));
        f[9] = pos(60, 15);
        f[10] = pos(30000000, 8000000);
        f[11] = pos(9000000, 3000000);
        f[12] = pos(12000000, 4000000);
        f[13] = pos(400000, 150000);
        f[15] = pos(22.0, 6.0) * 3600.0;
        break;
      }
      case AgentClass::ChainMember: {
        // long unattended sessions, shop activity right at the limit
        f[0] = std::min(6.8 * 86400.0, pos(5.6, 0.6) * 86400.0);
        f[1] = 7.0;
        f[2] = pos(1500, 800);
        f[9] = std::min<double>(static_cast<double>(cfg.shop_limit),
                                pos(static_cast<double>(cfg.shop_limit) - 2.0, 2.0));
        f[10] = pos(40000000, 9000000);
        f[11] = pos(38000000, 9000000);
        f[12] = pos(300000, 150000);
        f[13] = pos(250000, 120000);
        f[15] = pos(60.0, 12.0) * 3600.0;
        break;
      }
    }
    // physical caps
    f[0] = std::min(f[0], static_cast<double>(kWeekSeconds));
    f[1] = std::min(f[1], 7.0);
    return rec;
  }

  void play_logs() {
    // whole-window records, one per user per week, in registration order
    std::vector<std::string> ids;
    ids.reserve(out.truth.nodes.size());
    for (const auto& [id, info] : out.truth.nodes) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
      if (out.truth.nodes[id].cls == AgentClass::Normal && id.rfind("wh", 0) == 0) continue;
      for (int w = 0; w < cfg.weeks; ++w) {
        out.play.push_back(play_record(id, w));
      }
    }
  }

  Scenario run() {
    build_population();
    assign_bans();
    phases_sorted = cfg.phases;
    std::sort(phases_sorted.begin(), phases_sorted.end(),
              [](const PhaseSpec& a, const PhaseSpec& b) { return a.start_week < b.start_week; });

    for (int w = 0; w < cfg.weeks; ++w) {
      const std::size_t before = out.trades.size();
      consumers_week(w);
      stars_week(w);
      chains_week(w);
      outcasts_week(w);
      const std::size_t baseline = out.trades.size() - before;
      const double intensity =
          rng.lognormal(-0.5 * cfg.rmt_weekly_volatility * cfg.rmt_weekly_volatility,
                        cfg.rmt_weekly_volatility);
      sales_week(w, baseline, intensity);
    }
    play_logs();
    std::stable_sort(out.market.begin(), out.market.end(),
                     [](const MarketRecord& a, const MarketRecord& b) {
                       return a.completion_time < b.completion_time;
                     });
    return std::move(out);
  }
};

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Generator gen(config);
  return gen.run();
}

void write_scenario(const Scenario& scenario, const std::string& dir, LogFormat format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string ext = format == LogFormat::Csv ? "csv" : "jsonl";
  {
    std::ofstream f(dir + "/trades." + ext, std::ios::binary);
    write_trade_log(f, scenario.trades, format);
  }
  {
    std::ofstream f(dir + "/play." + ext, std::ios::binary);
    write_play_log(f, scenario.play, format);
  }
  {
    std::ofstream f(dir + "/market." + ext, std::ios::binary);
    write_market_records(f, scenario.market, format);
  }
  {
    std::ofstream f(dir + "/truth.csv", std::ios::binary);
    csv::write_row(f, {"node", "class", "community", "type", "banned"});
    std::vector<std::string> ids;
    ids.reserve(scenario.truth.nodes.size());
    for (const auto& [id, info] : scenario.truth.nodes) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
      const auto& info = scenario.truth.nodes.at(id);
      csv::write_row(f, {id, agent_class_name(info.cls), std::to_string(info.planted_community),
                         community_type_name(info.intended_type),
                         info.banned ? "true" : "false"});
    }
  }
  {
    std::ofstream f(dir + "/truth_events.csv", std::ios::binary);
    csv::write_row(f, {"event_index", "rmt"});
    for (std::size_t i = 0; i < scenario.truth.event_rmt.size(); ++i) {
      csv::write_row(f, {std::to_string(i), scenario.truth.event_rmt[i] ? "1" : "0"});
    }
  }
}

GroundTruth read_ground_truth(const std::string& dir) {
  GroundTruth truth;
  {
    std::ifstream f(dir + "/truth.csv", std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot open " + dir + "/truth.csv");
    csv::Reader reader(f);
    std::size_t line = 0;
    auto header = reader.next(line);
    if (!header) throw Error(Errc::IoError, "empty truth.csv");
    int max_comm = -1;
    std::vector<std::pair<int, CommunityType>> typed;
    while (auto row = reader.next(line)) {
      if (row->size() < 5) throw Error(Errc::IoError, "short row in truth.csv");
      GroundTruth::NodeInfo info;
      auto cls = parse_agent_class((*row)[1]);
      auto type = parse_community_type((*row)[3]);
      if (!cls || !type) throw Error(Errc::IoError, "bad class/type in truth.csv");
      info.cls = *cls;
      info.planted_community = std::stoi((*row)[2]);
      info.intended_type = *type;
      info.banned = (*row)[4] == "true" || (*row)[4] == "1";
      max_comm = std::max(max_comm, info.planted_community);
      typed.emplace_back(info.planted_community, info.intended_type);
      truth.nodes.emplace((*row)[0], info);
    }
    truth.planted_type.assign(static_cast<std::size_t>(max_comm + 1), CommunityType::Outcast);
    for (const auto& [c, t] : typed) truth.planted_type[static_cast<std::size_t>(c)] = t;
  }
  {
    std::ifstream f(dir + "/truth_events.csv", std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot open " + dir + "/truth_events.csv");
    csv::Reader reader(f);
    std::size_t line = 0;
    auto header = reader.next(line);
    while (auto row = reader.next(line)) {
      if (row->size() < 2) continue;
      const std::size_t idx = static_cast<std::size_t>(std::stoull((*row)[0]));
      if (truth.event_rmt.size() <= idx) truth.event_rmt.resize(idx + 1, false);
      truth.event_rmt[idx] = (*row)[1] == "1" || (*row)[1] == "true";
    }
  }
  return truth;
}

namespace {

struct PrfAccum {
  std::size_t tp = 0, fp = 0, fn = 0;

  void add(bool predicted, bool actual) {
    if (predicted && actual) ++tp;
    else if (predicted && !actual) ++fp;
    else if (!predicted && actual) ++fn;
  }

  PrfRow row() const {
    PrfRow r;
    r.support = tp + fn;
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
  }
};

bool is_star(CommunityType t) {
  return t == CommunityType::LargeStar || t == CommunityType::SmallStar;
}

}  // namespace

DetectionMetrics evaluate_detection(std::span<const WeekAssignment> weeks,
                                    const GroundTruth& truth) {
  DetectionMetrics metrics;
  std::map<CommunityType, PrfAccum> per_type;
  PrfAccum star_any, provider_role, rmt_events;
  double nmi_sum = 0.0;
  int nmi_weeks = 0;

  // the largest planted consumer cluster = "the giant" for matching
  std::map<int, std::size_t> planted_sizes;
  for (const auto& [id, info] : truth.nodes) {
    ++planted_sizes[info.planted_community];
  }
  int giant_planted = -1;
  std::size_t giant_size = 0;
  for (const auto& [c, size] : planted_sizes) {
    if (c < 0 || static_cast<std::size_t>(c) >= truth.planted_type.size()) continue;
    if (truth.planted_type[static_cast<std::size_t>(c)] == CommunityType::GiantConsumer &&
        size > giant_size) {
      giant_size = size;
      giant_planted = c;
    }
  }
  int giant_weeks_matched = 0;
  int giant_weeks_total = 0;

  for (const WeekAssignment& week : weeks) {
    const std::size_t n = week.node_ids.size();
    std::vector<int> planted(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
      auto it = truth.nodes.find(week.node_ids[v]);
      if (it == truth.nodes.end()) continue;
      planted[v] = it->second.planted_community;

      const CommunityType predicted =
          week.type_of_community[static_cast<std::size_t>(week.community[v])];
      const CommunityType actual = it->second.intended_type;
      for (CommunityType t : {CommunityType::GiantConsumer, CommunityType::LargeStar,
                              CommunityType::SmallStar, CommunityType::Chain,
                              CommunityType::Outcast}) {
        per_type[t].add(predicted == t, actual == t);
      }
      star_any.add(is_star(predicted), is_star(actual));
      provider_role.add(role_for(predicted) == CommunityRole::Provider,
                        role_for(actual) == CommunityRole::Provider);
    }

    // NMI vs planted communities over this week's nodes
    {
      std::vector<int> a, b;
      a.reserve(n);
      for (std::size_t v = 0; v < n; ++v) {
        if (planted[v] < 0) continue;
        a.push_back(week.community[v]);
        b.push_back(planted[v]);
      }
      if (!a.empty()) {
        nmi_sum += normalized_mutual_information(a, b);
        ++nmi_weeks;
      }
    }

    // giant matching by max overlap
    if (giant_planted >= 0) {
      std::map<int, std::size_t> overlap;
      for (std::size_t v = 0; v < n; ++v) {
        if (planted[v] == giant_planted) ++overlap[week.community[v]];
      }
      if (!overlap.empty()) {
        ++giant_weeks_total;
        int best_comm = -1;
        std::size_t best = 0;
        for (const auto& [c, cnt] : overlap) {
          if (cnt > best) {
            best = cnt;
            best_comm = c;
          }
        }
        const CommunityType matched =
            week.type_of_community[static_cast<std::size_t>(best_comm)];
        metrics.giant_match_type = community_type_name(matched);
        if (matched == CommunityType::GiantConsumer) ++giant_weeks_matched;
      }
    }

    // event-level RMT extraction quality
    for (const auto& [idx, category] : week.events) {
      const bool actual =
          idx < truth.event_rmt.size() && truth.event_rmt[static_cast<std::size_t>(idx)];
      rmt_events.add(category == TradeCategory::InterRmt, actual);
    }
  }

  for (const auto& [t, acc] : per_type) {
    metrics.node_type[community_type_name(t)] = acc.row();
  }
  metrics.star_any = star_any.row();
  metrics.provider_role = provider_role.row();
  metrics.rmt_events = rmt_events.row();
  metrics.mean_weekly_nmi = nmi_weeks > 0 ? nmi_sum / static_cast<double>(nmi_weeks) : 0.0;
  metrics.giant_matched_consumer =
      giant_weeks_total > 0 && giant_weeks_matched == giant_weeks_total;
  return metrics;
}

}  // namespace rmt

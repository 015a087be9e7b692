#include "rmtnet/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rmtnet/error.hpp"

namespace rmt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Ini Ini::parse(std::istream& in) {
  Ini ini;
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments that are not inside a value's quotes (values here are plain)
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw Error(Errc::ConfigInvalid, "bad section header at line " + std::to_string(lineno));
      }
      section = trim(text.substr(1, text.size() - 2));
      ini.sections_[section];
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::ConfigInvalid, "expected key=value at line " + std::to_string(lineno));
    }
    ini.sections_[section][trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }
  return ini;
}

Ini Ini::parse_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot open config " + path);
  return parse(f);
}

bool Ini::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> Ini::raw(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string Ini::get(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
  auto v = raw(section, key);
  return v ? *v : fallback;
}

double Ini::get_double(const std::string& section, const std::string& key,
                       double fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  double out = 0.0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) {
    throw Error(Errc::ConfigInvalid, section + "." + key + " is not a number: " + *v);
  }
  return out;
}

int Ini::get_int(const std::string& section, const std::string& key, int fallback) const {
  return static_cast<int>(get_i64(section, key, fallback));
}

std::int64_t Ini::get_i64(const std::string& section, const std::string& key,
                          std::int64_t fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) {
    throw Error(Errc::ConfigInvalid, section + "." + key + " is not an integer: " + *v);
  }
  return out;
}

std::uint64_t Ini::get_u64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || p != v->data() + v->size()) {
    throw Error(Errc::ConfigInvalid, section + "." + key + " is not an integer: " + *v);
  }
  return out;
}

bool Ini::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw Error(Errc::ConfigInvalid, section + "." + key + " is not a boolean: " + *v);
}

namespace {

LogFormat format_or_throw(const Ini& ini, const std::string& section, const std::string& key) {
  const std::string token = ini.get(section, key, "csv");
  auto f = parse_log_format(token);
  if (!f) throw Error(Errc::ConfigInvalid, section + "." + key + ": unknown format " + token);
  return *f;
}

}  // namespace

PipelineConfig PipelineConfig::from_ini(const Ini& ini) {
  PipelineConfig c;
  c.trade_log = ini.get("inputs", "trade_log", "");
  c.trade_format = format_or_throw(ini, "inputs", "trade_format");
  c.play_log = ini.get("inputs", "play_log", "");
  c.play_format = format_or_throw(ini, "inputs", "play_format");
  c.market_log = ini.get("inputs", "market_log", "");
  c.market_format = format_or_throw(ini, "inputs", "market_format");
  c.account_map = ini.get("inputs", "account_map", "");

  c.epoch = ini.get_i64("windowing", "epoch", 0);
  c.weeks = ini.get_int("windowing", "weeks", 0);

  c.algorithm = ini.get("detection", "algorithm", "multilevel");
  c.seed = ini.get_u64("detection", "seed", 42);
  c.resolution = ini.get_double("detection", "resolution", 1.0);
  c.weighted = ini.get_bool("detection", "weighted", true);
  c.compare = ini.get("detection", "compare", "");

  c.community_k = ini.get_int("clustering", "community_k", 5);
  c.user_k = ini.get_int("clustering", "user_k", 7);
  c.cluster_seed = ini.get_u64("clustering", "seed", 42);
  c.restarts = ini.get_int("clustering", "restarts", 10);

  TaggingThresholds& t = c.tagging;
  t.giant_min_share = ini.get_double("tagging", "giant_min_share", t.giant_min_share);
  t.giant_alpha_min = ini.get_double("tagging", "giant_alpha_min", t.giant_alpha_min);
  t.giant_alpha_max = ini.get_double("tagging", "giant_alpha_max", t.giant_alpha_max);
  t.powerlaw_min_tail = static_cast<std::size_t>(
      ini.get_i64("tagging", "powerlaw_min_tail", static_cast<std::int64_t>(t.powerlaw_min_tail)));
  t.chain_max_mean_degree =
      ini.get_double("tagging", "chain_max_mean_degree", t.chain_max_mean_degree);
  t.chain_min_diameter_ratio =
      ini.get_double("tagging", "chain_min_diameter_ratio", t.chain_min_diameter_ratio);
  t.chain_min_assortativity =
      ini.get_double("tagging", "chain_min_assortativity", t.chain_min_assortativity);
  t.large_star_min_size = ini.get_int("tagging", "large_star_min_size", t.large_star_min_size);
  t.large_star_max_assortativity =
      ini.get_double("tagging", "large_star_max_assortativity", t.large_star_max_assortativity);
  t.large_star_min_std_over_mean =
      ini.get_double("tagging", "large_star_min_std_over_mean", t.large_star_min_std_over_mean);
  t.small_star_max_assortativity =
      ini.get_double("tagging", "small_star_max_assortativity", t.small_star_max_assortativity);

  c.permutation_test = ini.get_bool("estimation", "permutation_test", false);
  c.permutation_iterations = ini.get_int("estimation", "permutation_iterations", 10000);

  c.out_dir = ini.get("output", "dir", "out");
  c.graphml = ini.get_bool("output", "graphml", true);
  c.dot = ini.get_bool("output", "dot", false);
  c.network_betweenness = ini.get_bool("output", "network_betweenness", true);
  c.strict = ini.get_bool("output", "strict", false);
  c.jobs = ini.get_int("output", "jobs", 2);
  return c;
}

ScenarioConfig scenario_from_ini(const Ini& ini) {
  ScenarioConfig c;
  const std::string preset = ini.get("scenario", "preset", "");
  if (preset == "paper") c = ScenarioConfig::paper_default();
  else if (preset == "coupled") c = ScenarioConfig::coupled();
  else if (preset == "maturing") c = ScenarioConfig::maturing();
  else if (preset == "tiny") c = ScenarioConfig::tiny();
  else if (!preset.empty()) throw Error(Errc::ConfigInvalid, "unknown preset " + preset);

  c.seed = ini.get_u64("scenario", "seed", c.seed);
  c.weeks = ini.get_int("scenario", "weeks", c.weeks);
  c.consumer_clusters = ini.get_int("scenario", "consumer_clusters", c.consumer_clusters);
  c.players_per_cluster = ini.get_int("scenario", "players_per_cluster", c.players_per_cluster);
  c.hubs_per_cluster = ini.get_int("scenario", "hubs_per_cluster", c.hubs_per_cluster);
  c.hub_trade_fraction = ini.get_double("scenario", "hub_trade_fraction", c.hub_trade_fraction);
  c.player_activity = ini.get_double("scenario", "player_activity", c.player_activity);
  c.trades_per_active_player =
      ini.get_double("scenario", "trades_per_active_player", c.trades_per_active_player);
  c.cross_cluster_fraction =
      ini.get_double("scenario", "cross_cluster_fraction", c.cross_cluster_fraction);
  c.warehouse_fraction = ini.get_double("scenario", "warehouse_fraction", c.warehouse_fraction);
  c.large_star_groups = ini.get_int("scenario", "large_star_groups", c.large_star_groups);
  c.large_star_farmers_min =
      ini.get_int("scenario", "large_star_farmers_min", c.large_star_farmers_min);
  c.large_star_farmers_max =
      ini.get_int("scenario", "large_star_farmers_max", c.large_star_farmers_max);
  c.small_star_groups = ini.get_int("scenario", "small_star_groups", c.small_star_groups);
  c.small_star_farmers_min =
      ini.get_int("scenario", "small_star_farmers_min", c.small_star_farmers_min);
  c.small_star_farmers_max =
      ini.get_int("scenario", "small_star_farmers_max", c.small_star_farmers_max);
  c.farmer_deliveries_per_week =
      ini.get_double("scenario", "farmer_deliveries_per_week", c.farmer_deliveries_per_week);
  c.farmer_activity = ini.get_double("scenario", "farmer_activity", c.farmer_activity);
  c.chain_rings = ini.get_int("scenario", "chain_rings", c.chain_rings);
  c.ring_length_min = ini.get_int("scenario", "ring_length_min", c.ring_length_min);
  c.ring_length_max = ini.get_int("scenario", "ring_length_max", c.ring_length_max);
  c.rotation_period_weeks =
      ini.get_int("scenario", "rotation_period_weeks", c.rotation_period_weeks);
  c.shop_limit = ini.get_int("scenario", "shop_limit", c.shop_limit);
  c.outcast_pairs = ini.get_int("scenario", "outcast_pairs", c.outcast_pairs);
  c.target_inter_rmt_share =
      ini.get_double("scenario", "target_inter_rmt_share", c.target_inter_rmt_share);
  c.rmt_weekly_volatility =
      ini.get_double("scenario", "rmt_weekly_volatility", c.rmt_weekly_volatility);
  c.rmt_money_log_mu = ini.get_double("scenario", "rmt_money_log_mu", c.rmt_money_log_mu);
  c.rmt_money_log_sigma = ini.get_double("scenario", "rmt_money_log_sigma", c.rmt_money_log_sigma);
  c.market_noise = ini.get_double("scenario", "market_noise", c.market_noise);
  c.base_unit_price = ini.get_double("scenario", "base_unit_price", c.base_unit_price);
  c.server_id = ini.get("scenario", "server_id", c.server_id);
  c.ban_prob_normal = ini.get_double("scenario", "ban_prob_normal", c.ban_prob_normal);
  c.ban_prob_farmer = ini.get_double("scenario", "ban_prob_farmer", c.ban_prob_farmer);
  c.ban_prob_banker = ini.get_double("scenario", "ban_prob_banker", c.ban_prob_banker);
  c.ban_prob_merchant = ini.get_double("scenario", "ban_prob_merchant", c.ban_prob_merchant);
  c.ban_prob_chain = ini.get_double("scenario", "ban_prob_chain", c.ban_prob_chain);
  c.ban_prob_outcast = ini.get_double("scenario", "ban_prob_outcast", c.ban_prob_outcast);
  c.epoch = ini.get_i64("scenario", "epoch", c.epoch);

  // phases: start:active:skew triplets, comma separated
  if (auto raw = ini.raw("scenario", "phases")) {
    c.phases.clear();
    std::stringstream ss(*raw);
    std::string token;
    while (std::getline(ss, token, ',')) {
      PhaseSpec p;
      if (std::sscanf(token.c_str(), "%d:%d:%lf", &p.start_week, &p.active_providers, &p.skew) !=
          3) {
        throw Error(Errc::ConfigInvalid, "bad phase token '" + token + "'");
      }
      c.phases.push_back(p);
    }
  }
  return c;
}

}  // namespace rmt

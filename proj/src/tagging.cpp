#include "rmtnet/tagging.hpp"

#include <algorithm>
#include <cmath>

#include "rmtnet/error.hpp"
#include "rmtnet/metrics.hpp"

namespace rmt {

const char* community_type_name(CommunityType t) {
  switch (t) {
    case CommunityType::GiantConsumer: return "GiantConsumer";
    case CommunityType::LargeStar: return "LargeStar";
    case CommunityType::SmallStar: return "SmallStar";
    case CommunityType::Chain: return "Chain";
    case CommunityType::Outcast: return "Outcast";
  }
  return "Outcast";
}

const char* community_role_name(CommunityRole r) {
  switch (r) {
    case CommunityRole::Provider: return "Provider";
    case CommunityRole::Consumer: return "Consumer";
    case CommunityRole::Filtered: return "Filtered";
  }
  return "Filtered";
}

const char* play_style_name(PlayStyle s) {
  switch (s) {
    case PlayStyle::Fisher: return "Fisher";
    case PlayStyle::Genuine: return "Genuine";
    case PlayStyle::HardCore: return "Hard core";
    case PlayStyle::Light: return "Light";
    case PlayStyle::Party: return "Party";
    case PlayStyle::ShopHost: return "Shop host";
    case PlayStyle::Worker: return "Worker";
  }
  return "Genuine";
}

std::optional<CommunityType> parse_community_type(const std::string& token) {
  for (CommunityType t : {CommunityType::GiantConsumer, CommunityType::LargeStar,
                          CommunityType::SmallStar, CommunityType::Chain, CommunityType::Outcast}) {
    if (token == community_type_name(t)) return t;
  }
  return std::nullopt;
}

CommunityRole role_for(CommunityType type) {
  switch (type) {
    case CommunityType::LargeStar:
    case CommunityType::SmallStar:
    case CommunityType::Chain:
      return CommunityRole::Provider;
    case CommunityType::GiantConsumer:
      return CommunityRole::Consumer;
    case CommunityType::Outcast:
      return CommunityRole::Filtered;
  }
  return CommunityRole::Filtered;
}

namespace {

// play feature slots used by the style rules
constexpr std::size_t kParty = 7;
constexpr std::size_t kMoneyObtained = 12;
constexpr std::size_t kMoneySpent = 13;
constexpr std::size_t kFishing = 14;
constexpr std::size_t kShopping = 15;

double overall_activity(const Matrix& centroids, std::size_t row) {
  double acc = 0.0;
  for (std::size_t c = 0; c < centroids.cols; ++c) acc += centroids.at(row, c);
  return acc / static_cast<double>(centroids.cols);
}

}  // namespace

std::map<int, PlayStyle> label_play_styles(const Matrix& standardized_centroids) {
  const std::size_t k = standardized_centroids.rows;
  std::map<int, PlayStyle> out;
  if (k == 0) return out;

  std::vector<bool> taken(k, false);

  // argmax of `value` over unassigned clusters, requiring value > 0;
  // ties go to the smaller cluster index
  auto pick_max = [&](auto&& value) -> int {
    int best = -1;
    double best_v = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (taken[r]) continue;
      const double v = value(r);
      if (v > 0.0 && (best < 0 || v > best_v)) {
        best = static_cast<int>(r);
        best_v = v;
      }
    }
    return best;
  };
  auto assign = [&](int r, PlayStyle s) {
    out[r] = s;
    taken[static_cast<std::size_t>(r)] = true;
  };

  if (int r = pick_max([&](std::size_t i) { return standardized_centroids.at(i, kFishing); });
      r >= 0) {
    assign(r, PlayStyle::Fisher);
  }
  if (int r = pick_max([&](std::size_t i) { return standardized_centroids.at(i, kShopping); });
      r >= 0) {
    assign(r, PlayStyle::ShopHost);
  }
  if (int r = pick_max([&](std::size_t i) { return standardized_centroids.at(i, kParty); });
      r >= 0) {
    assign(r, PlayStyle::Party);
  }
  // Worker: most money obtained among clusters that spend less than they earn
  {
    int best = -1;
    double best_v = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (taken[r]) continue;
      const double earn = standardized_centroids.at(r, kMoneyObtained);
      const double spend = standardized_centroids.at(r, kMoneySpent);
      if (earn > 0.0 && spend < earn && (best < 0 || earn > best_v)) {
        best = static_cast<int>(r);
        best_v = earn;
      }
    }
    if (best >= 0) assign(best, PlayStyle::Worker);
  }
  if (int r = pick_max([&](std::size_t i) { return overall_activity(standardized_centroids, i); });
      r >= 0) {
    assign(r, PlayStyle::HardCore);
  }
  // Light: lowest overall activity, unconditional
  {
    int best = -1;
    double best_v = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      if (taken[r]) continue;
      const double v = overall_activity(standardized_centroids, r);
      if (best < 0 || v < best_v) {
        best = static_cast<int>(r);
        best_v = v;
      }
    }
    if (best >= 0) assign(best, PlayStyle::Light);
  }
  for (std::size_t r = 0; r < k; ++r) {
    if (!taken[r]) out[static_cast<int>(r)] = PlayStyle::Genuine;
  }
  return out;
}

void classify_communities(std::vector<CommunityProfile>& profiles, const TradeNetwork& net,
                          const std::vector<std::vector<int>>& members, int total_nodes,
                          const TaggingThresholds& th) {
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    CommunityProfile& p = profiles[i];
    const CommunityFeatures& f = p.features;
    const double size = static_cast<double>(f.size);

    p.ambiguous = false;
    p.degree_fit.reset();

    // 1. giant consumer community: big and scale-free
    if (size >= th.giant_min_share * static_cast<double>(total_nodes)) {
      const TradeNetwork sub = induced_subgraph(net, members[i]);
      std::vector<double> degrees;
      degrees.reserve(static_cast<std::size_t>(sub.node_count()));
      for (int v = 0; v < sub.node_count(); ++v) {
        const double d = static_cast<double>(sub.out_neighbors(v).size()) +
                         static_cast<double>(sub.in_neighbors(v).size());
        if (d >= 1.0) degrees.push_back(d);
      }
      try {
        const PowerLawFit fit = fit_power_law(degrees, th.powerlaw_min_tail);
        p.degree_fit = fit;
        if (fit.alpha >= th.giant_alpha_min && fit.alpha <= th.giant_alpha_max) {
          p.type = CommunityType::GiantConsumer;
          p.role = role_for(p.type);
          continue;
        }
      } catch (const Error&) {
        // too small or degenerate a tail; fall through
      }
    }
    // 2. chain: sparse, stretched, assortative
    if (f.degree_mean <= th.chain_max_mean_degree &&
        f.diameter >= th.chain_min_diameter_ratio * size &&
        f.assortativity >= th.chain_min_assortativity) {
      p.type = CommunityType::Chain;
      p.role = role_for(p.type);
      continue;
    }
    // 3. large star: hub-dominated
    if (f.size >= th.large_star_min_size &&
        f.assortativity <= th.large_star_max_assortativity &&
        f.degree_std >= th.large_star_min_std_over_mean * f.degree_mean) {
      p.type = CommunityType::LargeStar;
      p.role = role_for(p.type);
      continue;
    }
    // 4. small star
    if (f.size < th.large_star_min_size &&
        f.assortativity <= th.small_star_max_assortativity) {
      p.type = CommunityType::SmallStar;
      p.role = role_for(p.type);
      continue;
    }
    // 5. everything else
    p.type = CommunityType::Outcast;
    p.role = role_for(p.type);
    p.ambiguous = true;
  }
}

std::vector<BanRateRow> ban_rate_report(const std::vector<CommunityProfile>& profiles,
                                        const std::vector<std::vector<int>>& members,
                                        const TradeNetwork& net,
                                        const std::unordered_map<std::string, bool>& banned) {
  const bool data_missing = banned.empty();

  std::vector<BanRateRow> rows;
  for (CommunityType t : {CommunityType::GiantConsumer, CommunityType::LargeStar,
                          CommunityType::SmallStar, CommunityType::Chain, CommunityType::Outcast}) {
    BanRateRow row;
    row.type = t;
    row.data_missing = data_missing;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      if (profiles[i].type != t) continue;
      for (int v : members[i]) {
        ++row.members;
        auto it = banned.find(net.node_id(v));
        if (it != banned.end() && it->second) ++row.banned;
      }
    }
    row.rate = row.members > 0 ? static_cast<double>(row.banned) / static_cast<double>(row.members)
                               : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rmt

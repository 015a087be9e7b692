#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmtnet/features.hpp"
#include "rmtnet/graph.hpp"
#include "rmtnet/powerlaw.hpp"

namespace rmt {

enum class CommunityType : std::uint8_t { GiantConsumer, LargeStar, SmallStar, Chain, Outcast };
enum class CommunityRole : std::uint8_t { Provider, Consumer, Filtered };
enum class PlayStyle : std::uint8_t { Fisher, Genuine, HardCore, Light, Party, ShopHost, Worker };

const char* community_type_name(CommunityType t);
const char* community_role_name(CommunityRole r);
const char* play_style_name(PlayStyle s);
std::optional<CommunityType> parse_community_type(const std::string& token);

CommunityRole role_for(CommunityType type);

/// Structural decision rules, applied per community in priority order.
/// All values can be overridden from the [tagging] config section.
struct TaggingThresholds {
  double giant_min_share = 0.05;          // of all trading nodes
  double giant_alpha_min = 2.0;
  double giant_alpha_max = 3.5;
  std::size_t powerlaw_min_tail = 50;
  double chain_max_mean_degree = 2.5;
  double chain_min_diameter_ratio = 1.0 / 3.0;  // diameter >= ratio * size
  double chain_min_assortativity = 0.2;
  int large_star_min_size = 50;
  double large_star_max_assortativity = -0.7;
  double large_star_min_std_over_mean = 3.0;
  double small_star_max_assortativity = -0.5;
};

struct CommunityProfile {
  int community_id = 0;
  CommunityFeatures features;
  std::array<double, 7> style_fractions{};  // indexed by PlayStyle
  std::size_t styled_members = 0;
  int cluster_id = -1;
  CommunityType type = CommunityType::Outcast;
  CommunityRole role = CommunityRole::Filtered;
  std::optional<PowerLawFit> degree_fit;
  bool ambiguous = false;  // fell through every positive rule
};

/// Name the user clusters. Priority order: Fisher (max fishing z), Shop
/// host (max shopping z), Party (max party z), Worker (max money-obtained
/// z among clusters whose spend z does not exceed it), Hard core (max
/// overall activity), Light (min overall activity); every leftover cluster
/// is Genuine. Each named style is assigned at most once.
std::map<int, PlayStyle> label_play_styles(const Matrix& standardized_centroids);

/// Assign a type and role to every profile. `members` are node indexes per
/// community (aligned with profiles), used for the giant's power-law test.
void classify_communities(std::vector<CommunityProfile>& profiles, const TradeNetwork& net,
                          const std::vector<std::vector<int>>& members, int total_nodes,
                          const TaggingThresholds& thresholds);

struct BanRateRow {
  CommunityType type = CommunityType::Outcast;
  std::size_t members = 0;
  std::size_t banned = 0;
  double rate = 0.0;
  bool data_missing = false;  // no ban flags were present at all
};

/// Fraction of members with banned=true per community type. Members with
/// no play record are counted as not banned; when no ban flag exists in
/// the whole input the rows carry a data-missing warning.
std::vector<BanRateRow> ban_rate_report(const std::vector<CommunityProfile>& profiles,
                                        const std::vector<std::vector<int>>& members,
                                        const TradeNetwork& net,
                                        const std::unordered_map<std::string, bool>& banned);

}  // namespace rmt

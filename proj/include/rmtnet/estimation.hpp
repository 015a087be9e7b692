#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmtnet/community.hpp"
#include "rmtnet/ingest.hpp"
#include "rmtnet/tagging.hpp"

namespace rmt {

enum class TradeCategory : std::uint8_t { Intra, Inter, InterRmt };

const char* trade_category_name(TradeCategory c);

/// Events of one week with their categories. For InterRMT events the
/// provider-side endpoint is recorded for seller attribution.
struct CategorizedWeek {
  int week_index = 0;
  std::vector<TradeEvent> events;
  std::vector<TradeCategory> categories;
  std::vector<int> provider_node;       // net node index, -1 unless InterRMT
  std::vector<int> provider_community;  // community id, -1 unless InterRMT
};

/// Same community -> Intra; different -> Inter; Inter with one Provider
/// and one Consumer endpoint (either direction) -> InterRMT. Events whose
/// endpoints are missing from the network are skipped (cannot happen for
/// events the network was built from).
CategorizedWeek categorize_trades(const WeeklyBatch& batch, const TradeNetwork& net,
                                  const CommunityPartition& partition,
                                  std::span<const CommunityRole> role_of_community);

struct InterCommunityNetwork {
  struct Edge {
    int c1 = 0;
    int c2 = 0;
    double trade_count = 0.0;
    double money = 0.0;
    bool rmt = false;
  };
  std::vector<CommunityType> types;  // by community id
  std::vector<CommunityRole> roles;
  std::vector<Edge> edges;  // cross-community only, sorted by (c1, c2)
};

InterCommunityNetwork build_inter_community_network(const CategorizedWeek& week,
                                                    const TradeNetwork& net,
                                                    const CommunityPartition& partition,
                                                    const std::vector<CommunityProfile>& profiles);

/// Gap-free weekly count/money series per category, weeks [0, weeks).
struct WeeklySeries {
  std::vector<double> intra_count, inter_count, inter_rmt_count;
  std::vector<double> intra_money, inter_money, inter_rmt_money;
  std::vector<double> total_count;
};

WeeklySeries weekly_series(std::span<const CategorizedWeek> weeks, int week_count);

/// Market records bucketed into the same weekly windows as the trades.
/// Records outside [epoch, epoch + weeks) are dropped.
std::vector<double> weekly_market_counts(std::span<const MarketRecord> records,
                                         std::int64_t epoch, int week_count);

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided, t distribution with n-2 df
  std::size_t n = 0;
};

/// Throws LengthMismatch (incl. n < 3) and ZeroVariance.
CorrelationResult pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Permutation p-value for small n; permutes b with a seeded stream.
double pearson_permutation_pvalue(std::span<const double> a, std::span<const double> b,
                                  int iterations, std::uint64_t seed);

struct VolumeSummary {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double mean = 0.0, stddev = 0.0;
  std::size_t n = 0;
};

/// Type-7 linear-interpolation quantiles, population std. Throws NoData.
VolumeSummary volume_summary(std::vector<double> values);

struct MedianNormalization {
  double scale = 1.0;  // median(estimated) / median(website)
  std::vector<double> scaled_website;
};

/// Rescale website volumes so their median equals the estimate's median.
MedianNormalization median_normalize(std::span<const double> website_volumes,
                                     std::span<const double> estimated_volumes);

struct SellerSales {
  std::string node_id;
  double total_cash = 0.0;
  int active_weeks = 0;
};

struct MarketSizeEstimate {
  std::vector<double> weekly_mean_price;  // carry-forward over gap weeks
  std::vector<double> weekly_cash;
  double total_cash = 0.0;
  std::vector<SellerSales> sellers;      // sorted by total desc, id asc
  double mean_weekly_seller_sales = 0.0; // mean over (seller, active week) cells
};

/// Weekly cash = InterRMT money volume x that week's mean unit price.
/// Throws NoPriceData when no market record exists.
MarketSizeEstimate market_size_estimate(std::span<const CategorizedWeek> weeks, int week_count,
                                        std::span<const MarketRecord> records,
                                        std::int64_t epoch,
                                        const std::vector<const TradeNetwork*>& nets);

struct ConcentrationWeek {
  int week_index = 0;
  int provider_count = 0;  // provider communities with InterRMT volume
  double hhi = 0.0;        // sum of squared provider volume shares
  std::vector<double> provider_volumes;  // descending
};

std::vector<ConcentrationWeek> temporal_concentration(std::span<const CategorizedWeek> weeks,
                                                      int week_count);

/// Phase-5 roll-up that goes into the final report.
struct RmtEstimate {
  WeeklySeries series;
  std::optional<VolumeSummary> intra_volume;
  std::optional<VolumeSummary> inter_volume;
  std::optional<VolumeSummary> inter_rmt_volume;
  std::optional<VolumeSummary> website_volume;
  std::optional<MedianNormalization> normalization;
  std::map<std::string, CorrelationResult> market_correlations;  // per category
  std::map<std::string, double> permutation_pvalues;             // optional
  std::optional<MarketSizeEstimate> market_size;
  std::vector<ConcentrationWeek> concentration;
};

}  // namespace rmt

#include "rmtnet/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rmtnet/error.hpp"
#include "rmtnet/rng.hpp"

namespace rmt {

const char* trade_category_name(TradeCategory c) {
  switch (c) {
    case TradeCategory::Intra: return "Intra";
    case TradeCategory::Inter: return "Inter";
    case TradeCategory::InterRmt: return "InterRMT";
  }
  return "Intra";
}

CategorizedWeek categorize_trades(const WeeklyBatch& batch, const TradeNetwork& net,
                                  const CommunityPartition& partition,
                                  std::span<const CommunityRole> role_of_community) {
  CategorizedWeek out;
  out.week_index = batch.week_index;
  out.events.reserve(batch.events.size());
  for (const TradeEvent& ev : batch.events) {
    const int s = net.index_of(ev.source_id);
    const int t = net.index_of(ev.target_id);
    if (s < 0 || t < 0 || s == t) continue;  // not embedded in this network
    const int cs = partition.assignment[static_cast<std::size_t>(s)];
    const int ct = partition.assignment[static_cast<std::size_t>(t)];
    TradeCategory cat = TradeCategory::Intra;
    int provider_node = -1;
    int provider_comm = -1;
    if (cs != ct) {
      cat = TradeCategory::Inter;
      const CommunityRole rs = role_of_community[static_cast<std::size_t>(cs)];
      const CommunityRole rt = role_of_community[static_cast<std::size_t>(ct)];
      if (rs == CommunityRole::Provider && rt == CommunityRole::Consumer) {
        cat = TradeCategory::InterRmt;
        provider_node = s;
        provider_comm = cs;
      } else if (rs == CommunityRole::Consumer && rt == CommunityRole::Provider) {
        cat = TradeCategory::InterRmt;
        provider_node = t;
        provider_comm = ct;
      }
    }
    out.events.push_back(ev);
    out.categories.push_back(cat);
    out.provider_node.push_back(provider_node);
    out.provider_community.push_back(provider_comm);
  }
  return out;
}

InterCommunityNetwork build_inter_community_network(const CategorizedWeek& week,
                                                    const TradeNetwork& net,
                                                    const CommunityPartition& partition,
                                                    const std::vector<CommunityProfile>& profiles) {
  InterCommunityNetwork icn;
  icn.types.resize(static_cast<std::size_t>(partition.community_count), CommunityType::Outcast);
  icn.roles.resize(static_cast<std::size_t>(partition.community_count), CommunityRole::Filtered);
  for (const CommunityProfile& p : profiles) {
    icn.types[static_cast<std::size_t>(p.community_id)] = p.type;
    icn.roles[static_cast<std::size_t>(p.community_id)] = p.role;
  }
  std::map<std::pair<int, int>, std::pair<double, double>> agg;  // (count, money)
  for (std::size_t i = 0; i < week.events.size(); ++i) {
    if (week.categories[i] == TradeCategory::Intra) continue;
    const TradeEvent& ev = week.events[i];
    const int cs = partition.assignment[static_cast<std::size_t>(net.index_of(ev.source_id))];
    const int ct = partition.assignment[static_cast<std::size_t>(net.index_of(ev.target_id))];
    auto& cell = agg[{cs, ct}];
    cell.first += 1.0;
    cell.second += static_cast<double>(ev.money_value);
  }
  for (const auto& [key, val] : agg) {
    InterCommunityNetwork::Edge e;
    e.c1 = key.first;
    e.c2 = key.second;
    e.trade_count = val.first;
    e.money = val.second;
    const CommunityRole r1 = icn.roles[static_cast<std::size_t>(e.c1)];
    const CommunityRole r2 = icn.roles[static_cast<std::size_t>(e.c2)];
    e.rmt = (r1 == CommunityRole::Provider && r2 == CommunityRole::Consumer) ||
            (r1 == CommunityRole::Consumer && r2 == CommunityRole::Provider);
    icn.edges.push_back(e);
  }
  return icn;
}

WeeklySeries weekly_series(std::span<const CategorizedWeek> weeks, int week_count) {
  WeeklySeries s;
  const auto n = static_cast<std::size_t>(week_count);
  s.intra_count.assign(n, 0.0);
  s.inter_count.assign(n, 0.0);
  s.inter_rmt_count.assign(n, 0.0);
  s.intra_money.assign(n, 0.0);
  s.inter_money.assign(n, 0.0);
  s.inter_rmt_money.assign(n, 0.0);
  s.total_count.assign(n, 0.0);
  for (const CategorizedWeek& w : weeks) {
    if (w.week_index < 0 || w.week_index >= week_count) continue;
    const auto i = static_cast<std::size_t>(w.week_index);
    for (std::size_t e = 0; e < w.events.size(); ++e) {
      const double money = static_cast<double>(w.events[e].money_value);
      s.total_count[i] += 1.0;
      switch (w.categories[e]) {
        case TradeCategory::Intra:
          s.intra_count[i] += 1.0;
          s.intra_money[i] += money;
          break;
        case TradeCategory::InterRmt:
          s.inter_rmt_count[i] += 1.0;
          s.inter_rmt_money[i] += money;
          [[fallthrough]];  // InterRMT is a subset of Inter
        case TradeCategory::Inter:
          s.inter_count[i] += 1.0;
          s.inter_money[i] += money;
          break;
      }
    }
  }
  return s;
}

std::vector<double> weekly_market_counts(std::span<const MarketRecord> records,
                                         std::int64_t epoch, int week_count) {
  std::vector<double> counts(static_cast<std::size_t>(week_count), 0.0);
  for (const MarketRecord& rec : records) {
    const std::int64_t w = (rec.completion_time - epoch) / kWeekSeconds;
    if (rec.completion_time >= epoch && w < week_count) {
      counts[static_cast<std::size_t>(w)] += 1.0;
    }
  }
  return counts;
}

namespace {

// regularized incomplete beta via Lentz's continued fraction
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double plain_rho(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double va = 0.0, vb = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
    cov += (a[i] - ma) * (b[i] - mb);
  }
  if (va <= 0.0 || vb <= 0.0) throw Error(Errc::ZeroVariance, "constant series");
  return cov / std::sqrt(va * vb);
}

}  // namespace

CorrelationResult pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.size() < 3) throw Error(Errc::LengthMismatch, "need at least 3 points");
  CorrelationResult out;
  out.n = a.size();
  out.rho = std::clamp(plain_rho(a, b), -1.0, 1.0);
  const double df = static_cast<double>(out.n - 2);
  const double denom = 1.0 - out.rho * out.rho;
  if (denom <= 0.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.rho * std::sqrt(df / denom);
    out.p_value = student_t_two_sided_p(t, df);
  }
  return out;
}

double pearson_permutation_pvalue(std::span<const double> a, std::span<const double> b,
                                  int iterations, std::uint64_t seed) {
  if (a.size() != b.size() || a.size() < 3) {
    throw Error(Errc::LengthMismatch, "permutation test needs equal series, n >= 3");
  }
  const double observed = std::abs(plain_rho(a, b));
  Rng rng = Rng::seeded(seed);
  std::vector<double> shuffled(b.begin(), b.end());
  int at_least = 0;
  for (int i = 0; i < iterations; ++i) {
    rng.shuffle(shuffled);
    double rho = 0.0;
    try {
      rho = plain_rho(a, shuffled);
    } catch (const Error&) {
      rho = 0.0;
    }
    if (std::abs(rho) >= observed - 1e-15) ++at_least;
  }
  return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(iterations) + 1.0);
}

namespace {

double quantile_type7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = (static_cast<double>(n) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

VolumeSummary volume_summary(std::vector<double> values) {
  if (values.empty()) throw Error(Errc::NoData, "no volumes");
  std::sort(values.begin(), values.end());
  VolumeSummary s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_type7(values, 0.25);
  s.median = quantile_type7(values, 0.5);
  s.q3 = quantile_type7(values, 0.75);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

MedianNormalization median_normalize(std::span<const double> website_volumes,
                                     std::span<const double> estimated_volumes) {
  if (website_volumes.empty() || estimated_volumes.empty()) {
    throw Error(Errc::NoData, "median normalization needs both distributions");
  }
  std::vector<double> web(website_volumes.begin(), website_volumes.end());
  std::vector<double> est(estimated_volumes.begin(), estimated_volumes.end());
  std::sort(web.begin(), web.end());
  std::sort(est.begin(), est.end());
  const double med_web = quantile_type7(web, 0.5);
  const double med_est = quantile_type7(est, 0.5);
  if (med_web <= 0.0) throw Error(Errc::ZeroVariance, "website median is not positive");

  MedianNormalization out;
  out.scale = med_est / med_web;
  out.scaled_website.reserve(website_volumes.size());
  // dividing by med_web first makes the scaled median exactly med_est
  // (x / x == 1 in IEEE arithmetic) for odd-length inputs
  for (double v : website_volumes) {
    out.scaled_website.push_back(v / med_web * med_est);
  }
  return out;
}

MarketSizeEstimate market_size_estimate(std::span<const CategorizedWeek> weeks, int week_count,
                                        std::span<const MarketRecord> records,
                                        std::int64_t epoch,
                                        const std::vector<const TradeNetwork*>& nets) {
  if (records.empty()) throw Error(Errc::NoPriceData, "no market records");

  MarketSizeEstimate out;
  const auto n = static_cast<std::size_t>(week_count);
  std::vector<double> price_sum(n, 0.0);
  std::vector<double> price_cnt(n, 0.0);
  for (const MarketRecord& rec : records) {
    if (rec.completion_time < epoch) continue;
    const std::int64_t w = (rec.completion_time - epoch) / kWeekSeconds;
    if (w >= week_count) continue;
    price_sum[static_cast<std::size_t>(w)] += rec.unit_price;
    price_cnt[static_cast<std::size_t>(w)] += 1.0;
  }
  out.weekly_mean_price.assign(n, 0.0);
  double last_price = 0.0;
  bool have_price = false;
  for (std::size_t w = 0; w < n; ++w) {
    if (price_cnt[w] > 0.0) {
      last_price = price_sum[w] / price_cnt[w];
      have_price = true;
    }
    out.weekly_mean_price[w] = last_price;  // carry-forward over gaps
  }
  if (!have_price) throw Error(Errc::NoPriceData, "no market record inside the window");
  // leading gap weeks inherit the first known price
  double first_price = 0.0;
  for (std::size_t w = 0; w < n; ++w) {
    if (price_cnt[w] > 0.0) {
      first_price = out.weekly_mean_price[w];
      break;
    }
  }
  for (std::size_t w = 0; w < n && out.weekly_mean_price[w] == 0.0; ++w) {
    out.weekly_mean_price[w] = first_price;
  }

  out.weekly_cash.assign(n, 0.0);
  std::map<std::string, std::pair<double, std::map<int, double>>> sellers;  // total, per-week
  for (const CategorizedWeek& week : weeks) {
    if (week.week_index < 0 || week.week_index >= week_count) continue;
    const auto wi = static_cast<std::size_t>(week.week_index);
    const double price = out.weekly_mean_price[wi];
    const TradeNetwork* net = nets[wi];
    for (std::size_t e = 0; e < week.events.size(); ++e) {
      if (week.categories[e] != TradeCategory::InterRmt) continue;
      const double cash = static_cast<double>(week.events[e].money_value) * price;
      out.weekly_cash[wi] += cash;
      const int node = week.provider_node[e];
      if (net != nullptr && node >= 0) {
        auto& cell = sellers[net->node_id(node)];
        cell.first += cash;
        cell.second[week.week_index] += cash;
      }
    }
    out.total_cash += out.weekly_cash[wi];
  }

  double cells = 0.0;
  double cell_sum = 0.0;
  for (const auto& [id, cell] : sellers) {
    SellerSales s;
    s.node_id = id;
    s.total_cash = cell.first;
    s.active_weeks = static_cast<int>(cell.second.size());
    cells += static_cast<double>(s.active_weeks);
    cell_sum += s.total_cash;
    out.sellers.push_back(std::move(s));
  }
  std::sort(out.sellers.begin(), out.sellers.end(), [](const SellerSales& a, const SellerSales& b) {
    if (a.total_cash != b.total_cash) return a.total_cash > b.total_cash;
    return a.node_id < b.node_id;
  });
  out.mean_weekly_seller_sales = cells > 0.0 ? cell_sum / cells : 0.0;
  return out;
}

std::vector<ConcentrationWeek> temporal_concentration(std::span<const CategorizedWeek> weeks,
                                                      int week_count) {
  std::vector<ConcentrationWeek> out(static_cast<std::size_t>(week_count));
  for (int w = 0; w < week_count; ++w) out[static_cast<std::size_t>(w)].week_index = w;
  for (const CategorizedWeek& week : weeks) {
    if (week.week_index < 0 || week.week_index >= week_count) continue;
    ConcentrationWeek& cw = out[static_cast<std::size_t>(week.week_index)];
    std::map<int, double> by_provider;
    for (std::size_t e = 0; e < week.events.size(); ++e) {
      if (week.categories[e] != TradeCategory::InterRmt) continue;
      by_provider[week.provider_community[e]] +=
          static_cast<double>(week.events[e].money_value);
    }
    double total = 0.0;
    for (const auto& [c, v] : by_provider) total += v;
    cw.provider_count = static_cast<int>(by_provider.size());
    if (total > 0.0) {
      for (const auto& [c, v] : by_provider) {
        const double share = v / total;
        cw.hhi += share * share;
        cw.provider_volumes.push_back(v);
      }
      std::sort(cw.provider_volumes.rbegin(), cw.provider_volumes.rend());
    }
  }
  return out;
}

}  // namespace rmt

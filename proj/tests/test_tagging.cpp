#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rmtnet/error.hpp"
#include "rmtnet/features.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/powerlaw.hpp"
#include "rmtnet/tagging.hpp"

using namespace rmt;

namespace {

TradeNetwork make_net(int n, const std::vector<std::pair<int, int>>& edges) {
  TradeNetwork net;
  for (int v = 0; v < n; ++v) net.add_node("n" + std::to_string(v));
  for (const auto& [s, t] : edges) net.add_trade(s, t, 1.0, 0.0);
  net.finalize();
  return net;
}

std::vector<int> all_nodes(const TradeNetwork& net) {
  std::vector<int> out(static_cast<std::size_t>(net.node_count()));
  for (int v = 0; v < net.node_count(); ++v) out[static_cast<std::size_t>(v)] = v;
  return out;
}

CommunityProfile profile_for(const TradeNetwork& net, int id = 0) {
  CommunityProfile p;
  p.community_id = id;
  p.features = community_feature_vector(net, all_nodes(net));
  return p;
}

}  // namespace

TEST_CASE("power-law fit recovers the exponent from sampled tails") {
  SUBCASE("x_min one, the wide reference band") {
    Rng rng = Rng::seeded(2);
    const std::vector<int> samples = sample_power_law(2.75, 1, 10000, rng);
    const PowerLawFit fit = fit_power_law(samples);
    CHECK(fit.alpha == doctest::Approx(2.7256).epsilon(1e-3));  // frozen from this sampler
    CHECK(fit.alpha >= 2.65);
    CHECK(fit.alpha <= 2.85);
    CHECK(fit.x_min >= 1.0);
    CHECK(fit.n_tail >= 50);
  }
  SUBCASE("x_min five concentrates the estimate") {
    for (std::uint64_t seed : {2ULL, 3ULL, 4ULL}) {
      Rng rng = Rng::seeded(seed);
      const std::vector<int> samples = sample_power_law(2.75, 5, 10000, rng);
      const PowerLawFit fit = fit_power_law(samples);
      CHECK(std::abs(fit.alpha - 2.75) <= 0.1);
    }
  }
}

TEST_CASE("power-law fit error cases") {
  SUBCASE("degenerate samples") {
    std::vector<double> same(200, 4.0);
    CHECK_THROWS_AS(fit_power_law(same), Error);
  }
  SUBCASE("too few samples") {
    std::vector<double> few = {1, 2, 3, 4, 5};
    CHECK_THROWS_AS(fit_power_law(few), Error);
  }
  SUBCASE("non-positive samples rejected") {
    std::vector<double> bad(100, 2.0);
    bad[3] = 0.0;
    CHECK_THROWS_AS(fit_power_law(bad), Error);
  }
}

TEST_CASE("play style labelling") {
  // centroids in standardized space, 16 columns
  auto centroid_matrix = [](const std::vector<std::array<double, 16>>& rows) {
    Matrix m(rows.size(), 16);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < 16; ++c) m.at(r, c) = rows[r][c];
    }
    return m;
  };

  SUBCASE("dominant fishing z wins Fisher") {
    std::array<double, 16> fisher{};
    fisher[14] = 3.0;
    std::array<double, 16> flat{};
    const auto styles = label_play_styles(centroid_matrix({fisher, flat}));
    CHECK(styles.at(0) == PlayStyle::Fisher);
  }
  SUBCASE("all-zero centroid is Light") {
    std::array<double, 16> zero{};
    const auto styles = label_play_styles(centroid_matrix({zero}));
    CHECK(styles.at(0) == PlayStyle::Light);
  }
  SUBCASE("ties break by priority order") {
    // one cluster leads on both fishing and shopping; Fisher has priority,
    // Shop host falls to the runner-up
    std::array<double, 16> both{};
    both[14] = 2.0;
    both[15] = 2.0;
    std::array<double, 16> shopish{};
    shopish[15] = 1.0;
    const auto styles = label_play_styles(centroid_matrix({both, shopish}));
    CHECK(styles.at(0) == PlayStyle::Fisher);
    CHECK(styles.at(1) == PlayStyle::ShopHost);
  }
  SUBCASE("full seven-cluster assignment") {
    std::vector<std::array<double, 16>> rows(7);
    rows[0][14] = 3.0;              // fisher
    rows[1][15] = 3.0;              // shop host
    rows[2][7] = 3.0;               // party
    rows[3][12] = 3.0;              // worker, spends little
    rows[3][13] = -1.0;
    for (auto& v : rows[4]) v = 2.0;   // hardcore
    for (auto& v : rows[5]) v = -1.5;  // light
    // rows[6] stays flat -> genuine
    const auto styles = label_play_styles(centroid_matrix(rows));
    CHECK(styles.at(0) == PlayStyle::Fisher);
    CHECK(styles.at(1) == PlayStyle::ShopHost);
    CHECK(styles.at(2) == PlayStyle::Party);
    CHECK(styles.at(3) == PlayStyle::Worker);
    CHECK(styles.at(4) == PlayStyle::HardCore);
    CHECK(styles.at(5) == PlayStyle::Light);
    CHECK(styles.at(6) == PlayStyle::Genuine);
  }
}

TEST_CASE("community classification rules") {
  TaggingThresholds th;

  SUBCASE("hub-dominated community of 120 is a large star") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < 120; ++i) edges.emplace_back(i, 0);
    const auto net = make_net(120, edges);
    std::vector<CommunityProfile> profiles = {profile_for(net)};
    CHECK(profiles[0].features.assortativity <= -0.9);
    CHECK(profiles[0].features.degree_std >= 3.0 * profiles[0].features.degree_mean);
    classify_communities(profiles, net, {all_nodes(net)}, 24000, th);
    CHECK(profiles[0].type == CommunityType::LargeStar);
    CHECK(profiles[0].role == CommunityRole::Provider);
  }

  SUBCASE("long assortative ring with chords is a chain") {
    std::vector<std::pair<int, int>> edges;
    const int len = 40;
    for (int i = 0; i < len; ++i) edges.emplace_back(i, (i + 1) % len);
    for (int c = 0; c < len / 5; ++c) edges.emplace_back(c, c + 2);
    const auto net = make_net(len, edges);
    std::vector<CommunityProfile> profiles = {profile_for(net)};
    CHECK(profiles[0].features.assortativity >= 0.2);
    CHECK(profiles[0].features.degree_mean <= 2.5);
    CHECK(profiles[0].features.diameter >= len / 3.0);
    classify_communities(profiles, net, {all_nodes(net)}, 800, th);
    CHECK(profiles[0].type == CommunityType::Chain);
    CHECK(profiles[0].role == CommunityRole::Provider);
  }

  SUBCASE("small disassortative community is a small star") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < 20; ++i) edges.emplace_back(i, 0);
    const auto net = make_net(20, edges);
    std::vector<CommunityProfile> profiles = {profile_for(net)};
    classify_communities(profiles, net, {all_nodes(net)}, 800, th);
    CHECK(profiles[0].type == CommunityType::SmallStar);
    CHECK(profiles[0].role == CommunityRole::Provider);
  }

  SUBCASE("scale-free community above the size share is the giant consumer") {
    // realize a power-law degree sequence as a hub tree with extra links
    Rng rng = Rng::seeded(12);
    const std::vector<int> degrees = sample_power_law(2.4, 1, 600, rng);
    std::vector<std::pair<int, int>> edges;
    std::vector<int> stubs;
    for (int v = 1; v < 600; ++v) {
      const int parent = stubs.empty() ? 0 : stubs[rng.below(stubs.size())];
      edges.emplace_back(v, parent);
      for (int d = 0; d < degrees[static_cast<std::size_t>(v)]; ++d) stubs.push_back(v);
      stubs.push_back(parent);
    }
    const auto net = make_net(600, edges);
    std::vector<CommunityProfile> profiles = {profile_for(net)};
    classify_communities(profiles, net, {all_nodes(net)}, 3000, th);
    CHECK(profiles[0].type == CommunityType::GiantConsumer);
    CHECK(profiles[0].role == CommunityRole::Consumer);
    REQUIRE(profiles[0].degree_fit.has_value());
    CHECK(profiles[0].degree_fit->alpha >= th.giant_alpha_min);
    CHECK(profiles[0].degree_fit->alpha <= th.giant_alpha_max);
  }

  SUBCASE("pair community falls through to outcast") {
    const auto net = make_net(2, {{0, 1}});
    std::vector<CommunityProfile> profiles = {profile_for(net)};
    classify_communities(profiles, net, {all_nodes(net)}, 800, th);
    CHECK(profiles[0].type == CommunityType::Outcast);
    CHECK(profiles[0].role == CommunityRole::Filtered);
  }

  SUBCASE("classification is invariant to node relabeling") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < 30; ++i) edges.emplace_back(i, 0);
    const auto net = make_net(30, edges);
    // same star with nodes named in reverse
    TradeNetwork reversed;
    for (int v = 0; v < 30; ++v) reversed.add_node("m" + std::to_string(29 - v));
    for (int i = 1; i < 30; ++i) reversed.add_trade(i, 0, 1.0, 0.0);
    reversed.finalize();

    std::vector<CommunityProfile> a = {profile_for(net)};
    std::vector<CommunityProfile> b = {profile_for(reversed)};
    classify_communities(a, net, {all_nodes(net)}, 500, th);
    classify_communities(b, reversed, {all_nodes(reversed)}, 500, th);
    CHECK(a[0].type == b[0].type);
  }
}

TEST_CASE("role mapping is fixed by type") {
  CHECK(role_for(CommunityType::LargeStar) == CommunityRole::Provider);
  CHECK(role_for(CommunityType::SmallStar) == CommunityRole::Provider);
  CHECK(role_for(CommunityType::Chain) == CommunityRole::Provider);
  CHECK(role_for(CommunityType::GiantConsumer) == CommunityRole::Consumer);
  CHECK(role_for(CommunityType::Outcast) == CommunityRole::Filtered);
}

TEST_CASE("ban rate report") {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < 6; ++i) edges.emplace_back(i, 0);
  const auto net = make_net(6, edges);
  std::vector<CommunityProfile> profiles = {profile_for(net)};
  profiles[0].type = CommunityType::SmallStar;
  profiles[0].role = CommunityRole::Provider;
  const std::vector<std::vector<int>> members = {all_nodes(net)};

  SUBCASE("all banned in one type") {
    std::unordered_map<std::string, bool> banned;
    for (int v = 0; v < 6; ++v) banned["n" + std::to_string(v)] = true;
    const auto rows = ban_rate_report(profiles, members, net, banned);
    for (const auto& row : rows) {
      if (row.type == CommunityType::SmallStar) {
        CHECK(row.rate == doctest::Approx(1.0));
        CHECK(row.members == 6);
        CHECK_FALSE(row.data_missing);
      }
    }
  }
  SUBCASE("no flags at all produce zero rates with a warning") {
    const auto rows = ban_rate_report(profiles, members, net, {});
    for (const auto& row : rows) {
      CHECK(row.rate == 0.0);
      CHECK(row.data_missing);
    }
  }
}

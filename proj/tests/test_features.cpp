#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "rmtnet/error.hpp"
#include "rmtnet/features.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/rng.hpp"

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

}  // namespace

TEST_CASE("community features of named shapes") {
  SUBCASE("induced ten-node star") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < 10; ++i) edges.emplace_back(0, i);
    const auto net = make_net(10, edges);
    const CommunityFeatures f = community_feature_vector(net, all_nodes(net));
    CHECK(f.size == 10);
    CHECK(f.assortativity == doctest::Approx(-1.0));
    CHECK(f.assortativity_defined);
    CHECK(f.diameter == doctest::Approx(2.0));
    CHECK(f.clustering == doctest::Approx(0.0));
  }
  SUBCASE("induced twenty-cycle") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 20; ++i) edges.emplace_back(i, (i + 1) % 20);
    const auto net = make_net(20, edges);
    const CommunityFeatures f = community_feature_vector(net, all_nodes(net));
    CHECK(f.diameter == doctest::Approx(10.0));
    CHECK(f.degree_std == doctest::Approx(0.0));
    CHECK_FALSE(f.assortativity_defined);
    CHECK(f.assortativity == 0.0);  // undefined encodes as zero
  }
  SUBCASE("induced triangle") {
    const auto net = make_net(3, {{0, 1}, {1, 2}, {2, 0}});
    const CommunityFeatures f = community_feature_vector(net, all_nodes(net));
    CHECK(f.size == 3);
    CHECK(f.clustering == doctest::Approx(1.0));
  }
}

TEST_CASE("whole-graph community reproduces the network summary") {
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {4, 0}};
  const auto net = make_net(5, edges);
  const CommunityFeatures f = community_feature_vector(net, all_nodes(net));
  const NetworkSummary s = summarize(net);
  CHECK(f.size == s.node_count);
  CHECK(f.degree_mean == doctest::Approx(s.degree_mean));
  CHECK(f.degree_std == doctest::Approx(s.degree_std));
  CHECK(f.betweenness_mean == doctest::Approx(s.betweenness_mean));
  CHECK(f.betweenness_std == doctest::Approx(s.betweenness_std));
  CHECK(f.clustering == doctest::Approx(s.clustering_coefficient));
}

TEST_CASE("user feature vectors") {
  PlayActivityRecord a;
  a.user_id = "u";
  a.f[0] = 100;
  a.f[15] = 3;
  SUBCASE("single record is the identity") {
    const UserFeatures f = user_feature_vector(std::vector<PlayActivityRecord>{a});
    CHECK(f.f[0] == 100);
    CHECK(f.f[15] == 3);
  }
  SUBCASE("two records sum element-wise") {
    PlayActivityRecord b = a;
    b.week_index = 1;
    b.f[0] = 50;
    b.banned = true;
    const UserFeatures f = user_feature_vector(std::vector<PlayActivityRecord>{a, b});
    CHECK(f.f[0] == 150);
    CHECK(f.f[15] == 6);
    CHECK(f.banned);
  }
  SUBCASE("no records is an error") {
    CHECK_THROWS_AS(user_feature_vector({}), Error);
  }
  SUBCASE("mixed users rejected") {
    PlayActivityRecord b = a;
    b.user_id = "other";
    CHECK_THROWS_AS(user_feature_vector(std::vector<PlayActivityRecord>{a, b}), Error);
  }
}

TEST_CASE("zscore standardization") {
  SUBCASE("simple column") {
    Matrix m(3, 1);
    m.at(0, 0) = 1;
    m.at(1, 0) = 2;
    m.at(2, 0) = 3;
    const Matrix z = zscore_standardize(m);
    CHECK(z.at(0, 0) == doctest::Approx(-1.224744871));
    CHECK(z.at(1, 0) == doctest::Approx(0.0));
    CHECK(z.at(2, 0) == doctest::Approx(1.224744871));
  }
  SUBCASE("constant column maps to zeros") {
    Matrix m(3, 1);
    for (int r = 0; r < 3; ++r) m.at(static_cast<std::size_t>(r), 0) = 7;
    const Matrix z = zscore_standardize(m);
    for (int r = 0; r < 3; ++r) CHECK(z.at(static_cast<std::size_t>(r), 0) == 0.0);
  }
  SUBCASE("single row maps to zeros") {
    Matrix m(1, 3);
    m.at(0, 0) = 5;
    m.at(0, 2) = -2;
    const Matrix z = zscore_standardize(m);
    for (int c = 0; c < 3; ++c) CHECK(z.at(0, static_cast<std::size_t>(c)) == 0.0);
  }
  SUBCASE("standardized columns have zero mean and unit or zero std") {
    Rng rng = Rng::seeded(44);
    Matrix m(40, 4);
    for (std::size_t r = 0; r < 40; ++r) {
      for (std::size_t c = 0; c < 4; ++c) m.at(r, c) = rng.uniform(-5, 5) * (c + 1);
    }
    const Matrix z = zscore_standardize(m);
    for (std::size_t c = 0; c < 4; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < 40; ++r) mean += z.at(r, c);
      mean /= 40.0;
      for (std::size_t r = 0; r < 40; ++r) var += (z.at(r, c) - mean) * (z.at(r, c) - mean);
      var /= 40.0;
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("kmeans basics") {
  SUBCASE("well separated 1-D points") {
    Matrix m(4, 1);
    m.at(0, 0) = 0.0;
    m.at(1, 0) = 0.1;
    m.at(2, 0) = 10.0;
    m.at(3, 0) = 10.1;
    const ClusteringResult r = kmeans(m, 2, 1);
    CHECK(r.assignments[0] == r.assignments[1]);
    CHECK(r.assignments[2] == r.assignments[3]);
    CHECK(r.assignments[0] != r.assignments[2]);
    CHECK(r.inertia == doctest::Approx(0.01));
  }
  SUBCASE("k equal to one gives the column means") {
    Matrix m(3, 2);
    m.at(0, 0) = 1;
    m.at(1, 0) = 2;
    m.at(2, 0) = 3;
    m.at(0, 1) = 4;
    m.at(1, 1) = 6;
    m.at(2, 1) = 8;
    const ClusteringResult r = kmeans(m, 1, 1);
    CHECK(r.centroids.at(0, 0) == doctest::Approx(2.0));
    CHECK(r.centroids.at(0, 1) == doctest::Approx(6.0));
    // inertia = n * total per-column variance
    CHECK(r.inertia == doctest::Approx(3.0 * (2.0 / 3.0 + 8.0 / 3.0)));
  }
  SUBCASE("k equal to n zeroes the inertia") {
    Matrix m(4, 1);
    for (int r = 0; r < 4; ++r) m.at(static_cast<std::size_t>(r), 0) = r * 2.0;
    const ClusteringResult r = kmeans(m, 4, 3);
    CHECK(r.inertia == doctest::Approx(0.0));
    std::set<int> distinct(r.assignments.begin(), r.assignments.end());
    CHECK(distinct.size() == 4);
  }
  SUBCASE("k too large throws") {
    Matrix m(3, 1);
    CHECK_THROWS_AS(kmeans(m, 5, 1), Error);
  }
  SUBCASE("identical rows leave repaired singleton clusters") {
    Matrix m(6, 1);
    for (int r = 0; r < 6; ++r) m.at(static_cast<std::size_t>(r), 0) = 1.0;
    const ClusteringResult r = kmeans(m, 3, 1);
    CHECK(r.assignments.size() == 6);
    CHECK(r.inertia == doctest::Approx(0.0));
  }
  SUBCASE("deterministic per seed") {
    Rng rng = Rng::seeded(5);
    Matrix m(30, 3);
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = rng.uniform(-1, 1);
    const ClusteringResult a = kmeans(m, 4, 123);
    const ClusteringResult b = kmeans(m, 4, 123);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
  }
}

TEST_CASE("kmeans result is a local optimum") {
  Rng rng = Rng::seeded(21);
  Matrix m(50, 2);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = rng.uniform(0, 10);
  const ClusteringResult r = kmeans(m, 4, 9);

  // no single point prefers another centroid
  for (std::size_t row = 0; row < m.rows; ++row) {
    double assigned = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      const double d = m.at(row, c) - r.centroids.at(static_cast<std::size_t>(
                                          r.assignments[row]), c);
      assigned += d * d;
    }
    for (int k = 0; k < r.k; ++k) {
      double other = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        const double d = m.at(row, c) - r.centroids.at(static_cast<std::size_t>(k), c);
        other += d * d;
      }
      CHECK(assigned <= other + 1e-9);
    }
  }
}

TEST_CASE("cluster_users separates constructed personas") {
  std::vector<UserFeatures> users;
  auto add_user = [&](const std::string& id, int hot_feature, double scale) {
    UserFeatures u;
    u.user_id = id;
    u.f[static_cast<std::size_t>(hot_feature)] = scale;
    users.push_back(u);
  };
  for (int i = 0; i < 10; ++i) add_user("fish" + std::to_string(i), 14, 5000 + i);
  for (int i = 0; i < 10; ++i) add_user("shop" + std::to_string(i), 15, 7000 + i);
  for (int i = 0; i < 10; ++i) add_user("zero" + std::to_string(i), 0, 0);

  const ClusteringResult r = cluster_users(users, 3, 7);
  // each block of ten must be pure
  for (int block = 0; block < 3; ++block) {
    std::set<int> labels;
    for (int i = 0; i < 10; ++i) {
      labels.insert(r.assignments[static_cast<std::size_t>(block * 10 + i)]);
    }
    CHECK(labels.size() == 1);
  }
  SUBCASE("seed change keeps the same grouping on separated data") {
    const ClusteringResult r2 = cluster_users(users, 3, 99);
    std::map<int, int> mapping;
    bool consistent = true;
    for (std::size_t i = 0; i < users.size(); ++i) {
      auto [it, inserted] = mapping.try_emplace(r.assignments[i], r2.assignments[i]);
      if (!inserted && it->second != r2.assignments[i]) consistent = false;
    }
    CHECK(consistent);
  }
}

TEST_CASE("cluster_communities rejects k above the community count") {
  std::vector<CommunityFeatures> feats(4);
  for (int i = 0; i < 4; ++i) feats[static_cast<std::size_t>(i)].size = i + 1;
  CHECK_THROWS_AS(cluster_communities(feats, 5, 1), Error);
}

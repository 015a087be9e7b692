#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "rmtnet/community.hpp"
#include "rmtnet/error.hpp"
#include "rmtnet/metrics.hpp"

using namespace rmt;

namespace {

TradeNetwork make_net(int n, const std::vector<std::pair<int, int>>& edges) {
  TradeNetwork net;
  for (int v = 0; v < n; ++v) net.add_node("n" + std::to_string(v));
  for (const auto& [s, t] : edges) net.add_trade(s, t, 1.0, 0.0);
  net.finalize();
  return net;
}

TradeNetwork two_triangles() {
  return make_net(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
}

/// Two planted blocks of 50 nodes, p_in = 0.3, p_out = 0.01.
TradeNetwork planted_two_block(Rng& rng, std::vector<int>& truth) {
  TradeNetwork net;
  truth.assign(100, 0);
  for (int v = 0; v < 100; ++v) {
    net.add_node("n" + std::to_string(v));
    truth[static_cast<std::size_t>(v)] = v < 50 ? 0 : 1;
  }
  for (int i = 0; i < 100; ++i) {
    for (int j = i + 1; j < 100; ++j) {
      const bool same = (i < 50) == (j < 50);
      if (rng.uniform() < (same ? 0.3 : 0.01)) {
        net.add_trade(i, j, 1.0, 0.0);
      }
    }
  }
  net.finalize();
  return net;
}

bool is_valid_partition(const CommunityPartition& p, int n) {
  if (static_cast<int>(p.assignment.size()) != n) return false;
  std::set<int> used(p.assignment.begin(), p.assignment.end());
  for (int c : used) {
    if (c < 0 || c >= p.community_count) return false;
  }
  return static_cast<int>(used.size()) == p.community_count;
}

}  // namespace

TEST_CASE("multilevel on two disjoint triangles") {
  const auto net = two_triangles();
  const CommunityPartition p = detect_multilevel(net, 1);
  CHECK(p.community_count == 2);
  CHECK(p.modularity == doctest::Approx(0.5));
  CHECK(p.assignment[0] == p.assignment[1]);
  CHECK(p.assignment[1] == p.assignment[2]);
  CHECK(p.assignment[3] == p.assignment[4]);
  CHECK(p.assignment[0] != p.assignment[3]);
  // renumbering: equal sizes, tie broken by smallest member id ("n0")
  CHECK(p.assignment[0] == 0);
}

TEST_CASE("multilevel keeps a single triangle together") {
  const auto net = make_net(3, {{0, 1}, {1, 2}, {2, 0}});
  const CommunityPartition p = detect_multilevel(net, 5);
  CHECK(p.community_count == 1);
  CHECK(p.modularity == doctest::Approx(0.0));
}

TEST_CASE("multilevel throws on edgeless graphs") {
  const auto net = make_net(4, {});
  CHECK_THROWS_AS(detect_multilevel(net, 1), Error);
  CHECK_THROWS_AS(detect_fastgreedy(net), Error);
}

TEST_CASE("planted two-block recovery") {
  Rng rng = Rng::seeded(2025);
  std::vector<int> truth;
  const auto net = planted_two_block(rng, truth);

  const CommunityPartition ml = detect_multilevel(net, 42);
  CHECK(normalized_mutual_information(ml.assignment, truth) >= 0.95);

  const CommunityPartition fg = detect_fastgreedy(net);
  CHECK(normalized_mutual_information(fg.assignment, truth) >= 0.95);
}

TEST_CASE("fastgreedy on two disjoint triangles") {
  const auto net = two_triangles();
  const CommunityPartition p = detect_fastgreedy(net);
  CHECK(p.community_count == 2);
  CHECK(p.modularity == doctest::Approx(0.5));
}

TEST_CASE("label propagation cases") {
  SUBCASE("two disjoint triangles split") {
    const CommunityPartition p = detect_label_propagation(two_triangles(), 3);
    CHECK(p.community_count == 2);
  }
  SUBCASE("complete graph collapses to one community") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
    }
    const CommunityPartition p = detect_label_propagation(make_net(5, edges), 1);
    CHECK(p.community_count == 1);
  }
  SUBCASE("isolated nodes stay singletons") {
    const auto net = make_net(5, {{0, 1}});
    const CommunityPartition p = detect_label_propagation(net, 9);
    CHECK(p.community_count == 4);  // {0,1} plus three singletons
  }
}

TEST_CASE("reported Q equals recomputed modularity for every algorithm") {
  Rng rng = Rng::seeded(31);
  for (int trial = 0; trial < 5; ++trial) {
    const TradeNetwork net = oracle::random_digraph(40, 0.08, rng);
    if (net.edge_count() == 0) continue;
    for (const char* algo : {"multilevel", "fastgreedy", "labelprop"}) {
      const CommunityPartition p = detect_communities(net, algo, 7);
      CHECK(is_valid_partition(p, net.node_count()));
      CHECK(p.modularity ==
            doctest::Approx(modularity(net, p.assignment)).epsilon(1e-9));
      CHECK(p.modularity >= -0.5);
      CHECK(p.modularity <= 1.0);
    }
  }
}

TEST_CASE("determinism per seed and variation across seeds allowed") {
  Rng rng = Rng::seeded(12);
  const TradeNetwork net = oracle::random_digraph(60, 0.06, rng);
  const CommunityPartition a = detect_multilevel(net, 99);
  const CommunityPartition b = detect_multilevel(net, 99);
  CHECK(a.assignment == b.assignment);
  CHECK(a.modularity == b.modularity);

  const CommunityPartition c = detect_label_propagation(net, 4);
  const CommunityPartition d = detect_label_propagation(net, 4);
  CHECK(c.assignment == d.assignment);
}

TEST_CASE("no community spans two components") {
  Rng rng = Rng::seeded(6);
  // two random blobs with no edges between them
  TradeNetwork net;
  for (int v = 0; v < 40; ++v) net.add_node("n" + std::to_string(v));
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      if (i != j && rng.uniform() < 0.2) net.add_trade(i, j, 1.0, 0.0);
      if (i != j && rng.uniform() < 0.2) net.add_trade(20 + i, 20 + j, 1.0, 0.0);
    }
  }
  net.finalize();
  for (const char* algo : {"multilevel", "fastgreedy"}) {
    const CommunityPartition p = detect_communities(net, algo, 1);
    for (int i = 0; i < 20; ++i) {
      for (int j = 20; j < 40; ++j) {
        CHECK(p.assignment[static_cast<std::size_t>(i)] !=
              p.assignment[static_cast<std::size_t>(j)]);
      }
    }
  }
}

TEST_CASE("weighted detection differs from unweighted when weights disagree") {
  // two squares joined by a heavy bridge; weights pull the bridge together
  TradeNetwork net;
  for (int v = 0; v < 4; ++v) net.add_node("n" + std::to_string(v));
  net.add_trade(0, 1, 10.0, 0.0);
  net.add_trade(2, 3, 10.0, 0.0);
  net.add_trade(1, 2, 0.1, 0.0);
  net.finalize();
  const CommunityPartition weighted = detect_multilevel(net, 1, 1.0, true);
  CHECK(weighted.community_count == 2);
  CHECK(weighted.assignment[0] == weighted.assignment[1]);
  CHECK(weighted.assignment[2] == weighted.assignment[3]);
}

TEST_CASE("comparison table aggregates and sorts by mean Q") {
  const auto net = two_triangles();
  SUBCASE("single net single algorithm") {
    const auto rows = compare_algorithms({net}, {"multilevel"}, 1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].min_q == rows[0].mean_q);
    CHECK(rows[0].mean_q == rows[0].max_q);
    CHECK(rows[0].mean_q == doctest::Approx(0.5));
  }
  SUBCASE("rows sorted by mean descending") {
    Rng rng = Rng::seeded(13);
    std::vector<TradeNetwork> nets;
    for (int i = 0; i < 3; ++i) nets.push_back(oracle::random_digraph(30, 0.1, rng));
    const auto rows = compare_algorithms(nets, {"labelprop", "multilevel", "fastgreedy"}, 5);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].mean_q >= rows[1].mean_q);
    CHECK(rows[1].mean_q >= rows[2].mean_q);
  }
}

TEST_CASE("NMI behaves") {
  std::vector<int> a = {0, 0, 1, 1};
  CHECK(normalized_mutual_information(a, a) == doctest::Approx(1.0));
  std::vector<int> relabeled = {1, 1, 0, 0};
  CHECK(normalized_mutual_information(a, relabeled) == doctest::Approx(1.0));
  std::vector<int> one = {0, 0, 0, 0};
  CHECK(normalized_mutual_information(a, one) == doctest::Approx(0.0));
  CHECK(normalized_mutual_information(one, one) == doctest::Approx(1.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rmtnet/error.hpp"
#include "rmtnet/graph.hpp"
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

TradeNetwork star_out(int leaves) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return make_net(leaves + 1, edges);
}

TradeNetwork cycle(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return make_net(n, edges);
}

TradeNetwork path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return make_net(n, edges);
}

}  // namespace

TEST_CASE("network construction from events") {
  SUBCASE("repeated direct trades accumulate weight") {
    WeeklyBatch batch;
    for (int i = 0; i < 2; ++i) {
      TradeEvent e;
      e.source_id = "A";
      e.target_id = "B";
      batch.events.push_back(e);
    }
    const TradeNetwork net = build_trading_network(batch);
    CHECK(net.node_count() == 2);
    REQUIRE(net.edge_count() == 1);
    CHECK(net.edges()[0].weight == 2.0);
  }
  SUBCASE("warehouse deposit and withdrawal orient through the warehouse") {
    WeeklyBatch batch;
    TradeEvent dep;
    dep.source_id = "A";
    dep.target_id = "W";
    dep.kind = TradeKind::WarehouseDeposit;
    TradeEvent wit;
    wit.source_id = "W";
    wit.target_id = "C";
    wit.kind = TradeKind::WarehouseWithdraw;
    batch.events = {dep, wit};
    const TradeNetwork net = build_trading_network(batch);
    CHECK(net.node_count() == 3);
    REQUIRE(net.edge_count() == 2);
    CHECK(net.node_role(net.index_of("W")) == NodeRole::Warehouse);
    CHECK(net.node_role(net.index_of("A")) == NodeRole::Character);
  }
  SUBCASE("money volumes sum per edge") {
    WeeklyBatch batch;
    TradeEvent a;
    a.source_id = "A";
    a.target_id = "B";
    a.money_value = 3;
    TradeEvent b = a;
    b.money_value = 4;
    batch.events = {a, b};
    const TradeNetwork net = build_trading_network(batch);
    REQUIRE(net.edge_count() == 1);
    CHECK(net.edges()[0].weight == 2.0);
    CHECK(net.edges()[0].money == 7.0);
  }
}

TEST_CASE("degree statistics") {
  SUBCASE("single directed edge") {
    const auto net = make_net(2, {{0, 1}});
    const DegreeStats d = degree_stats(net);
    CHECK(d.mean == doctest::Approx(1.0));
    CHECK(d.stddev == doctest::Approx(0.0));
  }
  SUBCASE("star center to four leaves") {
    const auto net = star_out(4);
    const DegreeStats d = degree_stats(net);
    CHECK(d.mean == doctest::Approx(1.6));
    CHECK(d.stddev == doctest::Approx(1.2));  // sqrt(1.44), population
  }
  SUBCASE("isolated nodes have zero degrees") {
    const auto net = make_net(3, {});
    const DegreeStats d = degree_stats(net);
    CHECK(d.mean == 0.0);
    CHECK(d.stddev == 0.0);
  }
  SUBCASE("degree mean relates to edge count as 2E/N") {
    Rng rng = Rng::seeded(3);
    const auto net = oracle::random_digraph(30, 0.1, rng);
    const DegreeStats d = degree_stats(net);
    CHECK(d.mean * net.node_count() == doctest::Approx(2.0 * net.edge_count()));
  }
}

TEST_CASE("betweenness of named graphs") {
  SUBCASE("directed path puts all flow through the middle") {
    const auto net = path(3);
    const BetweennessResult b = betweenness(net);
    CHECK(b.values[0] == 0.0);
    CHECK(b.values[1] == 1.0);
    CHECK(b.values[2] == 0.0);
  }
  SUBCASE("directed 4-cycle, frozen from the brute-force oracle") {
    const auto net = cycle(4);
    const auto expect = oracle::betweenness(net);
    // ordered pairs around a directed cycle pass through 3 intermediates
    for (double v : expect) CHECK(v == doctest::Approx(3.0));
    const BetweennessResult b = betweenness(net);
    for (int v = 0; v < 4; ++v) CHECK(b.values[v] == doctest::Approx(expect[v]));
  }
  SUBCASE("out-star has no transit nodes") {
    const auto net = star_out(5);
    const BetweennessResult b = betweenness(net);
    for (double v : b.values) CHECK(v == 0.0);
  }
}

TEST_CASE("clustering coefficient") {
  CHECK(clustering_coefficient(make_net(3, {{0, 1}, {1, 2}, {2, 0}})) == doctest::Approx(1.0));
  CHECK(clustering_coefficient(star_out(4)) == doctest::Approx(0.0));
  // two triangles sharing vertex 0: 6 closed of 10 triplets
  const auto net = make_net(5, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {3, 4}, {4, 0}});
  CHECK(clustering_coefficient(net) == doctest::Approx(0.6));
}

TEST_CASE("diameter on the undirected projection") {
  CHECK(diameter(cycle(10)) == 5);
  CHECK(diameter(star_out(7)) == 2);
  CHECK(diameter(path(6)) == 5);
  CHECK(diameter(make_net(1, {})) == 0);
  // two components: the larger one wins
  CHECK(diameter(make_net(7, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 6}})) == 3);
}

TEST_CASE("degree assortativity") {
  SUBCASE("star is perfectly disassortative") {
    CHECK(*degree_assortativity(star_out(4)) == doctest::Approx(-1.0));
  }
  SUBCASE("cycle has undefined assortativity") {
    CHECK_FALSE(degree_assortativity(cycle(6)).has_value());
  }
  SUBCASE("path of five matches the brute-force Pearson") {
    const auto net = path(5);
    const auto expect = oracle::assortativity(net);
    REQUIRE(expect.has_value());
    CHECK(*degree_assortativity(net) == doctest::Approx(*expect).epsilon(1e-12));
    CHECK(*expect == doctest::Approx(-1.0 / 3.0));  // endpoint pairs drag it negative
  }
}

TEST_CASE("average path length") {
  SUBCASE("directed path of three") {
    CHECK(*average_path_length(path(3)) == doctest::Approx(4.0 / 3.0));
  }
  SUBCASE("single edge") {
    CHECK(*average_path_length(make_net(2, {{0, 1}})) == doctest::Approx(1.0));
  }
  SUBCASE("no edges means undefined") {
    CHECK_FALSE(average_path_length(make_net(3, {})).has_value());
  }
}

TEST_CASE("modularity") {
  SUBCASE("everything in one community scores zero") {
    const auto net = make_net(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(modularity(net, std::vector<int>{0, 0, 0, 0}) == doctest::Approx(0.0));
  }
  SUBCASE("two disjoint triangles split by triangle") {
    const auto net = make_net(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    CHECK(modularity(net, std::vector<int>{0, 0, 0, 1, 1, 1}) == doctest::Approx(0.5));
  }
  SUBCASE("two singletons over one edge") {
    const auto net = make_net(2, {{0, 1}});
    CHECK(modularity(net, std::vector<int>{0, 1}) == doctest::Approx(-0.5));
  }
  SUBCASE("invariant under uniform weight scaling") {
    Rng rng = Rng::seeded(8);
    const auto net = oracle::random_digraph(20, 0.15, rng);
    std::vector<int> comm(20);
    for (auto& c : comm) c = static_cast<int>(rng.below(4));
    const double q1 = modularity(net, comm);

    TradeNetwork scaled;
    for (int v = 0; v < net.node_count(); ++v) scaled.add_node(net.node_id(v));
    for (const auto& e : net.edges()) scaled.add_trade(e.src, e.dst, e.weight * 7.5, e.money);
    scaled.finalize();
    CHECK(modularity(scaled, comm) == doctest::Approx(q1).epsilon(1e-12));
  }
}

TEST_CASE("metrics agree with brute force on random graphs") {
  Rng rng = Rng::seeded(4242);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(40));
    const double p = rng.uniform(0.02, 0.25);
    const TradeNetwork net = oracle::random_digraph(n, p, rng);

    const auto expect_btw = oracle::betweenness(net);
    const BetweennessResult got = betweenness(net, 2);
    for (int v = 0; v < n; ++v) {
      CHECK(got.values[static_cast<std::size_t>(v)] ==
            doctest::Approx(expect_btw[static_cast<std::size_t>(v)]).epsilon(1e-9));
    }

    CHECK(diameter(net) == oracle::diameter(net));
    CHECK(clustering_coefficient(net) == doctest::Approx(oracle::clustering(net)).epsilon(1e-9));

    const auto mine = degree_assortativity(net);
    const auto theirs = oracle::assortativity(net);
    CHECK(mine.has_value() == theirs.has_value());
    if (mine && theirs) CHECK(*mine == doctest::Approx(*theirs).epsilon(1e-9));

    const auto apl1 = average_path_length(net);
    const auto apl2 = oracle::average_path_length(net);
    CHECK(apl1.has_value() == apl2.has_value());
    if (apl1 && apl2) CHECK(*apl1 == doctest::Approx(*apl2).epsilon(1e-9));

    std::vector<int> comm(static_cast<std::size_t>(n));
    for (auto& c : comm) c = static_cast<int>(rng.below(5));
    CHECK(modularity(net, comm) == doctest::Approx(oracle::modularity(net, comm)).epsilon(1e-9));
  }
}

TEST_CASE("betweenness is independent of thread count") {
  Rng rng = Rng::seeded(77);
  const TradeNetwork net = oracle::random_digraph(50, 0.08, rng);
  const BetweennessResult a = betweenness(net, 1);
  const BetweennessResult b = betweenness(net, 2);
  for (int v = 0; v < net.node_count(); ++v) {
    CHECK(a.values[static_cast<std::size_t>(v)] == b.values[static_cast<std::size_t>(v)]);
  }
}

TEST_CASE("induced subgraph keeps ids, roles and weights") {
  WeeklyBatch batch;
  auto add = [&](const char* s, const char* t, TradeKind k, std::uint64_t money) {
    TradeEvent e;
    e.source_id = s;
    e.target_id = t;
    e.kind = k;
    e.money_value = money;
    batch.events.push_back(e);
  };
  add("A", "B", TradeKind::Direct, 5);
  add("A", "W", TradeKind::WarehouseDeposit, 2);
  add("W", "C", TradeKind::WarehouseWithdraw, 2);
  const TradeNetwork net = build_trading_network(batch);
  const std::vector<int> keep = {net.index_of("A"), net.index_of("W"), net.index_of("C")};
  const TradeNetwork sub = induced_subgraph(net, keep);
  CHECK(sub.node_count() == 3);
  CHECK(sub.edge_count() == 2);  // A->B edge dropped with B
  CHECK(sub.node_role(sub.index_of("W")) == NodeRole::Warehouse);
}

TEST_CASE("empty network summary is all zeros") {
  TradeNetwork net;
  net.finalize();
  const NetworkSummary s = summarize(net);
  CHECK(s.node_count == 0);
  CHECK(s.edge_count == 0);
  CHECK_FALSE(s.path_length_defined);
}

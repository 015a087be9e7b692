#include "rmtnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <queue>
#include <thread>

#include "rmtnet/error.hpp"

namespace rmt {

namespace {

void mean_std(std::span<const double> values, double& mean, double& stddev) {
  mean = 0.0;
  stddev = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  stddev = std::sqrt(acc / static_cast<double>(values.size()));
}

/// One Brandes source sweep. Also reports the sum and count of finite
/// distances from `s` so path-length statistics ride along for free.
struct BrandesScratch {
  std::vector<int> dist, sigma, order;
  std::vector<double> delta;
  std::vector<std::vector<int>> preds;

  explicit BrandesScratch(int n)
      : dist(static_cast<std::size_t>(n)),
        sigma(static_cast<std::size_t>(n)),
        delta(static_cast<std::size_t>(n)),
        preds(static_cast<std::size_t>(n)) {
    order.reserve(static_cast<std::size_t>(n));
  }

  void run(const TradeNetwork& net, int s, std::vector<double>& centrality,
           long long& reachable_pairs, double& distance_sum) {
    const int n = net.node_count();
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0);
    order.clear();
    for (auto& p : preds) p.clear();

    dist[static_cast<std::size_t>(s)] = 0;
    sigma[static_cast<std::size_t>(s)] = 1;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      order.push_back(v);
      const int dv = dist[static_cast<std::size_t>(v)];
      for (int w : net.out_neighbors(v)) {
        auto& dw = dist[static_cast<std::size_t>(w)];
        if (dw < 0) {
          dw = dv + 1;
          frontier.push(w);
        }
        if (dw == dv + 1) {
          sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
          preds[static_cast<std::size_t>(w)].push_back(v);
        }
      }
    }

    for (int v : order) {
      if (v != s) {
        reachable_pairs += 1;
        distance_sum += dist[static_cast<std::size_t>(v)];
      }
      delta[static_cast<std::size_t>(v)] = 0.0;
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int w = *it;
      const double coeff =
          (1.0 + delta[static_cast<std::size_t>(w)]) / sigma[static_cast<std::size_t>(w)];
      for (int v : preds[static_cast<std::size_t>(w)]) {
        delta[static_cast<std::size_t>(v)] += sigma[static_cast<std::size_t>(v)] * coeff;
      }
      if (w != s) centrality[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
    }
    (void)n;
  }
};

struct AllSourcesResult {
  std::vector<double> centrality;
  long long reachable_pairs = 0;
  double distance_sum = 0.0;
};

/// Sources are split into a fixed set of contiguous blocks and the block
/// partials are reduced in block order, so the floating-point sums are
/// identical for every thread count.
AllSourcesResult all_sources_pass(const TradeNetwork& net, int threads) {
  const int n = net.node_count();
  AllSourcesResult total;
  total.centrality.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return total;

  const int blocks = std::min(n, 16);
  std::vector<AllSourcesResult> partial(static_cast<std::size_t>(blocks));
  std::atomic<int> next{0};
  auto worker = [&] {
    BrandesScratch scratch(n);
    while (true) {
      const int b = next.fetch_add(1);
      if (b >= blocks) break;
      auto& part = partial[static_cast<std::size_t>(b)];
      part.centrality.assign(static_cast<std::size_t>(n), 0.0);
      const int lo = static_cast<int>(static_cast<long long>(n) * b / blocks);
      const int hi = static_cast<int>(static_cast<long long>(n) * (b + 1) / blocks);
      for (int s = lo; s < hi; ++s) {
        scratch.run(net, s, part.centrality, part.reachable_pairs, part.distance_sum);
      }
    }
  };
  threads = std::max(1, std::min(threads, blocks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& part : partial) {
    for (int v = 0; v < n; ++v) {
      total.centrality[static_cast<std::size_t>(v)] += part.centrality[static_cast<std::size_t>(v)];
    }
    total.reachable_pairs += part.reachable_pairs;
    total.distance_sum += part.distance_sum;
  }
  return total;
}

}  // namespace

DegreeStats degree_stats(const TradeNetwork& net) {
  const int n = net.node_count();
  if (n == 0) throw Error(Errc::EmptyGraph, "degree_stats on empty network");
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v) {
    deg[static_cast<std::size_t>(v)] = static_cast<double>(net.out_neighbors(v).size()) +
                                       static_cast<double>(net.in_neighbors(v).size());
  }
  DegreeStats stats;
  mean_std(deg, stats.mean, stats.stddev);
  return stats;
}

BetweennessResult betweenness(const TradeNetwork& net, int threads) {
  BetweennessResult result;
  result.values = all_sources_pass(net, threads).centrality;
  mean_std(result.values, result.mean, result.stddev);
  return result;
}

double clustering_coefficient(const TradeNetwork& net) {
  const int n = net.node_count();
  if (n == 0) throw Error(Errc::EmptyGraph, "clustering_coefficient on empty network");
  // count connected triplets and triangles on the undirected projection
  long long triplets = 0;
  long long closed = 0;  // one count per triangle (v < u < w scan)
  std::vector<char> mark(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    const auto nbrs = net.und_neighbors(v);
    const long long d = static_cast<long long>(nbrs.size());
    triplets += d * (d - 1) / 2;
    for (int u : nbrs) mark[static_cast<std::size_t>(u)] = 1;
    for (int u : nbrs) {
      if (u <= v) continue;
      for (int w : net.und_neighbors(u)) {
        if (w > u && mark[static_cast<std::size_t>(w)]) ++closed;
      }
    }
    for (int u : nbrs) mark[static_cast<std::size_t>(u)] = 0;
  }
  if (triplets == 0) return 0.0;
  return 3.0 * static_cast<double>(closed) / static_cast<double>(triplets);
}

int diameter(const TradeNetwork& net) {
  const int n = net.node_count();
  int best = 0;
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::queue<int> frontier;
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(s)] = 0;
    frontier.push(s);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      best = std::max(best, dist[static_cast<std::size_t>(v)]);
      for (int u : net.und_neighbors(v)) {
        if (dist[static_cast<std::size_t>(u)] < 0) {
          dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
          frontier.push(u);
        }
      }
    }
  }
  return best;
}

std::optional<double> degree_assortativity(const TradeNetwork& net) {
  if (net.edge_count() == 0) return std::nullopt;
  const int n = net.node_count();
  std::vector<double> deg(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) deg[static_cast<std::size_t>(v)] = net.und_degree(v);

  // every undirected edge contributes both (du, dv) and (dv, du)
  double sx = 0.0, sxx = 0.0, sxy = 0.0;
  long long m2 = 0;
  for (int v = 0; v < n; ++v) {
    for (int u : net.und_neighbors(v)) {
      if (u <= v) continue;
      const double a = deg[static_cast<std::size_t>(v)];
      const double b = deg[static_cast<std::size_t>(u)];
      sx += a + b;
      sxx += a * a + b * b;
      sxy += 2.0 * a * b;
      m2 += 2;
    }
  }
  if (m2 == 0) return std::nullopt;
  const double mean = sx / static_cast<double>(m2);
  const double var = sxx / static_cast<double>(m2) - mean * mean;
  const double cov = sxy / static_cast<double>(m2) - mean * mean;
  if (var <= 1e-15) return std::nullopt;
  const double r = cov / var;
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> average_path_length(const TradeNetwork& net) {
  const auto pass = all_sources_pass(net, 1);
  if (pass.reachable_pairs == 0) return std::nullopt;
  return pass.distance_sum / static_cast<double>(pass.reachable_pairs);
}

double modularity(const TradeNetwork& net, std::span<const int> assignment, double resolution) {
  if (assignment.size() != static_cast<std::size_t>(net.node_count())) {
    throw Error(Errc::LengthMismatch, "assignment does not cover the node set");
  }
  const double m2 = net.und_total_weight();
  if (m2 <= 0.0) return 0.0;
  int communities = 0;
  for (int c : assignment) communities = std::max(communities, c + 1);
  std::vector<double> internal(static_cast<std::size_t>(communities), 0.0);
  std::vector<double> total(static_cast<std::size_t>(communities), 0.0);
  for (int v = 0; v < net.node_count(); ++v) {
    const int cv = assignment[static_cast<std::size_t>(v)];
    total[static_cast<std::size_t>(cv)] += net.und_strength(v);
    const auto nbrs = net.und_neighbors(v);
    const auto ws = net.und_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (assignment[static_cast<std::size_t>(nbrs[i])] == cv) {
        internal[static_cast<std::size_t>(cv)] += ws[i];
      }
    }
  }
  double q = 0.0;
  for (int c = 0; c < communities; ++c) {
    const double in_c = internal[static_cast<std::size_t>(c)];
    const double tot_c = total[static_cast<std::size_t>(c)];
    q += in_c / m2 - resolution * (tot_c / m2) * (tot_c / m2);
  }
  return q;
}

NetworkSummary summarize(const TradeNetwork& net, int threads) {
  NetworkSummary s;
  s.node_count = net.node_count();
  s.edge_count = net.edge_count();
  if (s.node_count == 0) return s;

  const auto pass = all_sources_pass(net, threads);
  mean_std(pass.centrality, s.betweenness_mean, s.betweenness_std);
  if (pass.reachable_pairs > 0) {
    s.average_path_length = pass.distance_sum / static_cast<double>(pass.reachable_pairs);
    s.path_length_defined = true;
  }
  s.clustering_coefficient = clustering_coefficient(net);
  const DegreeStats deg = degree_stats(net);
  s.degree_mean = deg.mean;
  s.degree_std = deg.stddev;
  return s;
}

}  // namespace rmt

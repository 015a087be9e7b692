#include "rmtnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "rmtnet/error.hpp"
#include "rmtnet/metrics.hpp"
#include "rmtnet/rng.hpp"

namespace rmt {

namespace {

/// Undirected weighted working graph for the detection algorithms.
struct WorkGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
  std::vector<double> loop;      // aggregated internal weight (both directions)
  std::vector<double> strength;  // k_v = loop + incident weight
  double m2 = 0.0;               // sum of strengths

  static WorkGraph from_network(const TradeNetwork& net, bool weighted) {
    WorkGraph g;
    g.n = net.node_count();
    g.adj.resize(static_cast<std::size_t>(g.n));
    g.loop.assign(static_cast<std::size_t>(g.n), 0.0);
    g.strength.assign(static_cast<std::size_t>(g.n), 0.0);
    for (int v = 0; v < g.n; ++v) {
      const auto nbrs = net.und_neighbors(v);
      const auto ws = net.und_weights(v);
      g.adj[static_cast<std::size_t>(v)].reserve(nbrs.size());
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const double w = weighted ? ws[i] : 1.0;
        g.adj[static_cast<std::size_t>(v)].emplace_back(nbrs[i], w);
        g.strength[static_cast<std::size_t>(v)] += w;
      }
      g.m2 += g.strength[static_cast<std::size_t>(v)];
    }
    return g;
  }

  double modularity(const std::vector<int>& comm, double resolution) const {
    int k = 0;
    for (int c : comm) k = std::max(k, c + 1);
    std::vector<double> internal(static_cast<std::size_t>(k), 0.0);
    std::vector<double> total(static_cast<std::size_t>(k), 0.0);
    for (int v = 0; v < n; ++v) {
      const int cv = comm[static_cast<std::size_t>(v)];
      total[static_cast<std::size_t>(cv)] += strength[static_cast<std::size_t>(v)];
      internal[static_cast<std::size_t>(cv)] += loop[static_cast<std::size_t>(v)];
      for (const auto& [u, w] : adj[static_cast<std::size_t>(v)]) {
        if (comm[static_cast<std::size_t>(u)] == cv) internal[static_cast<std::size_t>(cv)] += w;
      }
    }
    double q = 0.0;
    for (int c = 0; c < k; ++c) {
      q += internal[static_cast<std::size_t>(c)] / m2 -
           resolution * (total[static_cast<std::size_t>(c)] / m2) *
               (total[static_cast<std::size_t>(c)] / m2);
    }
    return q;
  }
};

/// One Louvain local-moving phase. Returns true if any node moved.
bool local_moving(const WorkGraph& g, std::vector<int>& comm, double resolution, Rng& rng) {
  std::vector<double> comm_total(static_cast<std::size_t>(g.n), 0.0);
  for (int v = 0; v < g.n; ++v) {
    comm_total[static_cast<std::size_t>(comm[static_cast<std::size_t>(v)])] +=
        g.strength[static_cast<std::size_t>(v)];
  }
  std::vector<int> order(static_cast<std::size_t>(g.n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> link(static_cast<std::size_t>(g.n), 0.0);
  std::vector<int> touched;
  bool any_move = false;
  bool moved_this_pass = true;
  while (moved_this_pass) {
    moved_this_pass = false;
    for (int v : order) {
      const int old_c = comm[static_cast<std::size_t>(v)];
      const double kv = g.strength[static_cast<std::size_t>(v)];
      touched.clear();
      for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
        const int cu = comm[static_cast<std::size_t>(u)];
        if (link[static_cast<std::size_t>(cu)] == 0.0) touched.push_back(cu);
        link[static_cast<std::size_t>(cu)] += w;
      }
      comm_total[static_cast<std::size_t>(old_c)] -= kv;

      // score of staying put (v removed from its community)
      double best_score = link[static_cast<std::size_t>(old_c)] -
                          resolution * kv * comm_total[static_cast<std::size_t>(old_c)] / g.m2;
      int best_c = old_c;
      for (int c : touched) {
        if (c == old_c) continue;
        const double score = link[static_cast<std::size_t>(c)] -
                             resolution * kv * comm_total[static_cast<std::size_t>(c)] / g.m2;
        if (score > best_score + 1e-12) {
          best_score = score;
          best_c = c;
        } else if (best_c != old_c && std::abs(score - best_score) <= 1e-12 && c < best_c) {
          best_c = c;  // tie between improving moves: smaller community id
        }
      }
      comm_total[static_cast<std::size_t>(best_c)] += kv;
      if (best_c != old_c) {
        comm[static_cast<std::size_t>(v)] = best_c;
        moved_this_pass = true;
        any_move = true;
      }
      for (int c : touched) link[static_cast<std::size_t>(c)] = 0.0;
    }
  }
  return any_move;
}

WorkGraph aggregate(const WorkGraph& g, const std::vector<int>& comm, int communities) {
  WorkGraph agg;
  agg.n = communities;
  agg.adj.resize(static_cast<std::size_t>(communities));
  agg.loop.assign(static_cast<std::size_t>(communities), 0.0);
  agg.strength.assign(static_cast<std::size_t>(communities), 0.0);
  agg.m2 = g.m2;
  std::vector<std::map<int, double>> nb(static_cast<std::size_t>(communities));
  for (int v = 0; v < g.n; ++v) {
    const int cv = comm[static_cast<std::size_t>(v)];
    agg.loop[static_cast<std::size_t>(cv)] += g.loop[static_cast<std::size_t>(v)];
    for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
      const int cu = comm[static_cast<std::size_t>(u)];
      if (cu == cv) {
        agg.loop[static_cast<std::size_t>(cv)] += w;  // both directions visit once each
      } else {
        nb[static_cast<std::size_t>(cv)][cu] += w;
      }
    }
  }
  for (int c = 0; c < communities; ++c) {
    double s = agg.loop[static_cast<std::size_t>(c)];
    for (const auto& [u, w] : nb[static_cast<std::size_t>(c)]) {
      agg.adj[static_cast<std::size_t>(c)].emplace_back(u, w);
      s += w;
    }
    agg.strength[static_cast<std::size_t>(c)] = s;
  }
  return agg;
}

std::vector<int> compress_labels(std::vector<int>& comm) {
  std::unordered_map<int, int> remap;
  std::vector<int> order;
  for (int& c : comm) {
    auto [it, inserted] = remap.try_emplace(c, static_cast<int>(remap.size()));
    if (inserted) order.push_back(c);
    c = it->second;
  }
  return order;
}

void renumber_partition(const TradeNetwork& net, std::vector<int>& assignment, int& count) {
  compress_labels(assignment);
  int k = 0;
  for (int c : assignment) k = std::max(k, c + 1);
  struct Info {
    int size = 0;
    const std::string* min_id = nullptr;
  };
  std::vector<Info> info(static_cast<std::size_t>(k));
  for (int v = 0; v < net.node_count(); ++v) {
    Info& in = info[static_cast<std::size_t>(assignment[static_cast<std::size_t>(v)])];
    ++in.size;
    const std::string& id = net.node_id(v);
    if (!in.min_id || id < *in.min_id) in.min_id = &id;
  }
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const Info& ia = info[static_cast<std::size_t>(a)];
    const Info& ib = info[static_cast<std::size_t>(b)];
    if (ia.size != ib.size) return ia.size > ib.size;
    return *ia.min_id < *ib.min_id;
  });
  std::vector<int> rank(static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) rank[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])] = r;
  for (int& c : assignment) c = rank[static_cast<std::size_t>(c)];
  count = k;
}

}  // namespace

std::vector<std::vector<int>> CommunityPartition::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(community_count));
  for (int v = 0; v < static_cast<int>(assignment.size()); ++v) {
    out[static_cast<std::size_t>(assignment[static_cast<std::size_t>(v)])].push_back(v);
  }
  return out;
}

CommunityPartition detect_multilevel(const TradeNetwork& net, std::uint64_t seed,
                                     double resolution, bool weighted) {
  if (net.edge_count() == 0) throw Error(Errc::EmptyGraph, "multilevel needs at least one edge");
  Rng rng = Rng::seeded(seed);

  WorkGraph g = WorkGraph::from_network(net, weighted);
  std::vector<int> node_to_final(static_cast<std::size_t>(g.n));
  std::iota(node_to_final.begin(), node_to_final.end(), 0);

  double last_q = -1.0;
  while (true) {
    std::vector<int> comm(static_cast<std::size_t>(g.n));
    std::iota(comm.begin(), comm.end(), 0);
    const bool moved = local_moving(g, comm, resolution, rng);
    compress_labels(comm);
    int communities = 0;
    for (int c : comm) communities = std::max(communities, c + 1);
    const double q = g.modularity(comm, resolution);
    if (!moved || q <= last_q + 1e-9) break;
    last_q = q;
    for (int& f : node_to_final) f = comm[static_cast<std::size_t>(f)];
    if (communities == g.n) break;
    g = aggregate(g, comm, communities);
  }

  CommunityPartition part;
  part.assignment = std::move(node_to_final);
  part.algorithm = "multilevel";
  part.seed = seed;
  renumber_partition(net, part.assignment, part.community_count);
  part.modularity = modularity(net, part.assignment, resolution);
  return part;
}

CommunityPartition detect_fastgreedy(const TradeNetwork& net, bool weighted) {
  if (net.edge_count() == 0) throw Error(Errc::EmptyGraph, "fastgreedy needs at least one edge");
  const WorkGraph g = WorkGraph::from_network(net, weighted);
  const int n = g.n;

  // community state, keyed by persistent id = smallest contained node index
  std::vector<std::unordered_map<int, double>> nb(static_cast<std::size_t>(n));
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);  // tot_c / m2
  std::vector<int> version(static_cast<std::size_t>(n), 0);
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  for (int v = 0; v < n; ++v) {
    a[static_cast<std::size_t>(v)] = g.strength[static_cast<std::size_t>(v)] / g.m2;
    for (const auto& [u, w] : g.adj[static_cast<std::size_t>(v)]) {
      nb[static_cast<std::size_t>(v)][u] += w / g.m2;  // E_ij / m2
    }
  }

  struct Candidate {
    double dq;
    int i, j;  // i < j
    int vi, vj;
    bool operator<(const Candidate& o) const {
      if (dq != o.dq) return dq < o.dq;           // max-heap on dq
      if (i != o.i) return i > o.i;               // then smallest pair
      return j > o.j;
    }
  };
  std::priority_queue<Candidate> heap;
  auto delta_q = [&](int i, int j) {
    const auto it = nb[static_cast<std::size_t>(i)].find(j);
    const double e = it == nb[static_cast<std::size_t>(i)].end() ? 0.0 : it->second;
    return 2.0 * (e - a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)]);
  };
  for (int v = 0; v < n; ++v) {
    for (const auto& [u, w] : nb[static_cast<std::size_t>(v)]) {
      if (v < u) heap.push({delta_q(v, u), v, u, 0, 0});
    }
  }

  std::vector<int> comm(static_cast<std::size_t>(n));
  std::iota(comm.begin(), comm.end(), 0);
  double q = 0.0;
  for (int v = 0; v < n; ++v) q -= a[static_cast<std::size_t>(v)] * a[static_cast<std::size_t>(v)];

  // merge log; best prefix wins
  std::vector<std::pair<int, int>> merges;
  double best_q = q;
  std::size_t best_step = 0;

  while (!heap.empty()) {
    const Candidate c = heap.top();
    heap.pop();
    if (!alive[static_cast<std::size_t>(c.i)] || !alive[static_cast<std::size_t>(c.j)]) continue;
    if (c.vi != version[static_cast<std::size_t>(c.i)] ||
        c.vj != version[static_cast<std::size_t>(c.j)]) {
      continue;  // stale entry
    }
    const int keep = c.i;  // smaller id survives
    const int gone = c.j;
    q += c.dq;
    merges.emplace_back(keep, gone);
    if (q > best_q + 1e-12) {
      best_q = q;
      best_step = merges.size();
    }

    // fold `gone` into `keep`
    alive[static_cast<std::size_t>(gone)] = false;
    ++version[static_cast<std::size_t>(keep)];
    a[static_cast<std::size_t>(keep)] += a[static_cast<std::size_t>(gone)];
    auto& nk = nb[static_cast<std::size_t>(keep)];
    auto& ng = nb[static_cast<std::size_t>(gone)];
    nk.erase(gone);
    for (const auto& [u, w] : ng) {
      if (u == keep) continue;
      nk[u] += w;
      auto& nu = nb[static_cast<std::size_t>(u)];
      nu.erase(gone);
      nu[keep] = nk[u];
    }
    ng.clear();
    for (const auto& [u, w] : nk) {
      const int i = std::min(keep, u);
      const int j = std::max(keep, u);
      heap.push({delta_q(i, j), i, j, version[static_cast<std::size_t>(i)],
                 version[static_cast<std::size_t>(j)]});
    }
  }

  // rebuild the assignment at the best cut
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t s = 0; s < best_step; ++s) {
    parent[static_cast<std::size_t>(find(merges[s].second))] = find(merges[s].first);
  }
  CommunityPartition part;
  part.assignment.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) part.assignment[static_cast<std::size_t>(v)] = find(v);
  part.algorithm = "fastgreedy";
  renumber_partition(net, part.assignment, part.community_count);
  part.modularity = modularity(net, part.assignment);
  return part;
}

CommunityPartition detect_label_propagation(const TradeNetwork& net, std::uint64_t seed,
                                            bool weighted) {
  const int n = net.node_count();
  if (n == 0) throw Error(Errc::EmptyGraph, "label propagation on empty network");
  Rng rng = Rng::seeded(seed);

  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::vector<int> order(label);

  std::vector<double> tally(static_cast<std::size_t>(n), 0.0);
  std::vector<int> touched, best;
  for (int sweep = 0; sweep < 100; ++sweep) {
    rng.shuffle(order);
    bool changed = false;
    for (int v : order) {
      const auto nbrs = net.und_neighbors(v);
      if (nbrs.empty()) continue;
      const auto ws = net.und_weights(v);
      touched.clear();
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        const int l = label[static_cast<std::size_t>(nbrs[i])];
        if (tally[static_cast<std::size_t>(l)] == 0.0) touched.push_back(l);
        tally[static_cast<std::size_t>(l)] += weighted ? ws[i] : 1.0;
      }
      double max_w = 0.0;
      for (int l : touched) max_w = std::max(max_w, tally[static_cast<std::size_t>(l)]);
      best.clear();
      for (int l : touched) {
        if (tally[static_cast<std::size_t>(l)] == max_w) best.push_back(l);
      }
      const int current = label[static_cast<std::size_t>(v)];
      if (std::find(best.begin(), best.end(), current) == best.end()) {
        std::sort(best.begin(), best.end());
        label[static_cast<std::size_t>(v)] =
            best[static_cast<std::size_t>(rng.below(best.size()))];
        changed = true;
      }
      for (int l : touched) tally[static_cast<std::size_t>(l)] = 0.0;
    }
    if (!changed) break;
  }

  CommunityPartition part;
  part.assignment = std::move(label);
  part.algorithm = "labelprop";
  part.seed = seed;
  renumber_partition(net, part.assignment, part.community_count);
  part.modularity = modularity(net, part.assignment);
  return part;
}

CommunityPartition detect_communities(const TradeNetwork& net, const std::string& algorithm,
                                      std::uint64_t seed, double resolution, bool weighted) {
  if (algorithm == "multilevel") return detect_multilevel(net, seed, resolution, weighted);
  if (algorithm == "fastgreedy") return detect_fastgreedy(net, weighted);
  if (algorithm == "labelprop" || algorithm == "label_propagation") {
    return detect_label_propagation(net, seed, weighted);
  }
  throw Error(Errc::ConfigInvalid, "unknown community algorithm '" + algorithm + "'");
}

std::vector<AlgoComparisonRow> compare_algorithms(const std::vector<TradeNetwork>& nets,
                                                  const std::vector<std::string>& algorithms,
                                                  std::uint64_t seed) {
  std::vector<AlgoComparisonRow> rows;
  for (const std::string& algo : algorithms) {
    AlgoComparisonRow row;
    row.algorithm = algo;
    row.min_q = std::numeric_limits<double>::infinity();
    row.max_q = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t count = 0;
    for (const TradeNetwork& net : nets) {
      if (net.edge_count() == 0) continue;
      const CommunityPartition part = detect_communities(net, algo, seed);
      row.min_q = std::min(row.min_q, part.modularity);
      row.max_q = std::max(row.max_q, part.modularity);
      sum += part.modularity;
      ++count;
    }
    if (count == 0) {
      row.min_q = row.max_q = row.mean_q = 0.0;
    } else {
      row.mean_q = sum / static_cast<double>(count);
    }
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const AlgoComparisonRow& a, const AlgoComparisonRow& b) {
                     return a.mean_q > b.mean_q;
                   });
  return rows;
}

double normalized_mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "NMI over different node sets");
  const double n = static_cast<double>(a.size());
  if (a.empty()) return 1.0;
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (const auto& [c, cnt] : ca) ha -= cnt / n * std::log(cnt / n);
  for (const auto& [c, cnt] : cb) hb -= cnt / n * std::log(cnt / n);
  for (const auto& [key, cnt] : joint) {
    const double pij = cnt / n;
    const double pi = ca[key.first] / n;
    const double pj = cb[key.second] / n;
    mi += pij * std::log(pij / (pi * pj));
  }
  if (ha + hb <= 0.0) return 1.0;  // both trivial partitions
  return 2.0 * mi / (ha + hb);
}

}  // namespace rmt

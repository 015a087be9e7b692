#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmtnet/graph.hpp"

namespace rmt {

/// Node -> community assignment with dense ids. Communities are numbered
/// by decreasing size, ties broken by the lexicographically smallest
/// member id, so the numbering is stable across runs.
struct CommunityPartition {
  std::vector<int> assignment;
  int community_count = 0;
  double modularity = 0.0;
  std::string algorithm;
  std::uint64_t seed = 0;

  std::vector<std::vector<int>> members() const;
};

/// Louvain local moving + aggregation until no modularity gain > 1e-9.
/// Visit order is shuffled per seed; a fixed (net, seed) pair always
/// yields the same partition. Throws EmptyGraph when the net has no edge.
CommunityPartition detect_multilevel(const TradeNetwork& net, std::uint64_t seed,
                                     double resolution = 1.0, bool weighted = true);

/// Clauset-Newman-Moore greedy agglomeration, merge ties broken by the
/// smallest community-id pair, cut at the max-Q point. Deterministic.
CommunityPartition detect_fastgreedy(const TradeNetwork& net, bool weighted = true);

/// Asynchronous label propagation, update order shuffled per sweep,
/// max-weight label with seeded tie-break, at most 100 sweeps.
CommunityPartition detect_label_propagation(const TradeNetwork& net, std::uint64_t seed,
                                            bool weighted = true);

/// Dispatch by name: "multilevel", "fastgreedy", "labelprop".
CommunityPartition detect_communities(const TradeNetwork& net, const std::string& algorithm,
                                      std::uint64_t seed, double resolution = 1.0,
                                      bool weighted = true);

struct AlgoComparisonRow {
  std::string algorithm;
  double min_q = 0.0;
  double mean_q = 0.0;
  double max_q = 0.0;
};

/// Runs every algorithm on every network and aggregates the modularity
/// scores; rows sorted by mean Q descending.
std::vector<AlgoComparisonRow> compare_algorithms(const std::vector<TradeNetwork>& nets,
                                                  const std::vector<std::string>& algorithms,
                                                  std::uint64_t seed);

/// Normalized mutual information (arithmetic-mean normalization) between
/// two assignments over the same node set.
double normalized_mutual_information(std::span<const int> a, std::span<const int> b);

}  // namespace rmt

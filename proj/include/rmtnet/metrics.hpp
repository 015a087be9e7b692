#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rmtnet/graph.hpp"

namespace rmt {

struct DegreeStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

/// Degree = distinct out-neighbors + distinct in-neighbors, so the mean
/// relates to the edge count by mean * nodes = 2 * edges.
DegreeStats degree_stats(const TradeNetwork& net);

struct BetweennessResult {
  std::vector<double> values;  // per node, unnormalized
  double mean = 0.0;
  double stddev = 0.0;
};

/// Brandes on the directed graph with unit distances. Result is the sum
/// over ordered pairs (s,t) of the pair-dependency through each node.
/// Deterministic for any thread count.
BetweennessResult betweenness(const TradeNetwork& net, int threads = 1);

/// Global transitivity 3*triangles/triplets on the undirected projection;
/// 0 when no connected triplet exists.
double clustering_coefficient(const TradeNetwork& net);

/// Max shortest-path distance within any connected component of the
/// undirected projection. Reported as "radius" in community profiles.
int diameter(const TradeNetwork& net);

/// Pearson correlation of endpoint degrees over undirected-projection
/// edges, each edge contributing both orientations. nullopt when either
/// margin has zero variance.
std::optional<double> degree_assortativity(const TradeNetwork& net);

/// Mean shortest-path distance over ordered reachable pairs of the
/// directed graph; nullopt when no pair is reachable.
std::optional<double> average_path_length(const TradeNetwork& net);

/// Newman weighted modularity of a full node assignment, computed on the
/// undirected projection. `resolution` scales the null-model term.
double modularity(const TradeNetwork& net, std::span<const int> assignment,
                  double resolution = 1.0);

struct NetworkSummary {
  int node_count = 0;
  int edge_count = 0;
  double average_path_length = 0.0;
  bool path_length_defined = false;
  double clustering_coefficient = 0.0;
  double degree_mean = 0.0;
  double degree_std = 0.0;
  double betweenness_mean = 0.0;
  double betweenness_std = 0.0;
};

/// One pass over all sources computing betweenness and path length
/// together (they share the BFS work).
NetworkSummary summarize(const TradeNetwork& net, int threads = 1);

}  // namespace rmt

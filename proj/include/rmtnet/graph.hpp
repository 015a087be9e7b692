#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmtnet/ingest.hpp"

namespace rmt {

enum class NodeRole : std::uint8_t { Character, Warehouse };

/// Weekly virtual-goods trading network. Directed multigraph collapsed to
/// one edge per ordered (src, dst) pair; edge weight counts trades and
/// money_volume sums their game-money value. No self-loops.
class TradeNetwork {
 public:
  struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;  // trade count (>= 1 when built from events)
    double money = 0.0;
  };

  int week_index = 0;

  int add_node(const std::string& id, NodeRole role = NodeRole::Character);
  /// -1 when the id is unknown.
  int index_of(const std::string& id) const;
  void add_trade(int src, int dst, double weight, double money);

  /// Sorts edges by (src, dst) and builds adjacency indexes. Must be called
  /// after the last mutation; metric code relies on it.
  void finalize();

  int node_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::string& node_id(int v) const { return ids_[v]; }
  NodeRole node_role(int v) const { return roles_[v]; }
  const std::vector<std::string>& node_ids() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // CSR adjacency over the directed graph.
  std::span<const int> out_neighbors(int v) const;
  std::span<const double> out_weights(int v) const;
  std::span<const int> in_neighbors(int v) const;

  // Undirected projection: neighbor lists with summed weights
  // w(u,v) + w(v,u); built by finalize().
  std::span<const int> und_neighbors(int v) const;
  std::span<const double> und_weights(int v) const;
  int und_degree(int v) const;
  /// Total undirected incident weight of v (the modularity k_v).
  double und_strength(int v) const;
  /// Sum of all undirected strengths (2m in modularity notation).
  double und_total_weight() const { return und_total_weight_; }

  bool finalized() const { return finalized_; }

 private:
  std::vector<std::string> ids_;
  std::vector<NodeRole> roles_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;

  std::vector<int> out_off_, out_adj_, in_off_, in_adj_;
  std::vector<double> out_w_;
  std::vector<int> und_off_, und_adj_;
  std::vector<double> und_w_, und_strength_;
  double und_total_weight_ = 0.0;
  bool finalized_ = false;
};

/// Phase 1: embed a weekly batch. Direct trades give character->character
/// edges, deposits character->warehouse, withdrawals warehouse->character.
TradeNetwork build_trading_network(const WeeklyBatch& batch);

/// Subgraph induced by `members` (node indexes of `net`). Ids, roles and
/// edge weights are preserved; week_index is copied.
TradeNetwork induced_subgraph(const TradeNetwork& net, std::span<const int> members);

}  // namespace rmt

#include "rmtnet/graph.hpp"

#include <algorithm>
#include <map>

#include "rmtnet/error.hpp"

namespace rmt {

int TradeNetwork::add_node(const std::string& id, NodeRole role) {
  auto [it, inserted] = index_.try_emplace(id, static_cast<int>(ids_.size()));
  if (inserted) {
    ids_.push_back(id);
    roles_.push_back(role);
  } else if (role == NodeRole::Warehouse) {
    // warehouse evidence wins over a default character tag
    roles_[static_cast<std::size_t>(it->second)] = NodeRole::Warehouse;
  }
  return it->second;
}

int TradeNetwork::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

void TradeNetwork::add_trade(int src, int dst, double weight, double money) {
  if (src == dst) return;  // no self-loops by construction
  edges_.push_back({src, dst, weight, money});
  finalized_ = false;
}

void TradeNetwork::finalize() {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  // merge duplicate (src, dst) entries
  std::vector<Edge> merged;
  merged.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (!merged.empty() && merged.back().src == e.src && merged.back().dst == e.dst) {
      merged.back().weight += e.weight;
      merged.back().money += e.money;
    } else {
      merged.push_back(e);
    }
  }
  edges_ = std::move(merged);

  const int n = node_count();
  out_off_.assign(static_cast<std::size_t>(n) + 1, 0);
  in_off_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const Edge& e : edges_) {
    ++out_off_[static_cast<std::size_t>(e.src) + 1];
    ++in_off_[static_cast<std::size_t>(e.dst) + 1];
  }
  for (int v = 0; v < n; ++v) {
    out_off_[static_cast<std::size_t>(v) + 1] += out_off_[static_cast<std::size_t>(v)];
    in_off_[static_cast<std::size_t>(v) + 1] += in_off_[static_cast<std::size_t>(v)];
  }
  out_adj_.resize(edges_.size());
  out_w_.resize(edges_.size());
  in_adj_.resize(edges_.size());
  std::vector<int> opos(out_off_.begin(), out_off_.end() - 1);
  std::vector<int> ipos(in_off_.begin(), in_off_.end() - 1);
  for (const Edge& e : edges_) {
    const int o = opos[static_cast<std::size_t>(e.src)]++;
    out_adj_[static_cast<std::size_t>(o)] = e.dst;
    out_w_[static_cast<std::size_t>(o)] = e.weight;
    in_adj_[static_cast<std::size_t>(ipos[static_cast<std::size_t>(e.dst)]++)] = e.src;
  }

  // undirected projection with summed weights
  std::vector<std::map<int, double>> und(static_cast<std::size_t>(n));
  for (const Edge& e : edges_) {
    und[static_cast<std::size_t>(e.src)][e.dst] += e.weight;
    und[static_cast<std::size_t>(e.dst)][e.src] += e.weight;
  }
  und_off_.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t total = 0;
  for (int v = 0; v < n; ++v) {
    total += und[static_cast<std::size_t>(v)].size();
    und_off_[static_cast<std::size_t>(v) + 1] = static_cast<int>(total);
  }
  und_adj_.resize(total);
  und_w_.resize(total);
  und_strength_.assign(static_cast<std::size_t>(n), 0.0);
  und_total_weight_ = 0.0;
  std::size_t pos = 0;
  for (int v = 0; v < n; ++v) {
    double strength = 0.0;
    for (const auto& [u, w] : und[static_cast<std::size_t>(v)]) {
      und_adj_[pos] = u;
      und_w_[pos] = w;
      ++pos;
      strength += w;
    }
    und_strength_[static_cast<std::size_t>(v)] = strength;
    und_total_weight_ += strength;
  }
  finalized_ = true;
}

std::span<const int> TradeNetwork::out_neighbors(int v) const {
  const auto b = static_cast<std::size_t>(out_off_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(out_off_[static_cast<std::size_t>(v) + 1]);
  return {out_adj_.data() + b, e - b};
}

std::span<const double> TradeNetwork::out_weights(int v) const {
  const auto b = static_cast<std::size_t>(out_off_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(out_off_[static_cast<std::size_t>(v) + 1]);
  return {out_w_.data() + b, e - b};
}

std::span<const int> TradeNetwork::in_neighbors(int v) const {
  const auto b = static_cast<std::size_t>(in_off_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(in_off_[static_cast<std::size_t>(v) + 1]);
  return {in_adj_.data() + b, e - b};
}

std::span<const int> TradeNetwork::und_neighbors(int v) const {
  const auto b = static_cast<std::size_t>(und_off_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(und_off_[static_cast<std::size_t>(v) + 1]);
  return {und_adj_.data() + b, e - b};
}

std::span<const double> TradeNetwork::und_weights(int v) const {
  const auto b = static_cast<std::size_t>(und_off_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(und_off_[static_cast<std::size_t>(v) + 1]);
  return {und_w_.data() + b, e - b};
}

int TradeNetwork::und_degree(int v) const {
  return und_off_[static_cast<std::size_t>(v) + 1] - und_off_[static_cast<std::size_t>(v)];
}

double TradeNetwork::und_strength(int v) const {
  return und_strength_[static_cast<std::size_t>(v)];
}

TradeNetwork build_trading_network(const WeeklyBatch& batch) {
  TradeNetwork net;
  net.week_index = batch.week_index;
  for (const TradeEvent& ev : batch.events) {
    NodeRole src_role = NodeRole::Character;
    NodeRole dst_role = NodeRole::Character;
    if (ev.kind == TradeKind::WarehouseDeposit) dst_role = NodeRole::Warehouse;
    if (ev.kind == TradeKind::WarehouseWithdraw) src_role = NodeRole::Warehouse;
    const int s = net.add_node(ev.source_id, src_role);
    const int t = net.add_node(ev.target_id, dst_role);
    if (s == t) continue;  // degenerate self-transfer, nothing to embed
    net.add_trade(s, t, 1.0, static_cast<double>(ev.money_value));
  }
  net.finalize();
  return net;
}

TradeNetwork induced_subgraph(const TradeNetwork& net, std::span<const int> members) {
  TradeNetwork sub;
  sub.week_index = net.week_index;
  std::vector<int> remap(static_cast<std::size_t>(net.node_count()), -1);
  for (int v : members) {
    remap[static_cast<std::size_t>(v)] =
        sub.add_node(net.node_id(v), net.node_role(v));
  }
  for (const TradeNetwork::Edge& e : net.edges()) {
    const int s = remap[static_cast<std::size_t>(e.src)];
    const int t = remap[static_cast<std::size_t>(e.dst)];
    if (s >= 0 && t >= 0) sub.add_trade(s, t, e.weight, e.money);
  }
  sub.finalize();
  return sub;
}

}  // namespace rmt

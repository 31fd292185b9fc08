#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "icntsch/common.hpp"

namespace icntsch::radio {

// Undirected connectivity graph with per-edge loss probability. Interference
// range equals connectivity range.
class ConnectivityGraph {
 public:
  void add_node(NodeId id) { adjacency_.try_emplace(id); }

  void add_edge(NodeId a, NodeId b, double p_loss = 0.0) {
    if (a == b) throw ConfigError("self-loop on node " + std::to_string(a));
    if (p_loss < 0.0 || p_loss > 1.0) {
      throw ConfigError("p_loss out of [0,1] on edge " + std::to_string(a) + "-" +
                        std::to_string(b));
    }
    add_node(a);
    add_node(b);
    auto& na = adjacency_[a];
    auto& nb = adjacency_[b];
    if (std::find(na.begin(), na.end(), b) == na.end()) {
      na.insert(std::upper_bound(na.begin(), na.end(), b), b);
      nb.insert(std::upper_bound(nb.begin(), nb.end(), a), a);
    }
    loss_[key(a, b)] = p_loss;
  }

  // Optional external interference on one physical channel of one edge;
  // overrides the edge's base loss for that channel.
  void set_channel_loss(NodeId a, NodeId b, unsigned channel, double p_loss) {
    require_edge(a, b);
    channel_loss_[{key(a, b), channel}] = p_loss;
  }

  bool has_node(NodeId id) const { return adjacency_.count(id) > 0; }

  bool adjacent(NodeId a, NodeId b) const {
    auto it = adjacency_.find(a);
    if (it == adjacency_.end()) return false;
    return std::binary_search(it->second.begin(), it->second.end(), b);
  }

  double loss(NodeId a, NodeId b) const {
    auto it = loss_.find(key(a, b));
    return it == loss_.end() ? 1.0 : it->second;
  }

  double loss(NodeId a, NodeId b, unsigned channel) const {
    auto it = channel_loss_.find({key(a, b), channel});
    return it == channel_loss_.end() ? loss(a, b) : it->second;
  }

  // Sorted 1-hop neighbors.
  const std::vector<NodeId>& neighbors(NodeId id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) throw ConfigError("unknown node " + std::to_string(id));
    return it->second;
  }

  // Exact k-hop neighborhood (excluding the node itself) by BFS.
  std::set<NodeId> neighbors(NodeId id, unsigned hops) const {
    if (!has_node(id)) throw ConfigError("unknown node " + std::to_string(id));
    std::map<NodeId, unsigned> dist{{id, 0}};
    std::deque<NodeId> frontier{id};
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop_front();
      if (dist[u] == hops) continue;
      for (NodeId v : adjacency_.at(u)) {
        if (dist.emplace(v, dist[u] + 1).second) frontier.push_back(v);
      }
    }
    std::set<NodeId> out;
    for (const auto& [v, d] : dist)
      if (v != id) out.insert(v);
    return out;
  }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(adjacency_.size());
    for (const auto& [id, _] : adjacency_) out.push_back(id);
    return out;
  }

  std::size_t node_count() const { return adjacency_.size(); }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const auto& [k, _] : loss_) out.push_back(k);
    return out;
  }

  // Nodes not reachable from `from`.
  std::vector<NodeId> unreachable_from(NodeId from) const {
    auto reach = neighbors(from, static_cast<unsigned>(adjacency_.size()));
    reach.insert(from);
    std::vector<NodeId> out;
    for (const auto& [id, _] : adjacency_)
      if (!reach.count(id)) out.push_back(id);
    return out;
  }

  bool connected() const {
    return adjacency_.empty() || unreachable_from(adjacency_.begin()->first).empty();
  }

 private:
  static std::pair<NodeId, NodeId> key(NodeId a, NodeId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  }
  void require_edge(NodeId a, NodeId b) const {
    if (!adjacent(a, b)) {
      throw ConfigError("no edge " + std::to_string(a) + "-" + std::to_string(b));
    }
  }

  std::map<NodeId, std::vector<NodeId>> adjacency_;
  std::map<std::pair<NodeId, NodeId>, double> loss_;
  std::map<std::pair<std::pair<NodeId, NodeId>, unsigned>, double> channel_loss_;
};

}  // namespace icntsch::radio

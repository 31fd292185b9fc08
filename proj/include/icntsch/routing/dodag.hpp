#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "icntsch/radio/graph.hpp"

namespace icntsch::routing {

// Root-anchored routing tree.
class Dodag {
 public:
  Dodag() = default;
  explicit Dodag(NodeId root) : root_(root) { rank_[root] = 0; }

  void attach(NodeId child, NodeId parent) {
    if (!rank_.count(parent)) throw ConfigError("parent " + std::to_string(parent) + " not in tree");
    if (rank_.count(child)) throw ConfigError("node " + std::to_string(child) + " already attached");
    parent_[child] = parent;
    rank_[child] = rank_[parent] + 1;
    auto& c = children_[parent];
    c.insert(std::upper_bound(c.begin(), c.end(), child), child);
  }

  NodeId root() const { return root_; }
  bool contains(NodeId n) const { return rank_.count(n) > 0; }
  bool is_root(NodeId n) const { return n == root_; }

  NodeId parent(NodeId n) const {
    auto it = parent_.find(n);
    return it == parent_.end() ? kNoNode : it->second;
  }
  const std::vector<NodeId>& children(NodeId n) const {
    static const std::vector<NodeId> kNone;
    auto it = children_.find(n);
    return it == children_.end() ? kNone : it->second;
  }
  std::uint32_t rank(NodeId n) const {
    auto it = rank_.find(n);
    if (it == rank_.end()) throw ConfigError("node " + std::to_string(n) + " not in tree");
    return it->second;
  }
  std::uint32_t height() const {
    std::uint32_t h = 0;
    for (const auto& [_, r] : rank_) h = std::max(h, r);
    return h;
  }

  // Nodes ordered by rank, then id.
  std::vector<NodeId> nodes_by_rank() const {
    std::vector<NodeId> out;
    for (const auto& [n, _] : rank_) out.push_back(n);
    std::stable_sort(out.begin(), out.end(),
                     [this](NodeId a, NodeId b) { return rank_.at(a) < rank_.at(b); });
    return out;
  }

  // n, parent(n), ..., root
  std::vector<NodeId> path_to_root(NodeId n) const {
    std::vector<NodeId> out{n};
    while (n != root_) {
      n = parent(n);
      if (n == kNoNode) throw ConfigError("node not attached to tree");
      out.push_back(n);
    }
    return out;
  }

  bool is_ancestor(NodeId ancestor, NodeId n) const {
    while (n != kNoNode) {
      if (n == ancestor) return true;
      n = parent(n);
    }
    return false;
  }

  // Every tree edge as (child, parent).
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (const auto& [c, p] : parent_) out.emplace_back(c, p);
    return out;
  }

  std::size_t size() const { return rank_.size(); }

 private:
  NodeId root_ = kNoNode;
  std::map<NodeId, NodeId> parent_;
  std::map<NodeId, std::vector<NodeId>> children_;
  std::map<NodeId, std::uint32_t> rank_;
};

// Shortest-path tree as produced by a DIO wavefront where each node attaches
// to the lowest-id neighbor of minimal rank.
inline Dodag build_dodag(const radio::ConnectivityGraph& graph, NodeId root) {
  if (!graph.has_node(root)) throw ConfigError("root " + std::to_string(root) + " not in graph");
  auto unreachable = graph.unreachable_from(root);
  if (!unreachable.empty()) {
    std::string msg = "graph is disconnected; unreachable from root:";
    for (auto n : unreachable) msg += " " + std::to_string(n);
    throw ConfigError(msg);
  }
  Dodag d(root);
  std::vector<NodeId> level{root};
  while (!level.empty()) {
    // Walking each level in id order makes the first claimant of a node the
    // lowest-id candidate parent.
    std::sort(level.begin(), level.end());
    std::vector<NodeId> next;
    for (NodeId u : level) {
      for (NodeId v : graph.neighbors(u)) {
        if (d.contains(v)) continue;
        d.attach(v, u);
        next.push_back(v);
      }
    }
    level = std::move(next);
  }
  return d;
}

}  // namespace icntsch::routing

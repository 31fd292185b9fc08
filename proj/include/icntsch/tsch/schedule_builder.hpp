#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icntsch/radio/graph.hpp"
#include "icntsch/routing/dodag.hpp"
#include "icntsch/tsch/cell.hpp"
#include "icntsch/tsch/collision_checker.hpp"

namespace icntsch::tsch {

struct StaticScheduleParams {
  Partition partition;
  std::uint32_t k = 1;
  std::uint32_t cells_per_neighbor = 1;
  std::uint32_t broadcast_cells_per_node = 1;
  // Extra shared cells at the tail of the content subframe.
  std::uint32_t shared_slots_in_c = 2;

  void validate() const {
    partition.validate();
    if (k == 0) throw ConfigError("k must be >= 1");
    if (cells_per_neighbor == 0) throw ConfigError("cells_per_neighbor must be >= 1");
    if (shared_slots_in_c >= partition.len_c) throw ConfigError("shared slots fill the content subframe");
  }
};

// Conflict-aware cell placement against a global view of every schedule.
class CellPlacer {
 public:
  CellPlacer(NetworkSchedule& schedules, const radio::ConnectivityGraph& graph)
      : schedules_(schedules), graph_(graph), dist_(graph) {
    for (const auto& t : transmissions(schedules_, graph_)) by_slot_[t.slot].push_back(t);
    for (const auto& [_, m] : schedules_)
      for (const auto& c : m.cells())
        if (c.role == CellRole::kShared) shared_.insert(c.slot);
  }

  bool shared_slot(std::uint32_t slot) const { return shared_.count(slot) > 0; }
  void mark_shared(std::uint32_t slot) { shared_.insert(slot); }

  bool node_free(NodeId n, std::uint32_t slot) const {
    auto it = schedules_.find(n);
    return it == schedules_.end() || !it->second.slot_used(slot);
  }

  bool fits(const Transmission& t) const {
    if (shared_slot(t.slot)) return false;
    if (!node_free(t.sender, t.slot)) return false;
    for (NodeId r : t.receivers)
      if (!node_free(r, t.slot)) return false;
    auto it = by_slot_.find(t.slot);
    if (it == by_slot_.end()) return true;
    for (const auto& o : it->second)
      if (interferes(t, o, dist_)) return false;
    return true;
  }

  // First fit by slot then channel inside [lo, hi). Channels are scanned
  // starting at `channel_start`.
  std::optional<std::pair<std::uint32_t, std::uint8_t>> find(const Transmission& proto, std::uint32_t lo,
                                                             std::uint32_t hi,
                                                             unsigned channel_start = 0) const {
    Transmission t = proto;
    for (std::uint32_t s = lo; s < hi; ++s) {
      for (unsigned i = 0; i < kNumChannels; ++i) {
        t.slot = s;
        t.channel = static_cast<std::uint8_t>((channel_start + i) % kNumChannels);
        if (fits(t)) return std::pair{t.slot, t.channel};
      }
    }
    return std::nullopt;
  }

  void commit(const Transmission& t) { by_slot_[t.slot].push_back(t); }

  void forget(const Transmission& t) {
    auto& v = by_slot_[t.slot];
    std::erase_if(v, [&](const Transmission& o) {
      return o.sender == t.sender && o.channel == t.channel && o.receivers == t.receivers;
    });
  }

  const HopDistance& distances() const { return dist_; }

  std::string neighborhood(NodeId a, NodeId b) const {
    std::set<NodeId> hood{a, b};
    for (NodeId x : {a, b}) {
      if (x == kNoNode) continue;
      auto n2 = graph_.neighbors(x, 2);
      hood.insert(n2.begin(), n2.end());
    }
    hood.erase(kNoNode);
    std::string s = "{";
    for (NodeId n : hood) s += (s.size() > 1 ? "," : "") + std::to_string(n);
    return s + "}";
  }

 private:
  NetworkSchedule& schedules_;
  const radio::ConnectivityGraph& graph_;
  HopDistance dist_;
  std::map<std::uint32_t, std::vector<Transmission>> by_slot_;
  std::set<std::uint32_t> shared_;
};

namespace detail {

class StaticBuilder {
 public:
  StaticBuilder(const radio::ConnectivityGraph& graph, const routing::Dodag& dodag,
                const StaticScheduleParams& params)
      : graph_(graph), dodag_(dodag), p_(params), placer_(schedules_, graph) {
    for (NodeId n : graph.nodes()) schedules_.emplace(n, ScheduleMatrix(n, p_.partition));
  }

  NetworkSchedule build() {
    const auto& part = p_.partition;
    for (auto& [n, m] : schedules_) {
      Cell c;
      c.slot = 0;
      c.channel = 0;
      c.role = CellRole::kShared;
      c.ssf = Subframe::kBroadcast;
      c.use = CellUse::kBroadcast;
      m.add(c);
    }
    placer_.mark_shared(0);
    for (std::uint32_t i = 0; i < p_.shared_slots_in_c; ++i) {
      const std::uint32_t slot = part.end(Subframe::kContent) - 1 - i;
      placer_.mark_shared(slot);
      for (auto& [n, m] : schedules_) {
        Cell c;
        c.slot = slot;
        c.channel = 0;
        c.role = CellRole::kShared;
        c.ssf = Subframe::kContent;
        c.use = CellUse::kBroadcast;
        m.add(c);
      }
    }

    auto by_rank = dodag_.nodes_by_rank();
    auto deepest_first = by_rank;
    std::stable_sort(deepest_first.begin(), deepest_first.end(), [this](NodeId a, NodeId b) {
      return dodag_.rank(a) > dodag_.rank(b);
    });

    // Upward Interest cells: every hop strictly later than the hops feeding it.
    for (NodeId c : deepest_first) {
      if (dodag_.is_root(c)) continue;
      std::uint32_t lb = part.begin(Subframe::kInterest);
      for (NodeId g : dodag_.children(c)) lb = std::max(lb, up_i_[g] + 1);
      for (std::uint32_t i = 0; i < p_.cells_per_neighbor; ++i) {
        auto slot = place_unicast(c, dodag_.parent(c), Subframe::kInterest, CellUse::kInterest, lb);
        up_i_[c] = std::max(up_i_[c], slot);
      }
    }
    // Node-scheduled broadcast cells, parents before children.
    for (NodeId n : by_rank) {
      std::uint32_t lb = part.begin(Subframe::kInterest);
      if (!dodag_.is_root(n)) lb = std::max(lb, bcast_[dodag_.parent(n)] + 1);
      for (std::uint32_t i = 0; i < p_.broadcast_cells_per_node; ++i) {
        bcast_[n] = std::max(bcast_[n], place_broadcast(n, lb));
      }
    }
    // Downward Interest cells.
    for (NodeId c : by_rank) {
      if (dodag_.is_root(c)) continue;
      const NodeId p = dodag_.parent(c);
      std::uint32_t lb = part.begin(Subframe::kInterest);
      if (!dodag_.is_root(p)) lb = std::max(lb, down_i_[p] + 1);
      for (std::uint32_t i = 0; i < p_.cells_per_neighbor; ++i) {
        down_i_[c] = std::max(down_i_[c], place_unicast(p, c, Subframe::kInterest, CellUse::kInterest, lb));
      }
    }
    // Content cells flowing down mirror the upward Interest cells.
    for (NodeId c : by_rank) {
      if (dodag_.is_root(c)) continue;
      const NodeId p = dodag_.parent(c);
      std::uint32_t lb = part.begin(Subframe::kContent);
      if (!dodag_.is_root(p)) lb = std::max(lb, down_c_[p] + 1);
      for (auto ic : interest_cells(c, p)) {
        for (std::uint32_t j = 0; j < p_.k; ++j) {
          auto slot = place_unicast(p, c, Subframe::kContent, CellUse::kContent, lb,
                                    ic);
          down_c_[c] = std::max(down_c_[c], slot);
        }
      }
    }
    // Content cells flowing up mirror the downward Interest cells.
    for (NodeId c : deepest_first) {
      if (dodag_.is_root(c)) continue;
      const NodeId p = dodag_.parent(c);
      std::uint32_t lb = part.begin(Subframe::kContent);
      for (NodeId g : dodag_.children(c)) lb = std::max(lb, up_c_[g] + 1);
      for (auto ic : interest_cells(p, c)) {
        for (std::uint32_t j = 0; j < p_.k; ++j) {
          auto slot = place_unicast(c, p, Subframe::kContent, CellUse::kContent, lb,
                                    ic);
          up_c_[c] = std::max(up_c_[c], slot);
        }
      }
    }
    return std::move(schedules_);
  }

 private:
  std::vector<std::pair<std::uint32_t, std::uint8_t>> interest_cells(NodeId from, NodeId to) const {
    std::vector<std::pair<std::uint32_t, std::uint8_t>> out;
    for (const auto& c : schedules_.at(from).cells())
      if (c.role == CellRole::kTx && !c.broadcast && c.peer == to && c.use == CellUse::kInterest)
        out.emplace_back(c.slot, c.channel);
    return out;
  }

  std::uint32_t place_unicast(NodeId from, NodeId to, Subframe ssf, CellUse use, std::uint32_t lb,
                              std::optional<std::pair<std::uint32_t, std::uint8_t>> derived = {}) {
    const auto& part = p_.partition;
    Transmission t{from, {to}, 0, 0};
    auto pos = placer_.find(t, std::max(lb, part.begin(ssf)), part.end(ssf));
    if (!pos) {
      throw ScheduleInfeasible("no conflict-free " + std::string(ssf_token(ssf)) + " cell for link " +
                               std::to_string(from) + "->" + std::to_string(to) + " at or after slot " +
                               std::to_string(lb) + "; saturated neighborhood " +
                               placer_.neighborhood(from, to));
    }
    t.slot = pos->first;
    t.channel = pos->second;
    placer_.commit(t);
    Cell tx;
    tx.slot = t.slot;
    tx.channel = t.channel;
    tx.role = CellRole::kTx;
    tx.peer = to;
    tx.ssf = ssf;
    tx.use = use;
    tx.k = p_.k;
    tx.derived_from = derived;
    Cell rx = tx;
    rx.role = CellRole::kRx;
    rx.peer = from;
    schedules_.at(from).add(tx);
    schedules_.at(to).add(rx);
    return t.slot;
  }

  std::uint32_t place_broadcast(NodeId from, std::uint32_t lb) {
    const auto& part = p_.partition;
    Transmission t{from, graph_.neighbors(from), 0, 0};
    auto pos = placer_.find(t, std::max(lb, part.begin(Subframe::kInterest)), part.end(Subframe::kInterest));
    if (!pos) {
      throw ScheduleInfeasible("no conflict-free broadcast cell for node " + std::to_string(from) +
                               "; saturated neighborhood " + placer_.neighborhood(from, kNoNode));
    }
    t.slot = pos->first;
    t.channel = pos->second;
    placer_.commit(t);
    Cell tx;
    tx.slot = t.slot;
    tx.channel = t.channel;
    tx.role = CellRole::kTx;
    tx.broadcast = true;
    tx.ssf = Subframe::kInterest;
    tx.use = CellUse::kBroadcast;
    schedules_.at(from).add(tx);
    for (NodeId r : t.receivers) {
      Cell rx = tx;
      rx.role = CellRole::kRx;
      rx.peer = from;
      schedules_.at(r).add(rx);
    }
    return t.slot;
  }

  const radio::ConnectivityGraph& graph_;
  const routing::Dodag& dodag_;
  StaticScheduleParams p_;
  NetworkSchedule schedules_;
  CellPlacer placer_;
  std::map<NodeId, std::uint32_t> up_i_, down_i_, up_c_, down_c_, bcast_;
};

}  // namespace detail

// Static SSF_I / SSF_C schedule over the DODAG edges plus per-node broadcast
// cells and shared cells.
inline NetworkSchedule build_static_schedule(const radio::ConnectivityGraph& graph,
                                             const routing::Dodag& dodag,
                                             const StaticScheduleParams& params) {
  params.validate();
  if (!graph.connected()) throw ConfigError("topology is not connected");
  return detail::StaticBuilder(graph, dodag, params).build();
}

}  // namespace icntsch::tsch

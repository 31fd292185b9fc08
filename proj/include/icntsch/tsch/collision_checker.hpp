#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "icntsch/radio/graph.hpp"
#include "icntsch/tsch/cell.hpp"

namespace icntsch::tsch {

// Hop distances capped at kFar; only small radii matter for conflicts.
class HopDistance {
 public:
  static constexpr unsigned kFar = 255;
  static constexpr unsigned kConflictRadius = 2;

  explicit HopDistance(const radio::ConnectivityGraph& g) {
    for (NodeId n : g.nodes()) {
      auto& row = dist_[n];
      row[n] = 0;
      std::vector<NodeId> level{n};
      for (unsigned d = 1; d <= kConflictRadius + 1 && !level.empty(); ++d) {
        std::vector<NodeId> next;
        for (NodeId u : level)
          for (NodeId v : g.neighbors(u))
            if (row.emplace(v, d).second) next.push_back(v);
        level = std::move(next);
      }
    }
  }

  unsigned operator()(NodeId a, NodeId b) const {
    auto it = dist_.find(a);
    if (it == dist_.end()) return kFar;
    auto jt = it->second.find(b);
    return jt == it->second.end() ? kFar : jt->second;
  }

 private:
  std::map<NodeId, std::map<NodeId, unsigned>> dist_;
};

struct Transmission {
  NodeId sender = kNoNode;
  std::vector<NodeId> receivers;
  std::uint32_t slot = 0;
  std::uint8_t channel = 0;
};

// Two same-cell transmissions conflict when either sender is within two hops
// of a receiver of the other.
inline bool interferes(const Transmission& a, const Transmission& b, const HopDistance& dist) {
  if (a.slot != b.slot || a.channel != b.channel) return false;
  if (a.sender == b.sender) return true;
  for (NodeId r : b.receivers)
    if (dist(a.sender, r) <= HopDistance::kConflictRadius) return true;
  for (NodeId r : a.receivers)
    if (dist(b.sender, r) <= HopDistance::kConflictRadius) return true;
  return false;
}

enum class ViolationKind : std::uint8_t {
  kRadio,         // node needs its radio twice in one slot
  kInterference,  // same-cell transmissions too close
  kUnmatched,     // TX without its RX mirror or vice versa
  kSharedSlot,    // dedicated cell inside a shared slot
  kPartition,     // cell outside its subframe range
};

inline const char* violation_token(ViolationKind k) {
  switch (k) {
    case ViolationKind::kRadio: return "radio";
    case ViolationKind::kInterference: return "interference";
    case ViolationKind::kUnmatched: return "unmatched";
    case ViolationKind::kSharedSlot: return "shared-slot";
    case ViolationKind::kPartition: return "partition";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::uint32_t slot = 0;
  std::uint8_t channel = 0;
  std::vector<NodeId> nodes;
  std::string detail;
};

inline std::vector<Transmission> transmissions(const NetworkSchedule& schedules,
                                               const radio::ConnectivityGraph& graph,
                                               bool active_only = false) {
  std::vector<Transmission> out;
  for (const auto& [n, m] : schedules) {
    for (const auto& c : m.cells()) {
      if (c.role != CellRole::kTx || (active_only && !c.active)) continue;
      Transmission t{n, {}, c.slot, c.channel};
      if (c.broadcast) {
        t.receivers = graph.neighbors(n);
      } else {
        t.receivers = {c.peer};
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

inline std::vector<Violation> check_collision_free(const NetworkSchedule& schedules,
                                                   const radio::ConnectivityGraph& graph) {
  std::vector<Violation> out;
  HopDistance dist(graph);

  std::set<std::uint32_t> shared_slots;
  for (const auto& [_, m] : schedules)
    for (const auto& c : m.cells())
      if (c.role == CellRole::kShared) shared_slots.insert(c.slot);

  for (const auto& [n, m] : schedules) {
    std::map<std::uint32_t, int> per_slot;
    for (const auto& c : m.cells()) {
      if (!c.dedicated()) continue;
      ++per_slot[c.slot];
      if (shared_slots.count(c.slot)) {
        out.push_back({ViolationKind::kSharedSlot, c.slot, c.channel, {n}, "dedicated cell in shared slot"});
      }
      if (m.partition().subframe_of(c.slot) != c.ssf) {
        out.push_back({ViolationKind::kPartition, c.slot, c.channel, {n},
                       std::string("cell declared ") + ssf_token(c.ssf) + " outside its range"});
      }
      // Matching mirror on the peer(s).
      if (c.broadcast && c.role == CellRole::kTx) {
        for (NodeId r : graph.neighbors(n)) {
          auto it = schedules.find(r);
          const Cell* mc = it == schedules.end() ? nullptr : it->second.find(c.slot, c.channel);
          if (!mc || mc->role != CellRole::kRx || !mc->broadcast || mc->peer != n) {
            out.push_back({ViolationKind::kUnmatched, c.slot, c.channel, {n, r},
                           "broadcast cell without listener"});
          }
        }
      } else if (!c.broadcast) {
        auto it = schedules.find(c.peer);
        const Cell* mc = it == schedules.end() ? nullptr : it->second.find(c.slot, c.channel);
        const CellRole want = c.role == CellRole::kTx ? CellRole::kRx : CellRole::kTx;
        if (!mc || mc->role != want || mc->broadcast || mc->peer != n) {
          out.push_back({ViolationKind::kUnmatched, c.slot, c.channel, {n, c.peer},
                         std::string("no matching ") + (want == CellRole::kRx ? "RX" : "TX") + " cell"});
        }
      } else {
        auto it = schedules.find(c.peer);
        const Cell* mc = it == schedules.end() ? nullptr : it->second.find(c.slot, c.channel);
        if (!mc || mc->role != CellRole::kTx || !mc->broadcast) {
          out.push_back({ViolationKind::kUnmatched, c.slot, c.channel, {n, c.peer},
                         "broadcast listener without sender"});
        }
      }
    }
    for (const auto& [slot, count] : per_slot) {
      if (count > 1) {
        out.push_back({ViolationKind::kRadio, slot, 0, {n},
                       std::to_string(count) + " dedicated cells in one slot"});
      }
    }
  }

  auto txs = transmissions(schedules, graph);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    for (std::size_t j = i + 1; j < txs.size(); ++j) {
      if (interferes(txs[i], txs[j], dist)) {
        out.push_back({ViolationKind::kInterference, txs[i].slot, txs[i].channel,
                       {txs[i].sender, txs[j].sender}, "transmissions interfere"});
      }
    }
  }
  return out;
}

}  // namespace icntsch::tsch

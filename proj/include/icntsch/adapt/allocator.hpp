#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "icntsch/adapt/bitfield.hpp"
#include "icntsch/radio/graph.hpp"
#include "icntsch/tsch/cell.hpp"

namespace icntsch::adapt {

struct CellPosition {
  std::uint32_t slot = 0;
  std::uint8_t channel = 0;
  friend bool operator==(const CellPosition&, const CellPosition&) = default;
};

// Interest cells a->b and their mirrored content cells b->a.
struct BurstPlan {
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  std::vector<CellPosition> interest;
  std::vector<CellPosition> content;  // k per Interest cell, in order
};

// Greedy first fit in the dynamic subframe, by slot then channel. `blocked`
// holds every (slot, channel) known to be in use around either endpoint;
// both endpoints' radios must be idle in a chosen slot.
inline std::optional<BurstPlan> plan_burst(NodeId a, NodeId b, const tsch::ScheduleMatrix& ma,
                                           const tsch::ScheduleMatrix& mb, CellBitmap blocked,
                                           std::uint32_t burst, std::uint32_t k, unsigned channel_start = 0) {
  const auto& part = ma.partition();
  std::set<std::uint32_t> taken;
  auto pick = [&]() -> std::optional<CellPosition> {
    for (std::uint32_t s = part.begin(tsch::Subframe::kDynamic); s < part.end(tsch::Subframe::kDynamic); ++s) {
      if (taken.count(s) || ma.slot_used(s) || mb.slot_used(s)) continue;
      for (unsigned i = 0; i < kNumChannels; ++i) {
        const unsigned ch = (channel_start + i) % kNumChannels;
        if (blocked.test(s, ch)) continue;
        taken.insert(s);
        blocked.set(s, ch);
        return CellPosition{s, static_cast<std::uint8_t>(ch)};
      }
    }
    return std::nullopt;
  };
  BurstPlan plan{a, b, {}, {}};
  for (std::uint32_t i = 0; i < burst; ++i) {
    auto p = pick();
    if (!p) return std::nullopt;
    plan.interest.push_back(*p);
  }
  for (std::uint32_t i = 0; i < burst * k; ++i) {
    auto p = pick();
    if (!p) return std::nullopt;
    plan.content.push_back(*p);
  }
  return plan;
}

inline void install_burst(tsch::ScheduleMatrix& ma, tsch::ScheduleMatrix& mb, const BurstPlan& plan,
                          std::uint64_t burst_id, std::uint32_t k) {
  auto add_pair = [&](tsch::ScheduleMatrix& tx_side, tsch::ScheduleMatrix& rx_side, NodeId tx, NodeId rx,
                      CellPosition pos, tsch::CellUse use,
                      std::optional<std::pair<std::uint32_t, std::uint8_t>> derived) {
    tsch::Cell c;
    c.slot = pos.slot;
    c.channel = pos.channel;
    c.role = tsch::CellRole::kTx;
    c.peer = rx;
    c.ssf = tsch::Subframe::kDynamic;
    c.use = use;
    c.active = true;
    c.k = k;
    c.derived_from = derived;
    c.burst = burst_id;
    tx_side.add(c);
    c.role = tsch::CellRole::kRx;
    c.peer = tx;
    rx_side.add(c);
  };
  for (const auto& p : plan.interest) add_pair(ma, mb, plan.from, plan.to, p, tsch::CellUse::kInterest, {});
  for (std::size_t i = 0; i < plan.content.size(); ++i) {
    const auto& src = plan.interest[i / k];
    add_pair(mb, ma, plan.to, plan.from, plan.content[i], tsch::CellUse::kContent,
             std::pair{src.slot, src.channel});
  }
}

// Occupancy of every node within two hops of a or b, read from the true
// schedules.
inline CellBitmap true_occupancy(const tsch::NetworkSchedule& schedules, const radio::ConnectivityGraph& graph,
                                 NodeId a, NodeId b) {
  std::set<NodeId> hood{a, b};
  for (NodeId x : {a, b}) {
    auto n2 = graph.neighbors(x, 2);
    hood.insert(n2.begin(), n2.end());
  }
  CellBitmap out(schedules.begin()->second.partition().length);
  for (NodeId n : hood) {
    auto it = schedules.find(n);
    if (it != schedules.end()) out |= it->second.bitmap();
  }
  return out;
}

}  // namespace icntsch::adapt

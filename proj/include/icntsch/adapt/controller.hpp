#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "icntsch/adapt/allocator.hpp"
#include "icntsch/adapt/bitfield.hpp"
#include "icntsch/adapt/utilization.hpp"
#include "icntsch/routing/dodag.hpp"
#include "icntsch/tsch/mac.hpp"

namespace icntsch::adapt {

struct AdaptationLogRow {
  std::uint64_t asn = 0;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  double utilization = 0.0;
  Decision decision = Decision::kHold;
  std::uint32_t dyn_cells_after = 0;
};

inline constexpr const char* kAdaptationCsvHeader = "asn,link,U_cur,decision,dyn_cells_after";

// Utilization-driven allocation of dynamic bursts on every directed link.
// Runs at slotframe boundaries; allocations take effect immediately, i.e.
// from the slotframe that starts at that boundary.
class AdaptiveController {
 public:
  AdaptiveController(AdaptationParams params, std::uint32_t k, const radio::ConnectivityGraph& graph,
                     const routing::Dodag& dodag)
      : p_(params), k_(k), graph_(&graph), dodag_(&dodag) {
    p_.validate();
  }

  // Seeds every node's neighbor table from the static schedule, as carried
  // by the routing bootstrap.
  void bootstrap_knowledge(const tsch::TschMac& mac) {
    const auto length = mac.slotframe_length();
    std::map<NodeId, CellBitmap> own;
    for (NodeId n : mac.node_ids()) own[n] = mac.schedule(n).bitmap();
    for (NodeId n : mac.node_ids()) {
      for (NodeId x : graph_->neighbors(n)) {
        ScheduleBitfield bf{x, own[x], CellBitmap(length)};
        for (NodeId y : graph_->neighbors(x)) bf.neighbors |= own[y];
        knowledge_[n].merge(bf);
      }
    }
  }

  ScheduleBitfield advertise(NodeId n, const tsch::TschMac& mac) const {
    const auto length = mac.slotframe_length();
    ScheduleBitfield bf{n, mac.schedule(n).bitmap(), CellBitmap(length)};
    if (auto it = knowledge_.find(n); it != knowledge_.end()) bf.neighbors = it->second.neighbor_union(length);
    return bf;
  }

  void merge(NodeId at, const ScheduleBitfield& bf) { knowledge_[at].merge(bf); }
  const NeighborKnowledge* knowledge(NodeId n) const {
    auto it = knowledge_.find(n);
    return it == knowledge_.end() ? nullptr : &it->second;
  }

  // Folds the slotframe that just ended into the monitors and acts on links
  // whose evaluation turn has come.
  void on_frame_end(std::uint64_t asn, std::uint64_t finished_frame, tsch::TschMac& mac) {
    for (const auto& [link, usage] : mac.frame_usage()) {
      auto [it, _] = monitors_.try_emplace(link, UtilizationMonitor(p_.window));
      it->second.record(usage.scheduled, usage.used);
    }
    for (auto& [link, mon] : monitors_) {
      if (!mon.full()) continue;
      const auto phase = dodag_->contains(link.first) ? dodag_->rank(link.first) : 0u;
      if ((finished_frame + 1 + phase) % p_.window != 0) continue;
      evaluate(asn, link, mon, mac);
    }
  }

  // Removes every dynamic burst (end of run housekeeping is not needed;
  // exposed for tests).
  std::size_t dynamic_bursts() const {
    std::size_t n = 0;
    for (const auto& [_, v] : bursts_) n += v.size();
    return n;
  }
  std::uint32_t dynamic_cells(tsch::LinkKey link) const {
    auto it = bursts_.find(link);
    return it == bursts_.end() ? 0 : static_cast<std::uint32_t>(it->second.size()) * p_.burst * (1 + k_);
  }
  const std::vector<AdaptationLogRow>& log() const { return log_; }
  const AdaptationParams& params() const { return p_; }

 private:
  void evaluate(std::uint64_t asn, tsch::LinkKey link, UtilizationMonitor& mon, tsch::TschMac& mac) {
    auto& bursts = bursts_[link];
    const double u = mon.utilization();
    Decision d = evaluate_adaptation(u, p_, !bursts.empty());
    if (d == Decision::kAllocate) {
      if (bursts.size() >= p_.max_bursts_per_link || !allocate(link, mac)) d = Decision::kReject;
      mon.reset();
    } else if (d == Decision::kDeallocate) {
      const auto keep = bursts_to_keep(mon.mean_used(), static_interest_cells(link, mac),
                                       static_cast<std::uint32_t>(bursts.size()), p_);
      while (bursts.size() > keep) {
        const auto id = bursts.back();
        bursts.pop_back();
        mac.schedule(link.first).remove_burst(id);
        mac.schedule(link.second).remove_burst(id);
      }
      mon.reset();
    }
    if (d != Decision::kHold || u > 0.0 || !bursts.empty()) {
      log_.push_back({asn, link.first, link.second, u, d, dynamic_cells(link)});
    }
  }

  bool allocate(tsch::LinkKey link, tsch::TschMac& mac) {
    const auto [a, b] = link;
    auto& ma = mac.schedule(a);
    auto& mb = mac.schedule(b);
    const auto length = ma.partition().length;
    CellBitmap blocked(length);
    if (p_.oracle_knowledge) {
      blocked = true_occupancy(mac.schedules(), *graph_, a, b);
    } else {
      blocked |= ma.bitmap();
      blocked |= mb.bitmap();
      for (NodeId n : {a, b})
        if (auto it = knowledge_.find(n); it != knowledge_.end()) blocked |= it->second.occupied(length);
    }
    auto plan = plan_burst(a, b, ma, mb, blocked, p_.burst, k_, channel_start(a, b));
    if (!plan) return false;
    const auto id = next_burst_++;
    install_burst(ma, mb, *plan, id, k_);
    bursts_[link].push_back(id);
    return true;
  }

  static std::uint32_t static_interest_cells(tsch::LinkKey link, const tsch::TschMac& mac) {
    std::uint32_t n = 0;
    for (const auto& c : mac.schedule(link.first).cells())
      if (c.role == tsch::CellRole::kTx && !c.broadcast && c.peer == link.second &&
          c.use == tsch::CellUse::kInterest && c.ssf != tsch::Subframe::kDynamic)
        ++n;
    return n;
  }

  static unsigned channel_start(NodeId a, NodeId b) {
    std::uint64_t z = (std::uint64_t{a} << 32 | b) + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return static_cast<unsigned>((z ^ (z >> 31)) % kNumChannels);
  }

  AdaptationParams p_;
  std::uint32_t k_;
  const radio::ConnectivityGraph* graph_;
  const routing::Dodag* dodag_;
  std::map<NodeId, NeighborKnowledge> knowledge_;
  std::map<tsch::LinkKey, UtilizationMonitor> monitors_;
  std::map<tsch::LinkKey, std::vector<std::uint64_t>> bursts_;
  std::vector<AdaptationLogRow> log_;
  std::uint64_t next_burst_ = 1;
};

}  // namespace icntsch::adapt

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "icntsch/harness/energy.hpp"
#include "icntsch/harness/trace.hpp"
#include "icntsch/icn/fib.hpp"
#include "icntsch/link.hpp"
#include "icntsch/radio/medium.hpp"
#include "icntsch/tsch/cell.hpp"

namespace icntsch::tsch {

struct MacParams {
  std::uint32_t max_retries = 3;
  bool beacons = true;
  std::uint32_t beacon_period = 4;  // slotframes
  std::uint32_t shared_initial_window = 2;
  std::uint32_t shared_max_window = 8;
  std::uint32_t shared_max_retries = 2;
  double slot_ms = 15.0;

  std::uint64_t slot_micros() const { return static_cast<std::uint64_t>(slot_ms * 1000.0 + 0.5); }
};

enum class ActionKind : std::uint8_t { kSleep, kListen, kTransmit, kContend };

struct SlotAction {
  ActionKind kind = ActionKind::kSleep;
  const Cell* cell = nullptr;
  const icn::Frame* frame = nullptr;  // kTransmit / kContend
};

// Per-directed-link Interest cell usage within the current slotframe.
struct LinkUsage {
  std::uint32_t scheduled = 0;
  std::uint32_t used = 0;
};

using LinkKey = std::pair<NodeId, NodeId>;

// All nodes' TSCH engines over one shared medium.
class TschMac {
 public:
  TschMac(const radio::ConnectivityGraph& graph, NetworkSchedule schedules, MacParams params,
          std::uint64_t seed, harness::EnergyLedger& energy, harness::TraceLog& trace)
      : graph_(&graph), params_(params), energy_(&energy), trace_(&trace) {
    for (auto& [n, m] : schedules) {
      NodeState s;
      s.schedule = std::move(m);
      s.mac_rng = sim::make_stream(seed, n, sim::StreamPurpose::kMac);
      s.medium_rng = sim::make_stream(seed, n, sim::StreamPurpose::kMedium);
      s.shared_window = params_.shared_initial_window;
      nodes_.emplace(n, std::move(s));
    }
  }

  const MacParams& params() const { return params_; }
  std::uint32_t slotframe_length() const { return nodes_.begin()->second.schedule.partition().length; }

  void enqueue(NodeId n, icn::Frame f) {
    auto& s = node(n);
    if (std::holds_alternative<icn::Beacon>(f.packet) || std::holds_alternative<icn::ReconfigAlert>(f.packet)) {
      s.shared.push_back({std::move(f)});
      return;
    }
    if (f.broadcast()) {
      if (has_cell(s, [](const Cell& c) { return c.role == CellRole::kTx && c.broadcast; })) {
        s.broadcast.push_back({std::move(f)});
      } else {
        s.shared.push_back({std::move(f)});
      }
      return;
    }
    const NodeId peer = *f.destination;
    const CellUse use = f.is_data() ? CellUse::kContent : CellUse::kInterest;
    if (!has_cell(s, [&](const Cell& c) {
          return c.role == CellRole::kTx && !c.broadcast && c.peer == peer && c.use == use;
        })) {
      throw std::logic_error("node " + std::to_string(n) + " has no TX cell toward " + std::to_string(peer));
    }
    auto& face = s.faces[peer];
    (use == CellUse::kContent ? face.content : face.interest).push_back({std::move(f)});
  }

  SlotAction slot_action(NodeId n, sim::Asn asn) const {
    const auto& s = node(n);
    const auto offset = static_cast<std::uint32_t>(asn % s.schedule.partition().length);
    const Cell* shared = nullptr;
    for (const Cell* c : s.schedule.at_slot(offset)) {
      if (!c->dedicated()) {
        shared = c;
        continue;
      }
      if (!c->active) continue;
      if (c->role == CellRole::kRx) return {ActionKind::kListen, c, nullptr};
      if (const auto* head = head_for(s, *c)) return {ActionKind::kTransmit, c, &head->frame};
    }
    if (shared) {
      if (!s.shared.empty()) return {ActionKind::kContend, shared, &s.shared.front().frame};
      return {ActionKind::kListen, shared, nullptr};
    }
    return {};
  }

  // Runs one slot: decisions, medium resolution, delivery.
  void run_slot(sim::Asn asn, LinkUpcalls& up) {
    decide(asn, up);
    resolve();
    deliver(asn, up);
  }

  void decide(sim::Asn asn, LinkUpcalls& up) {
    asn_ = asn;
    const auto length = slotframe_length();
    const auto offset = static_cast<std::uint32_t>(asn % length);
    if (offset == 0) {
      usage_.clear();
      if (params_.beacons && params_.beacon_period > 0) {
        const auto frame = asn / length;
        for (auto& [n, s] : nodes_) {
          if ((frame + n) % params_.beacon_period == 0) s.shared.push_back({icn::Frame{next_id_++, n, std::nullopt, icn::Beacon{asn}}});
        }
      }
    }
    attempts_.clear();
    listeners_.clear();
    origins_.clear();
    sent_.clear();
    for (auto& [n, s] : nodes_) {
      SlotAction a = slot_action(n, asn);
      count_usage(n, s, offset, a);
      harness::RadioState state = harness::RadioState::kCpuSleep;
      if (a.kind == ActionKind::kContend) {
        if (s.shared_backoff > 0) {
          --s.shared_backoff;
          a.kind = ActionKind::kListen;
        } else {
          a.kind = ActionKind::kTransmit;
        }
      }
      switch (a.kind) {
        case ActionKind::kTransmit: {
          Pending& p = pending_for(s, *a.cell);
          up.decorate(n, p.frame);
          if (!p.sent_once) {
            p.sent_once = true;
            up.on_first_tx(n, p.frame, asn);
          }
          attempts_.push_back({n, p.frame.id, icn::packet_bytes(p.frame.packet),
                               static_cast<std::uint8_t>(physical_channel(a.cell->channel, asn)), asn,
                               p.frame.destination});
          origins_.push_back({n, a.cell});
          sent_.push_back(p.frame);
          ++counters_.transmissions;
          state = harness::RadioState::kTx;
          break;
        }
        case ActionKind::kListen:
          listeners_.push_back({n, static_cast<std::uint8_t>(physical_channel(a.cell->channel, asn))});
          state = harness::RadioState::kRx;
          break;
        default:
          state = s.schedule.slot_used(offset) ? harness::RadioState::kSleep : harness::RadioState::kCpuSleep;
          break;
      }
      (*energy_)[n].charge(state, params_.slot_micros());
    }
  }

  void resolve() {
    resolution_ = radio::resolve_slot(attempts_, listeners_, *graph_,
                                      [this](NodeId r) -> sim::Rng& { return node(r).medium_rng; });
  }

  void deliver(sim::Asn asn, LinkUpcalls& up) {
    // Sender side first: acknowledgements, retries, drops.
    for (std::size_t i = 0; i < attempts_.size(); ++i) {
      const auto& a = attempts_[i];
      auto& s = node(a.sender);
      const Cell* cell = origins_[i].second;
      const bool shared = !cell->dedicated();
      if (resolution_.collided[i]) {
        if (shared) {
          ++counters_.shared_collisions;
        } else {
          ++counters_.collisions;
          trace_->emit(asn, a.sender, "collision", {{"slot", cell->slot}, {"channel", cell->channel}});
        }
      }
      auto& queue = queue_for(s, *cell);
      Pending& p = queue.front();
      if (shared) {
        if (resolution_.collided[i] && p.retries < params_.shared_max_retries) {
          ++p.retries;
          s.shared_backoff = static_cast<std::uint32_t>(s.mac_rng.below(s.shared_window));
          s.shared_window = std::min(s.shared_window * 2, params_.shared_max_window);
          continue;
        }
        const bool ok = !resolution_.collided[i];
        s.shared_window = params_.shared_initial_window;
        s.shared_backoff = 0;
        icn::Frame f = std::move(p.frame);
        queue.pop_front();
        up.on_tx_done(a.sender, f, ok, asn);
        continue;
      }
      if (a.broadcast()) {
        icn::Frame f = std::move(p.frame);
        queue.pop_front();
        up.on_tx_done(a.sender, f, true, asn);
        continue;
      }
      if (resolution_.delivered_to_destination[i]) {
        ++counters_.acks;
        icn::Frame f = std::move(p.frame);
        queue.pop_front();
        up.on_tx_done(a.sender, f, true, asn);
      } else if (p.retries < params_.max_retries) {
        ++p.retries;
        ++counters_.retransmissions;
        trace_->emit(asn, a.sender, "mac_retx", {{"frame", p.frame.id}, {"retry", p.retries}});
      } else {
        ++counters_.drops;
        trace_->emit(asn, a.sender, "mac_drop", {{"frame", p.frame.id}, {"to", *a.destination}});
        icn::Frame f = std::move(p.frame);
        queue.pop_front();
        up.on_tx_done(a.sender, f, false, asn);
      }
    }
    for (const auto& r : resolution_.receptions) {
      if (r.outcome != radio::Outcome::kDelivered || !r.addressed) continue;
      const auto& a = attempts_[r.attempt];
      up.on_receive(r.receiver, a.sender, sent_[r.attempt], asn);
    }
  }

  // Content cells toward/from `peer` in SSF_C: the first `count` (by slot)
  // become active, the rest inactive.
  void set_content_activation(NodeId n, icn::FaceId peer, CellRole role, std::uint32_t count) {
    if (peer == icn::kBroadcastFace || peer == icn::kAppFace) {
      throw std::logic_error("content cells cannot be activated on a broadcast face");
    }
    auto cells = node(n).schedule.face_cells(peer, CellUse::kContent, role);
    std::uint32_t i = 0;
    for (Cell* c : cells) {
      if (c->ssf != Subframe::kContent) continue;
      c->active = i++ < count;
    }
  }
  void activate_content_cells(NodeId n, icn::FaceId peer, CellRole role, std::uint32_t k) {
    set_content_activation(n, peer, role, k);
  }
  void deactivate_content_cells(NodeId n, icn::FaceId peer, CellRole role) {
    set_content_activation(n, peer, role, 0);
  }
  void set_all_content_active(bool active) {
    for (auto& [_, s] : nodes_)
      for (auto& c : s.schedule.cells())
        if (c.use == CellUse::kContent && c.ssf == Subframe::kContent) c.active = active;
  }

  ScheduleMatrix& schedule(NodeId n) { return node(n).schedule; }
  const ScheduleMatrix& schedule(NodeId n) const { return node(n).schedule; }
  NetworkSchedule schedules() const {
    NetworkSchedule out;
    for (const auto& [n, s] : nodes_) out.emplace(n, s.schedule);
    return out;
  }
  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> out;
    for (const auto& [n, _] : nodes_) out.push_back(n);
    return out;
  }

  // Drops queued unicast frames whose peer lost all cells of that use; none
  // expected with static cells, kept for safety with dynamic ones.
  std::size_t queued(NodeId n) const {
    const auto& s = node(n);
    std::size_t q = s.broadcast.size() + s.shared.size();
    for (const auto& [_, f] : s.faces) q += f.interest.size() + f.content.size();
    return q;
  }

  const std::map<LinkKey, LinkUsage>& frame_usage() const { return usage_; }
  const LinkCounters& counters() const { return counters_; }
  std::uint64_t next_frame_id() { return next_id_++; }

 private:
  struct Pending {
    icn::Frame frame;
    std::uint32_t retries = 0;
    bool sent_once = false;
  };
  struct FaceQueues {
    std::deque<Pending> interest;
    std::deque<Pending> content;
  };
  struct NodeState {
    ScheduleMatrix schedule;
    std::map<NodeId, FaceQueues> faces;
    std::deque<Pending> broadcast;
    std::deque<Pending> shared;
    std::uint32_t shared_backoff = 0;
    std::uint32_t shared_window = 2;
    sim::Rng mac_rng;
    sim::Rng medium_rng;
  };

  NodeState& node(NodeId n) {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw ConfigError("unknown node " + std::to_string(n));
    return it->second;
  }
  const NodeState& node(NodeId n) const {
    auto it = nodes_.find(n);
    if (it == nodes_.end()) throw ConfigError("unknown node " + std::to_string(n));
    return it->second;
  }

  template <typename Pred>
  static bool has_cell(const NodeState& s, Pred pred) {
    return std::any_of(s.schedule.cells().begin(), s.schedule.cells().end(), pred);
  }

  static const Pending* head_for(const NodeState& s, const Cell& c) {
    const std::deque<Pending>* q = nullptr;
    if (c.role == CellRole::kTx && c.broadcast) {
      q = &s.broadcast;
    } else if (c.role == CellRole::kTx) {
      auto it = s.faces.find(c.peer);
      if (it == s.faces.end()) return nullptr;
      q = c.use == CellUse::kContent ? &it->second.content : &it->second.interest;
    }
    return q && !q->empty() ? &q->front() : nullptr;
  }

  std::deque<Pending>& queue_for(NodeState& s, const Cell& c) {
    if (!c.dedicated()) return s.shared;
    if (c.broadcast) return s.broadcast;
    auto& f = s.faces[c.peer];
    return c.use == CellUse::kContent ? f.content : f.interest;
  }
  Pending& pending_for(NodeState& s, const Cell& c) { return queue_for(s, c).front(); }

  void count_usage(NodeId n, const NodeState& s, std::uint32_t offset, const SlotAction& a) {
    for (const Cell* c : s.schedule.at_slot(offset)) {
      if (c->role != CellRole::kTx || c->broadcast || c->use != CellUse::kInterest) continue;
      auto& u = usage_[{n, c->peer}];
      ++u.scheduled;
      if (a.kind == ActionKind::kTransmit && a.cell == c) ++u.used;
    }
  }

  const radio::ConnectivityGraph* graph_;
  MacParams params_;
  harness::EnergyLedger* energy_;
  harness::TraceLog* trace_;
  std::map<NodeId, NodeState> nodes_;
  std::map<LinkKey, LinkUsage> usage_;
  LinkCounters counters_;
  std::uint64_t next_id_ = 1u << 30;
  sim::Asn asn_ = 0;

  std::vector<radio::TransmissionAttempt> attempts_;
  std::vector<radio::Listener> listeners_;
  std::vector<std::pair<NodeId, const Cell*>> origins_;
  std::vector<icn::Frame> sent_;
  radio::SlotResolution resolution_;
};

}  // namespace icntsch::tsch

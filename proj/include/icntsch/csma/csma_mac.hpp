#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "icntsch/harness/energy.hpp"
#include "icntsch/harness/trace.hpp"
#include "icntsch/link.hpp"
#include "icntsch/radio/graph.hpp"
#include "icntsch/sim/kernel.hpp"

namespace icntsch::csma {

struct CsmaParams {
  std::uint32_t min_be = 3;
  std::uint32_t max_be = 5;
  std::uint32_t max_backoffs = 4;  // CCA failures tolerated per attempt
  std::uint32_t max_retries = 3;
  std::uint32_t ticks_per_slot = 15;
  std::uint32_t tick_micros = 1000;
  // Airtime in ticks.
  std::uint32_t interest_ticks = 2;
  std::uint32_t data_ticks = 4;
  std::uint32_t control_ticks = 2;
  std::uint32_t ack_ticks = 1;
};

enum class RadioAction : std::uint8_t { kListen, kTransmit };

// Unslotted CSMA/CA with immediate link-layer ACKs on one channel, for all
// nodes of a network. Nodes never sleep.
class CsmaMac {
 public:
  CsmaMac(const radio::ConnectivityGraph& graph, CsmaParams params, std::uint64_t seed,
          harness::EnergyLedger& energy, harness::TraceLog& trace)
      : graph_(&graph), p_(params), energy_(&energy), trace_(&trace) {
    for (NodeId n : graph.nodes()) {
      NodeState s;
      s.mac_rng = sim::make_stream(seed, n, sim::StreamPurpose::kMac);
      s.medium_rng = sim::make_stream(seed, n, sim::StreamPurpose::kMedium);
      nodes_.emplace(n, std::move(s));
    }
  }

  const CsmaParams& params() const { return p_; }

  void enqueue(NodeId n, icn::Frame f) { node(n).queue.push_back({std::move(f)}); }

  std::size_t queued(NodeId n) const { return node(n).queue.size(); }

  RadioAction last_action(NodeId n) const { return node(n).transmitting ? RadioAction::kTransmit : RadioAction::kListen; }

  std::uint64_t tick() const { return tick_; }

  void run_slot(sim::Asn asn, LinkUpcalls& up) {
    for (std::uint32_t i = 0; i < p_.ticks_per_slot; ++i) run_tick(asn, up);
  }

  void run_tick(sim::Asn asn, LinkUpcalls& up) {
    const std::uint64_t t = tick_;

    // Transmissions beginning at this tick: pending ACKs pre-empt data.
    for (auto& [n, s] : nodes_) {
      if (s.ack && s.ack->start == t) {
        start_air(n, s, icn::Frame{0, n, s.ack->to, icn::LinkAck{s.ack->frame_id}}, true, p_.ack_ticks, up, asn);
        s.ack.reset();
        if (s.phase == Phase::kTxPending) {
          s.phase = Phase::kBackoff;
          s.backoff = 0;
        }
      } else if (s.phase == Phase::kTxPending && !s.transmitting) {
        Pending& p = s.queue.front();
        up.decorate(n, p.frame);
        if (!p.sent_once) {
          p.sent_once = true;
          up.on_first_tx(n, p.frame, asn);
        }
        start_air(n, s, p.frame, false, airtime(p.frame), up, asn);
        s.phase = Phase::kTx;
      }
    }

    // Interference bookkeeping for this tick.
    for (auto& air : air_) {
      for (auto& [r, clean] : air.clean) {
        if (!clean) continue;
        const auto& rs = node(r);
        if (rs.transmitting) {
          clean = false;
          continue;
        }
        unsigned heard = 0;
        for (NodeId x : graph_->neighbors(r))
          if (node(x).transmitting) ++heard;
        if (heard > 1) clean = false;
      }
    }

    for (auto& [n, s] : nodes_) {
      (*energy_)[n].charge(s.transmitting ? harness::RadioState::kTx : harness::RadioState::kRx, p_.tick_micros);
    }

    // Clear channel assessment and backoff countdown.
    for (auto& [n, s] : nodes_) {
      if (s.transmitting || s.phase != Phase::kBackoff || (s.ack && s.ack->start <= t + 1)) continue;
      if (s.backoff > 0) {
        --s.backoff;
        continue;
      }
      bool busy = false;
      for (NodeId x : graph_->neighbors(n))
        if (node(x).transmitting) busy = true;
      if (!busy) {
        s.phase = Phase::kTxPending;
        continue;
      }
      ++s.nb;
      s.be = std::min(s.be + 1, p_.max_be);
      if (s.nb > p_.max_backoffs) {
        attempt_failed(n, s, up, asn);
      } else {
        s.backoff = draw_backoff(s);
      }
    }

    // Frames whose last tick is t.
    std::vector<Air> done;
    for (auto it = air_.begin(); it != air_.end();) {
      if (it->end == t) {
        done.push_back(std::move(*it));
        it = air_.erase(it);
      } else {
        ++it;
      }
    }
    for (auto& air : done) {
      auto& s = node(air.sender);
      s.transmitting = false;
      finish_air(air, up, asn);
    }

    // ACK timeouts.
    for (auto& [n, s] : nodes_) {
      if (s.phase == Phase::kWaitAck && s.ack_deadline == t) attempt_failed(n, s, up, asn);
    }

    // Idle nodes with work start a new attempt from the next tick.
    for (auto& [n, s] : nodes_) {
      if (s.phase == Phase::kIdle && !s.queue.empty()) begin_attempt(s);
    }
    ++tick_;
  }

  const LinkCounters& counters() const { return counters_; }

 private:
  enum class Phase : std::uint8_t { kIdle, kBackoff, kTxPending, kTx, kWaitAck };

  struct Pending {
    icn::Frame frame;
    std::uint32_t retries = 0;
    bool sent_once = false;
  };
  struct AckDue {
    NodeId to;
    std::uint64_t frame_id;
    std::uint64_t start;
  };
  struct NodeState {
    std::deque<Pending> queue;
    Phase phase = Phase::kIdle;
    std::uint32_t backoff = 0;
    std::uint32_t nb = 0;
    std::uint32_t be = 3;
    std::uint64_t ack_deadline = 0;
    bool transmitting = false;
    std::optional<AckDue> ack;
    std::map<NodeId, std::uint64_t> last_seen;  // duplicate filter by frame id
    sim::Rng mac_rng;
    sim::Rng medium_rng;
  };
  struct Air {
    NodeId sender;
    icn::Frame frame;
    bool is_ack;
    std::uint64_t end;
    std::map<NodeId, bool> clean;
  };

  NodeState& node(NodeId n) { return nodes_.at(n); }
  const NodeState& node(NodeId n) const { return nodes_.at(n); }

  std::uint32_t airtime(const icn::Frame& f) const {
    if (f.is_data()) return p_.data_ticks;
    if (std::holds_alternative<icn::Interest>(f.packet)) return p_.interest_ticks;
    return p_.control_ticks;
  }

  std::uint32_t draw_backoff(NodeState& s) {
    return static_cast<std::uint32_t>(s.mac_rng.below(std::uint64_t{1} << s.be));
  }

  void begin_attempt(NodeState& s) {
    s.phase = Phase::kBackoff;
    s.nb = 0;
    s.be = p_.min_be;
    s.backoff = draw_backoff(s);
  }

  void start_air(NodeId n, NodeState& s, const icn::Frame& f, bool is_ack, std::uint32_t ticks,
                 LinkUpcalls&, sim::Asn) {
    Air a{n, f, is_ack, tick_ + ticks - 1, {}};
    for (NodeId r : graph_->neighbors(n)) a.clean[r] = true;
    s.transmitting = true;
    if (!is_ack) ++counters_.transmissions;
    air_.push_back(std::move(a));
  }

  bool survives(const Air& a, NodeId r) {
    auto it = a.clean.find(r);
    if (it == a.clean.end() || !it->second) return false;
    return !node(r).medium_rng.bernoulli(graph_->loss(a.sender, r, 0));
  }

  void finish_air(const Air& a, LinkUpcalls& up, sim::Asn asn) {
    if (a.is_ack) {
      const NodeId to = *a.frame.destination;
      auto& s = node(to);
      const auto acked = std::get<icn::LinkAck>(a.frame.packet).frame_id;
      if (s.phase == Phase::kWaitAck && !s.queue.empty() && s.queue.front().frame.id == acked &&
          survives(a, to)) {
        ++counters_.acks;
        icn::Frame f = std::move(s.queue.front().frame);
        s.queue.pop_front();
        s.phase = Phase::kIdle;
        up.on_tx_done(to, f, true, asn);
      }
      return;
    }
    auto& snd = node(a.sender);
    if (a.frame.broadcast()) {
      std::vector<NodeId> got;
      for (const auto& [r, _] : a.clean)
        if (survives(a, r)) got.push_back(r);
      icn::Frame f = std::move(snd.queue.front().frame);
      snd.queue.pop_front();
      snd.phase = Phase::kIdle;
      up.on_tx_done(a.sender, f, true, asn);
      for (NodeId r : got) up.on_receive(r, a.sender, a.frame, asn);
      return;
    }
    snd.phase = Phase::kWaitAck;
    snd.ack_deadline = tick_ + 1 + p_.ack_ticks;
    const NodeId d = *a.frame.destination;
    if (!survives(a, d)) return;
    auto& ds = node(d);
    ds.ack = AckDue{a.sender, a.frame.id, tick_ + 1};
    auto [it, fresh] = ds.last_seen.try_emplace(a.sender, a.frame.id);
    if (!fresh && it->second == a.frame.id) return;  // retransmission of a frame already taken
    it->second = a.frame.id;
    up.on_receive(d, a.sender, a.frame, asn);
  }

  void attempt_failed(NodeId n, NodeState& s, LinkUpcalls& up, sim::Asn asn) {
    Pending& p = s.queue.front();
    if (p.retries < p_.max_retries) {
      ++p.retries;
      ++counters_.retransmissions;
      trace_->emit(asn, n, "mac_retx", {{"frame", p.frame.id}, {"retry", p.retries}});
      begin_attempt(s);
      return;
    }
    ++counters_.drops;
    trace_->emit(asn, n, "mac_drop", {{"frame", p.frame.id}, {"to", p.frame.destination.value_or(kNoNode)}});
    icn::Frame f = std::move(p.frame);
    s.queue.pop_front();
    s.phase = Phase::kIdle;
    up.on_tx_done(n, f, false, asn);
  }

  const radio::ConnectivityGraph* graph_;
  CsmaParams p_;
  harness::EnergyLedger* energy_;
  harness::TraceLog* trace_;
  std::map<NodeId, NodeState> nodes_;
  std::vector<Air> air_;
  std::uint64_t tick_ = 0;
  LinkCounters counters_;
};

}  // namespace icntsch::csma

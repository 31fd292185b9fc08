#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "icntsch/radio/graph.hpp"
#include "icntsch/sim/kernel.hpp"

namespace icntsch::radio {

struct TransmissionAttempt {
  NodeId sender = kNoNode;
  std::uint64_t frame_id = 0;
  std::uint32_t bytes = 0;
  std::uint8_t channel = 0;  // physical channel
  sim::Asn asn = 0;
  std::optional<NodeId> destination;  // nullopt: broadcast

  bool broadcast() const { return !destination.has_value(); }
};

struct Listener {
  NodeId node = kNoNode;
  std::uint8_t channel = 0;
};

enum class Outcome : std::uint8_t { kDelivered, kCollision, kChannelLoss };

// What one listener observed from one in-range attempt.
struct Reception {
  NodeId receiver = kNoNode;
  std::size_t attempt = 0;  // index into the attempt span
  Outcome outcome = Outcome::kDelivered;
  // True when the receiver is the frame's destination or the frame is a
  // broadcast.
  bool addressed = false;
};

struct SlotResolution {
  std::vector<Reception> receptions;
  // Per attempt: unicast destination received the frame.
  std::vector<bool> delivered_to_destination;
  // Per attempt: some listener experienced a collision involving it.
  std::vector<bool> collided;
  std::size_t collision_events = 0;
};

// Resolves one slot on the graph medium. A listener hears an attempt iff the
// sender is adjacent, channels match, it is the only in-range transmission on
// that channel, and the per-edge loss draw succeeds. Nodes that transmit in
// this slot do not receive. No capture effect.
//
// `rng_for(receiver)` supplies the receiver's medium stream; it is only drawn
// from when the edge loss is strictly between 0 and 1.
template <typename RngFor>
SlotResolution resolve_slot(std::span<const TransmissionAttempt> attempts,
                            std::span<const Listener> listeners,
                            const ConnectivityGraph& graph, RngFor&& rng_for) {
  SlotResolution out;
  out.delivered_to_destination.assign(attempts.size(), false);
  out.collided.assign(attempts.size(), false);

  std::vector<std::size_t> in_range;
  for (const Listener& l : listeners) {
    bool transmitting = false;
    for (const auto& a : attempts) {
      if (a.sender == l.node) {
        transmitting = true;
        break;
      }
    }
    if (transmitting) continue;

    in_range.clear();
    for (std::size_t i = 0; i < attempts.size(); ++i) {
      const auto& a = attempts[i];
      if (a.channel == l.channel && graph.adjacent(a.sender, l.node)) in_range.push_back(i);
    }
    if (in_range.empty()) continue;

    if (in_range.size() > 1) {
      ++out.collision_events;
      for (std::size_t i : in_range) {
        out.collided[i] = true;
        const auto& a = attempts[i];
        out.receptions.push_back(
            {l.node, i, Outcome::kCollision, a.broadcast() || *a.destination == l.node});
      }
      continue;
    }

    const std::size_t i = in_range.front();
    const auto& a = attempts[i];
    const double p = graph.loss(a.sender, l.node, a.channel);
    bool lost = false;
    if (p >= 1.0) {
      lost = true;
    } else if (p > 0.0) {
      lost = rng_for(l.node).bernoulli(p);
    }
    const bool addressed = a.broadcast() || *a.destination == l.node;
    out.receptions.push_back({l.node, i, lost ? Outcome::kChannelLoss : Outcome::kDelivered,
                              addressed});
    if (!lost && !a.broadcast() && *a.destination == l.node) out.delivered_to_destination[i] = true;
  }
  return out;
}

inline SlotResolution resolve_slot(std::span<const TransmissionAttempt> attempts,
                                   std::span<const Listener> listeners,
                                   const ConnectivityGraph& graph, sim::Rng& rng) {
  return resolve_slot(attempts, listeners, graph, [&rng](NodeId) -> sim::Rng& { return rng; });
}

}  // namespace icntsch::radio

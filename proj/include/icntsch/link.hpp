#pragma once

#include "icntsch/icn/packet.hpp"
#include "icntsch/sim/kernel.hpp"

namespace icntsch {

// What a MAC reports back to the node stack.
class LinkUpcalls {
 public:
  virtual ~LinkUpcalls() = default;
  virtual void on_receive(NodeId at, NodeId from, const icn::Frame& frame, sim::Asn asn) = 0;
  // First time the frame goes on air.
  virtual void on_first_tx(NodeId /*at*/, const icn::Frame& /*frame*/, sim::Asn /*asn*/) {}
  // Unicast: acknowledged (true) or dropped after the retry budget. Broadcast:
  // sent (true) or given up on (false).
  virtual void on_tx_done(NodeId /*at*/, const icn::Frame& /*frame*/, bool /*delivered*/, sim::Asn /*asn*/) {}
  // Last chance to stamp a frame right before transmission.
  virtual void decorate(NodeId /*at*/, icn::Frame& /*frame*/) {}
};

struct LinkCounters {
  std::uint64_t transmissions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t drops = 0;
  std::uint64_t collisions = 0;         // on dedicated resources
  std::uint64_t shared_collisions = 0;  // contention on shared cells
  std::uint64_t acks = 0;
};

}  // namespace icntsch

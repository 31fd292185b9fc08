#pragma once

#include <algorithm>
#include <vector>

#include "icntsch/icn/fib.hpp"
#include "icntsch/icn/packet.hpp"
#include "icntsch/routing/dodag.hpp"

namespace icntsch::routing {

struct ForwardDecision {
  icn::Direction direction = icn::Direction::kUp;
  std::vector<icn::FaceId> faces;
  bool dead_end() const { return faces.empty(); }
};

// Up/down forwarding on the tree. `arrived_from` is excluded from the
// candidate children so an Interest is never bounced back.
inline ForwardDecision forward_decision(const Dodag& dodag, NodeId node, icn::Direction direction,
                                        const icn::BimodalFib& fib, const icn::Name& name,
                                        icn::FaceId arrived_from) {
  std::vector<icn::FaceId> children;
  for (NodeId c : dodag.children(node))
    if (c != arrived_from) children.push_back(c);

  ForwardDecision out;
  if (direction == icn::Direction::kDown) {
    out.direction = icn::Direction::kDown;
    out.faces = icn::fib_lookup(fib, name, children).faces;
    return out;
  }
  if (dodag.is_root(node)) {
    out.direction = icn::Direction::kDown;
    out.faces = icn::fib_lookup(fib, name, children).faces;
    return out;
  }
  auto hit = icn::fib_lookup(fib, name, children);
  if (hit.positive) {
    out.direction = icn::Direction::kDown;
    out.faces = std::move(hit.faces);
    return out;
  }
  out.direction = icn::Direction::kUp;
  out.faces = {dodag.parent(node)};
  return out;
}

}  // namespace icntsch::routing

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icntsch/adapt/bitfield.hpp"
#include "icntsch/icn/name.hpp"

namespace icntsch::icn {

enum class Direction : std::uint8_t { kUp, kDown };

struct Interest {
  Name name;
  std::uint64_t nonce = 0;
  Direction direction = Direction::kUp;
  std::optional<adapt::ScheduleBitfield> piggyback;
};

struct DataChunk {
  Name name;
  std::uint32_t index = 0;
  std::uint32_t payload_bytes = 64;
  std::optional<adapt::ScheduleBitfield> piggyback;
};

// Name advertisement, travels child to parent up to the root.
struct Nam {
  Name prefix;
  NodeId origin = kNoNode;
};

struct Dio {
  NodeId root = kNoNode;
  std::uint32_t rank = 0;
  std::vector<NodeId> neighbors;
};

struct Dao {
  NodeId child = kNoNode;
  std::vector<NodeId> neighbors;
};

struct Beacon {
  std::uint64_t asn = 0;
};

struct LinkAck {
  std::uint64_t frame_id = 0;
};

struct ReconfigAlert {
  NodeId origin = kNoNode;
};

using Packet = std::variant<Interest, DataChunk, Nam, Dio, Dao, Beacon, LinkAck, ReconfigAlert>;

inline const char* packet_kind(const Packet& p) {
  static constexpr const char* kNames[] = {"interest", "data", "nam",  "dio",
                                           "dao",      "beacon", "ack", "reconfig"};
  return kNames[p.index()];
}

inline std::uint32_t name_bytes(const Name& n) {
  std::uint32_t b = 2;
  for (const auto& c : n.components()) b += 2 + static_cast<std::uint32_t>(c.size());
  return b;
}

// Rough on-air size in bytes; only used for accounting.
inline std::uint32_t packet_bytes(const Packet& p) {
  constexpr std::uint32_t kMacHeader = 23;
  struct Size {
    std::uint32_t operator()(const Interest& i) const {
      return name_bytes(i.name) + 10 + (i.piggyback ? 2u * 101u * 2u : 0u);
    }
    std::uint32_t operator()(const DataChunk& d) const { return name_bytes(d.name) + d.payload_bytes; }
    std::uint32_t operator()(const Nam& n) const { return name_bytes(n.prefix) + 2; }
    std::uint32_t operator()(const Dio& d) const { return 8 + 2 * static_cast<std::uint32_t>(d.neighbors.size()); }
    std::uint32_t operator()(const Dao& d) const { return 4 + 2 * static_cast<std::uint32_t>(d.neighbors.size()); }
    std::uint32_t operator()(const Beacon&) const { return 12; }
    std::uint32_t operator()(const LinkAck&) const { return 0; }
    std::uint32_t operator()(const ReconfigAlert&) const { return 4; }
  };
  return kMacHeader + std::visit(Size{}, p);
}

// A packet handed to a MAC. `destination` empty means broadcast.
struct Frame {
  std::uint64_t id = 0;
  NodeId source = kNoNode;
  std::optional<NodeId> destination;
  Packet packet;

  bool broadcast() const { return !destination.has_value(); }
  bool is_interest_class() const {
    return std::holds_alternative<Interest>(packet) || std::holds_alternative<Nam>(packet) ||
           std::holds_alternative<Dao>(packet);
  }
  bool is_data() const { return std::holds_alternative<DataChunk>(packet); }
};

}  // namespace icntsch::icn

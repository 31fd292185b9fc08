#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icntsch/adapt/bitfield.hpp"
#include "icntsch/common.hpp"

namespace icntsch::tsch {

enum class CellRole : std::uint8_t { kTx, kRx, kShared };
enum class Subframe : std::uint8_t { kBroadcast, kInterest, kContent, kDynamic };
enum class CellUse : std::uint8_t { kInterest, kContent, kBroadcast };

// 0-based indexing: the global broadcast cell is (slot 0, channel 0).
struct Cell {
  std::uint32_t slot = 0;
  std::uint8_t channel = 0;
  CellRole role = CellRole::kShared;
  bool broadcast = false;  // node-scheduled broadcast TX, or its RX mirror
  NodeId peer = kNoNode;   // kNoNode for BTX and shared cells
  Subframe ssf = Subframe::kBroadcast;
  CellUse use = CellUse::kBroadcast;
  bool active = true;
  std::uint32_t k = 1;
  // Content cells: slot/channel of the Interest cell they mirror.
  std::optional<std::pair<std::uint32_t, std::uint8_t>> derived_from;
  std::uint64_t burst = 0;  // 0 for static cells

  bool dedicated() const { return role != CellRole::kShared; }
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline const char* role_token(const Cell& c) {
  switch (c.role) {
    case CellRole::kTx: return c.broadcast ? "BTX" : "TX";
    case CellRole::kRx: return c.broadcast ? "BRX" : "RX";
    case CellRole::kShared: return "SHARED";
  }
  return "?";
}

inline const char* ssf_token(Subframe s) {
  switch (s) {
    case Subframe::kBroadcast: return "B";
    case Subframe::kInterest: return "I";
    case Subframe::kContent: return "C";
    case Subframe::kDynamic: return "DYN";
  }
  return "?";
}

// Slot 0 | Interest slots | content slots | dynamic slots.
struct Partition {
  std::uint32_t length = 101;
  std::uint32_t len_i = 20;
  std::uint32_t len_c = 20;

  std::uint32_t len_dyn() const { return length - 1 - len_i - len_c; }
  std::uint32_t begin(Subframe s) const {
    switch (s) {
      case Subframe::kBroadcast: return 0;
      case Subframe::kInterest: return 1;
      case Subframe::kContent: return 1 + len_i;
      case Subframe::kDynamic: return 1 + len_i + len_c;
    }
    return 0;
  }
  std::uint32_t end(Subframe s) const {
    switch (s) {
      case Subframe::kBroadcast: return 1;
      case Subframe::kInterest: return 1 + len_i;
      case Subframe::kContent: return 1 + len_i + len_c;
      case Subframe::kDynamic: return length;
    }
    return 0;
  }
  bool contains(Subframe s, std::uint32_t slot) const { return slot >= begin(s) && slot < end(s); }
  Subframe subframe_of(std::uint32_t slot) const {
    if (slot == 0) return Subframe::kBroadcast;
    if (slot < end(Subframe::kInterest)) return Subframe::kInterest;
    if (slot < end(Subframe::kContent)) return Subframe::kContent;
    return Subframe::kDynamic;
  }

  void validate() const {
    if (length < 3) throw ConfigError("slotframe length must be >= 3");
    if (len_i == 0 || len_c == 0) throw ConfigError("Interest and content subframes need >= 1 slot");
    if (1 + len_i + len_c > length) throw ConfigError("subframes exceed slotframe length");
  }
};

// One node's cells. A (slot, channel) position holds at most one cell.
class ScheduleMatrix {
 public:
  ScheduleMatrix() = default;
  ScheduleMatrix(NodeId owner, Partition partition) : owner_(owner), partition_(partition) {}

  NodeId owner() const { return owner_; }
  const Partition& partition() const { return partition_; }

  void add(Cell c) {
    if (c.slot >= partition_.length || c.channel >= kNumChannels) {
      throw std::logic_error("cell outside slotframe on node " + std::to_string(owner_));
    }
    if (find(c.slot, c.channel)) {
      throw std::logic_error("node " + std::to_string(owner_) + " already has a cell at (" +
                             std::to_string(c.slot) + "," + std::to_string(c.channel) + ")");
    }
    auto pos = std::upper_bound(cells_.begin(), cells_.end(), c, [](const Cell& a, const Cell& b) {
      return std::pair{a.slot, a.channel} < std::pair{b.slot, b.channel};
    });
    cells_.insert(pos, std::move(c));
  }

  const Cell* find(std::uint32_t slot, unsigned channel) const {
    for (const auto& c : cells_)
      if (c.slot == slot && c.channel == channel) return &c;
    return nullptr;
  }
  Cell* find(std::uint32_t slot, unsigned channel) {
    for (auto& c : cells_)
      if (c.slot == slot && c.channel == channel) return &c;
    return nullptr;
  }

  std::vector<const Cell*> at_slot(std::uint32_t slot) const {
    std::vector<const Cell*> out;
    for (const auto& c : cells_)
      if (c.slot == slot) out.push_back(&c);
    return out;
  }
  bool slot_used(std::uint32_t slot) const {
    return std::any_of(cells_.begin(), cells_.end(), [slot](const Cell& c) { return c.slot == slot; });
  }

  std::size_t remove_burst(std::uint64_t burst) {
    auto n = cells_.size();
    std::erase_if(cells_, [burst](const Cell& c) { return c.burst == burst; });
    return n - cells_.size();
  }

  const std::vector<Cell>& cells() const { return cells_; }
  std::vector<Cell>& cells() { return cells_; }

  adapt::CellBitmap bitmap() const {
    adapt::CellBitmap b(partition_.length);
    for (const auto& c : cells_) b.set(c.slot, c.channel);
    return b;
  }

  // Cells of one face (unicast peer) by use and role.
  std::vector<Cell*> face_cells(NodeId peer, CellUse use, CellRole role) {
    std::vector<Cell*> out;
    for (auto& c : cells_)
      if (!c.broadcast && c.peer == peer && c.use == use && c.role == role) out.push_back(&c);
    return out;
  }

 private:
  NodeId owner_ = kNoNode;
  Partition partition_;
  std::vector<Cell> cells_;  // sorted by (slot, channel)
};

using NetworkSchedule = std::map<NodeId, ScheduleMatrix>;

// Physical channel for a cell at this asn.
inline unsigned physical_channel(unsigned channel_offset, std::uint64_t asn) {
  return static_cast<unsigned>((channel_offset + asn) % kNumChannels);
}

}  // namespace icntsch::tsch

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "icntsch/common.hpp"

namespace icntsch::adapt {

// Occupancy bitmap over (slot offset, channel offset); slots * 16 bits.
class CellBitmap {
 public:
  CellBitmap() = default;
  explicit CellBitmap(std::uint32_t slots) : slots_(slots), words_((slots * kNumChannels + 63) / 64) {}

  std::uint32_t slots() const { return slots_; }
  std::size_t bit_count() const { return static_cast<std::size_t>(slots_) * kNumChannels; }

  void set(std::uint32_t slot, unsigned channel) {
    auto i = index(slot, channel);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  bool test(std::uint32_t slot, unsigned channel) const {
    if (slot >= slots_) return false;
    auto i = index(slot, channel);
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  CellBitmap& operator|=(const CellBitmap& o) {
    if (words_.size() < o.words_.size()) {
      words_.resize(o.words_.size());
      slots_ = o.slots_;
    }
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  friend bool operator==(const CellBitmap&, const CellBitmap&) = default;

 private:
  std::size_t index(std::uint32_t slot, unsigned channel) const {
    return static_cast<std::size_t>(slot) * kNumChannels + channel;
  }

  std::uint32_t slots_ = 0;
  std::vector<std::uint64_t> words_;
};

// What a node advertises about its schedule: its own cells and the union of
// the cells of its 1-hop neighbors as it currently knows them.
struct ScheduleBitfield {
  NodeId owner = kNoNode;
  CellBitmap own;
  CellBitmap neighbors;

  friend bool operator==(const ScheduleBitfield&, const ScheduleBitfield&) = default;
};

// A node's view of the schedules around it, keyed by the advertising neighbor.
class NeighborKnowledge {
 public:
  void merge(const ScheduleBitfield& bf) { table_[bf.owner] = bf; }

  const ScheduleBitfield* find(NodeId n) const {
    auto it = table_.find(n);
    return it == table_.end() ? nullptr : &it->second;
  }

  // Union of everything known within two hops.
  CellBitmap occupied(std::uint32_t slots) const {
    CellBitmap out(slots);
    for (const auto& [_, bf] : table_) {
      out |= bf.own;
      out |= bf.neighbors;
    }
    return out;
  }

  // Union of the neighbors' own bitmaps (what this node forwards as its
  // 1-hop union).
  CellBitmap neighbor_union(std::uint32_t slots) const {
    CellBitmap out(slots);
    for (const auto& [_, bf] : table_) out |= bf.own;
    return out;
  }

  std::size_t size() const { return table_.size(); }

 private:
  std::map<NodeId, ScheduleBitfield> table_;
};

}  // namespace icntsch::adapt

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "icntsch/icn/name.hpp"

namespace icntsch::icn {

// Faces are named by the neighbor they lead to; the local application and
// the broadcast face use reserved ids.
using FaceId = NodeId;
inline constexpr FaceId kAppFace = kNoNode - 1;
inline constexpr FaceId kBroadcastFace = kNoNode - 2;

enum class FibMode : std::uint8_t { kInclude, kExclude };

struct BimodalFibEntry {
  Name prefix;
  FaceId face = 0;
  FibMode mode = FibMode::kInclude;
};

struct FibLookup {
  std::vector<FaceId> faces;  // sorted
  // At least one face had an INCLUDE entry as its longest match.
  bool positive = false;
};

// Prefix table whose (prefix, face) entries carry include or exclude mode.
// Capacity-bounded tables evict the least recently used entry.
class BimodalFib {
 public:
  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

  explicit BimodalFib(std::size_t capacity = kUnlimited) : capacity_(capacity) {}

  // Inserts or updates. Returns false when the table has no room (capacity 0).
  bool insert(const Name& prefix, FaceId face, FibMode mode, std::uint64_t now = 0) {
    auto key = std::pair{prefix, face};
    if (auto it = entries_.find(key); it != entries_.end()) {
      it->second.mode = mode;
      it->second.last_used = now;
      return true;
    }
    if (capacity_ == 0) return false;
    if (entries_.size() >= capacity_) evict_lru();
    entries_.emplace(key, Slot{mode, now, insert_seq_++});
    return true;
  }

  bool erase(const Name& prefix, FaceId face) { return entries_.erase({prefix, face}) > 0; }

  std::optional<FibMode> mode_of(const Name& prefix, FaceId face) const {
    auto it = entries_.find({prefix, face});
    if (it == entries_.end()) return std::nullopt;
    return it->second.mode;
  }

  // Marks every entry that participates in the lookup of `name` as used.
  void touch(const Name& name, std::uint64_t now) {
    for (auto& [key, slot] : entries_)
      if (key.first.is_prefix_of(name)) slot.last_used = now;
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }

  std::vector<BimodalFibEntry> entries() const {
    std::vector<BimodalFibEntry> out;
    for (const auto& [key, slot] : entries_) out.push_back({key.first, key.second, slot.mode});
    return out;
  }

  // Longest matching entry of `name` on `face`, if any.
  std::optional<FibMode> decision(const Name& name, FaceId face) const {
    std::optional<FibMode> best;
    std::size_t best_len = 0;
    for (const auto& [key, slot] : entries_) {
      if (key.second != face || !key.first.is_prefix_of(name)) continue;
      if (!best || key.first.size() > best_len) {
        best = slot.mode;
        best_len = key.first.size();
      }
    }
    return best;
  }

 private:
  struct Slot {
    FibMode mode;
    std::uint64_t last_used;
    std::uint64_t seq;
  };

  void evict_lru() {
    auto victim = entries_.begin();
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (std::tie(it->second.last_used, it->second.seq) <
          std::tie(victim->second.last_used, victim->second.seq)) {
        victim = it;
      }
    }
    if (victim != entries_.end()) entries_.erase(victim);
  }

  std::size_t capacity_;
  std::map<std::pair<Name, FaceId>, Slot> entries_;
  std::uint64_t insert_seq_ = 0;
};

// Per face, the mode of the longest matching prefix decides. If any face is
// INCLUDE-matched, exactly the INCLUDE faces are returned; otherwise every
// face except the EXCLUDE-matched ones (an empty FIB floods).
inline FibLookup fib_lookup(const BimodalFib& fib, const Name& name,
                            std::span<const FaceId> faces) {
  std::vector<FaceId> include, open;
  for (FaceId f : faces) {
    auto d = fib.decision(name, f);
    if (!d) {
      open.push_back(f);
    } else if (*d == FibMode::kInclude) {
      include.push_back(f);
      open.push_back(f);
    }
  }
  FibLookup out;
  out.positive = !include.empty();
  out.faces = out.positive ? std::move(include) : std::move(open);
  std::sort(out.faces.begin(), out.faces.end());
  out.faces.erase(std::unique(out.faces.begin(), out.faces.end()), out.faces.end());
  return out;
}

}  // namespace icntsch::icn

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "icntsch/icn/fib.hpp"
#include "icntsch/icn/name.hpp"

namespace icntsch::icn {

struct PitEntry {
  Name name;
  std::set<FaceId> in_faces;
  std::set<FaceId> out_faces;
  std::uint64_t expiry = 0;  // asn
  std::uint64_t created = 0;
};

// At most one entry per name.
class PitTable {
 public:
  PitEntry* find(const Name& name) {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }
  const PitEntry* find(const Name& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }

  PitEntry& insert(const Name& name, FaceId in_face, std::uint64_t now, std::uint64_t expiry) {
    auto [it, fresh] = entries_.try_emplace(name);
    if (fresh) {
      it->second.name = name;
      it->second.created = now;
    }
    it->second.in_faces.insert(in_face);
    it->second.expiry = std::max(it->second.expiry, expiry);
    return it->second;
  }

  bool erase(const Name& name) { return entries_.erase(name) > 0; }

  // Removes and returns the entries whose expiry is <= now.
  std::vector<PitEntry> expire(std::uint64_t now) {
    std::vector<PitEntry> out;
    for (auto it = entries_.begin(); it != entries_.end();) {
      if (it->second.expiry <= now) {
        out.push_back(std::move(it->second));
        it = entries_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<Name, PitEntry> entries_;
};

}  // namespace icntsch::icn

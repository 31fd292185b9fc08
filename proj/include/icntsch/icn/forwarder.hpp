#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "icntsch/icn/fib.hpp"
#include "icntsch/icn/packet.hpp"
#include "icntsch/icn/pit.hpp"
#include "icntsch/routing/dodag.hpp"
#include "icntsch/routing/strategy.hpp"

namespace icntsch::icn {

struct Send {
  FaceId face = 0;
  Packet packet;
};

enum class InterestOutcome : std::uint8_t {
  kDuplicateNonce,
  kAggregated,
  kProduced,
  kForwarded,
  kReforwarded,
  kDeadEnd,
};

struct InterestResult {
  InterestOutcome outcome = InterestOutcome::kDeadEnd;
  std::vector<Send> sends;
};

struct DataResult {
  // No pending entry: duplicate or unsolicited chunk, dropped.
  bool unsolicited = false;
  std::vector<Send> sends;  // kAppFace marks local delivery
  std::optional<PitEntry> satisfied;
};

struct NamResult {
  bool installed = false;
  std::vector<Send> sends;
};

// Chunk index carried in the last name component, if numeric.
inline std::optional<std::uint32_t> chunk_index(const Name& name) {
  if (name.empty()) return std::nullopt;
  const auto& s = name.back();
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Per-node NDN engine: nonce filter, PIT, bimodal FIB and the tree strategy.
class Forwarder {
 public:
  Forwarder(NodeId self, const routing::Dodag* dodag, std::size_t fib_capacity,
            std::uint64_t pit_lifetime)
      : self_(self), dodag_(dodag), fib_(fib_capacity), pit_lifetime_(pit_lifetime) {}

  NodeId self() const { return self_; }
  BimodalFib& fib() { return fib_; }
  const BimodalFib& fib() const { return fib_; }
  PitTable& pit() { return pit_; }
  const PitTable& pit() const { return pit_; }
  std::uint64_t pit_lifetime() const { return pit_lifetime_; }

  void add_producer_prefix(Name prefix) { produced_.push_back(std::move(prefix)); }
  const std::vector<Name>& producer_prefixes() const { return produced_; }
  bool produces(const Name& name) const {
    for (const auto& p : produced_)
      if (p.is_prefix_of(name)) return true;
    return false;
  }

  InterestResult on_interest(const Interest& interest, FaceId in, std::uint64_t now) {
    InterestResult out;
    if (!seen_nonces_.insert(interest.nonce).second) {
      out.outcome = InterestOutcome::kDuplicateNonce;
      return out;
    }
    fib_.touch(interest.name, now);

    if (produces(interest.name)) {
      DataChunk d;
      d.name = interest.name;
      d.index = chunk_index(interest.name).value_or(0);
      out.outcome = InterestOutcome::kProduced;
      out.sends.push_back({in, d});
      return out;
    }

    bool refresh = false;
    if (PitEntry* e = pit_.find(interest.name)) {
      if (!e->in_faces.count(in)) {
        e->in_faces.insert(in);
        out.outcome = InterestOutcome::kAggregated;
        return out;
      }
      // Same downstream asks again with a fresh nonce: it gave up waiting.
      refresh = true;
    }

    auto decision = routing::forward_decision(*dodag_, self_, interest.direction, fib_, interest.name,
                                              in);
    if (decision.dead_end()) {
      if (!refresh) ++dead_ends_;
      out.outcome = InterestOutcome::kDeadEnd;
      return out;
    }
    // The lifetime clock starts once the Interest is on air (see refresh);
    // until then the entry waits for the MAC queue.
    PitEntry& e = pit_.insert(interest.name, in, now, kHeld);
    if (refresh) e.expiry = kHeld;
    for (FaceId f : decision.faces) {
      Interest copy = interest;
      copy.direction = decision.direction;
      copy.piggyback.reset();
      e.out_faces.insert(f);
      out.sends.push_back({f, std::move(copy)});
    }
    out.outcome = refresh ? InterestOutcome::kReforwarded : InterestOutcome::kForwarded;
    return out;
  }

  DataResult on_data(const DataChunk& chunk, FaceId /*in*/, std::uint64_t /*now*/) {
    DataResult out;
    PitEntry* e = pit_.find(chunk.name);
    if (!e) {
      out.unsolicited = true;
      ++unsolicited_;
      return out;
    }
    for (FaceId f : e->in_faces) {
      DataChunk copy = chunk;
      copy.piggyback.reset();
      out.sends.push_back({f, std::move(copy)});
    }
    out.satisfied = std::move(*e);
    pit_.erase(chunk.name);
    return out;
  }

  // Called when the Interest first leaves the node: the entry now lives for
  // one lifetime.
  void refresh(const Name& name, std::uint64_t now) {
    if (PitEntry* e = pit_.find(name); e && e->expiry == kHeld) e->expiry = now + pit_lifetime_;
  }

  static constexpr std::uint64_t kHeld = std::numeric_limits<std::uint64_t>::max();

  std::vector<PitEntry> expire(std::uint64_t now) { return pit_.expire(now); }

  // Installs the advertised route toward `from` and passes the NAM upward.
  NamResult on_nam(const Nam& nam, FaceId from, std::uint64_t now) {
    NamResult out;
    out.installed = fib_.insert(nam.prefix, from, FibMode::kInclude, now);
    nam_children_.insert(from);
    if (!dodag_->is_root(self_)) out.sends.push_back({dodag_->parent(self_), nam});
    return out;
  }

  // Children that never advertised anything get `exclude *`.
  void exclude_silent_children(std::uint64_t now) {
    for (NodeId c : dodag_->children(self_))
      if (!nam_children_.count(c)) fib_.insert(Name{}, c, FibMode::kExclude, now);
  }

  std::uint64_t dead_ends() const { return dead_ends_; }
  std::uint64_t unsolicited() const { return unsolicited_; }

 private:
  NodeId self_;
  const routing::Dodag* dodag_;
  BimodalFib fib_;
  PitTable pit_;
  std::uint64_t pit_lifetime_;
  std::set<std::uint64_t> seen_nonces_;
  std::vector<Name> produced_;
  std::set<FaceId> nam_children_;
  std::uint64_t dead_ends_ = 0;
  std::uint64_t unsolicited_ = 0;
};

}  // namespace icntsch::icn

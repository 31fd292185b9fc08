#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "icntsch/common.hpp"

namespace icntsch::sim {

using Asn = std::uint64_t;

// Fixed ordering of work inside one timeslot.
enum class Phase : std::uint8_t {
  kTxDecision = 0,
  kMediumResolution = 1,
  kRxDelivery = 2,
  kBookkeeping = 3,
};

// Slot-quantized simulation time. Wall-clock time is asn * slot_ms exactly.
struct SimTime {
  Asn asn = 0;
  double slot_ms = 15.0;

  double millis() const { return static_cast<double>(asn) * slot_ms; }
  double seconds() const { return millis() / 1000.0; }
};

struct SlotPosition {
  std::uint64_t frame = 0;
  std::uint32_t offset = 0;
  friend bool operator==(const SlotPosition&, const SlotPosition&) = default;
};

inline SlotPosition slotframe_index(Asn asn, std::uint32_t slotframe_length) {
  if (slotframe_length == 0) throw ConfigError("slotframe length must be >= 1");
  return {asn / slotframe_length, static_cast<std::uint32_t>(asn % slotframe_length)};
}

struct EventHandle {
  Asn asn = 0;
  Phase phase = Phase::kTxDecision;
  std::uint64_t seq = 0;

  friend bool operator<(const EventHandle& a, const EventHandle& b) {
    return std::tie(a.asn, a.phase, a.seq) < std::tie(b.asn, b.phase, b.seq);
  }
  friend bool operator==(const EventHandle&, const EventHandle&) = default;
};

// Deterministic discrete-event engine. Events at equal (asn, phase) run in
// insertion order.
class Simulator {
 public:
  using Action = std::function<void()>;

  EventHandle schedule(Asn asn, Phase phase, Action action) {
    EventHandle h{asn, phase, next_seq_++};
    if (dispatched_any_ && h < current_) {
      throw std::logic_error("event scheduled in the past (asn " + std::to_string(asn) +
                             ", now " + std::to_string(current_.asn) + ")");
    }
    queue_.emplace(h, std::move(action));
    return h;
  }

  // Returns false when the event already ran or was cancelled.
  bool cancel(const EventHandle& h) { return queue_.erase(h) > 0; }

  // Dispatches every event with asn < end. Returns the asn of the last
  // dispatched event, or the current asn when nothing ran.
  Asn run_until(Asn end) {
    while (!queue_.empty() && queue_.begin()->first.asn < end) dispatch_next();
    return now();
  }

  // Dispatches events until `done` holds after an event or the queue drains.
  template <typename Pred>
  Asn run_until(Pred done) {
    if (done()) return now();
    while (!queue_.empty()) {
      dispatch_next();
      if (done()) break;
    }
    return now();
  }

  Asn now() const { return current_.asn; }
  Phase phase() const { return current_.phase; }
  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t dispatched() const { return dispatched_count_; }

 private:
  void dispatch_next() {
    auto node = queue_.extract(queue_.begin());
    current_ = node.key();
    dispatched_any_ = true;
    ++dispatched_count_;
    node.mapped()();
  }

  std::map<EventHandle, Action> queue_;
  EventHandle current_{};
  bool dispatched_any_ = false;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_count_ = 0;
};

// Seeded random stream. All stochastic choices in a run draw from streams
// derived from (global seed, node id, purpose).
class Rng {
 public:
  Rng() : engine_(0) {}
  explicit Rng(std::uint64_t seed, std::uint32_t stream = 0, std::uint32_t purpose = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream, purpose, 0x1c9u};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

 private:
  std::mt19937_64 engine_;
};

enum class StreamPurpose : std::uint32_t {
  kMac = 1,
  kMedium = 2,
  kApp = 3,
  kTopology = 4,
};

inline Rng make_stream(std::uint64_t seed, NodeId node, StreamPurpose purpose) {
  return Rng(seed, node, static_cast<std::uint32_t>(purpose));
}

}  // namespace icntsch::sim

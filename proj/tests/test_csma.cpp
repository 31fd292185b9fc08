#include <gtest/gtest.h>

#include <map>
#include <set>

#include "icntsch/csma/csma_mac.hpp"

using namespace icntsch;

namespace {

struct Recorder : LinkUpcalls {
  std::vector<std::pair<NodeId, std::uint64_t>> rx;  // (receiver, frame id)
  std::map<std::uint64_t, bool> done;
  std::vector<std::uint64_t> first;
  void on_receive(NodeId at, NodeId, const icn::Frame& f, sim::Asn) override { rx.emplace_back(at, f.id); }
  void on_first_tx(NodeId, const icn::Frame& f, sim::Asn) override { first.push_back(f.id); }
  void on_tx_done(NodeId, const icn::Frame& f, bool ok, sim::Asn) override { done[f.id] = ok; }
};

icn::Frame interest(std::uint64_t id, NodeId from, NodeId to) {
  return {id, from, to, icn::Interest{icn::Name::parse("/a/1"), id, icn::Direction::kUp, {}}};
}

struct Net {
  radio::ConnectivityGraph graph;
  harness::EnergyLedger energy;
  harness::TraceLog trace;
  std::unique_ptr<csma::CsmaMac> mac;
  Recorder up;
  sim::Asn asn = 0;

  void start(std::uint64_t seed = 1) { mac = std::make_unique<csma::CsmaMac>(graph, csma::CsmaParams{}, seed, energy, trace); }
  void run(std::uint64_t slots) {
    for (std::uint64_t i = 0; i < slots; ++i) mac->run_slot(asn++, up);
  }
};

}  // namespace

TEST(Csma, UnicastIsDeliveredAndAcknowledged) {
  Net n;
  n.graph.add_edge(1, 2);
  n.start();
  n.mac->enqueue(1, interest(4, 1, 2));
  n.run(5);
  EXPECT_EQ(n.up.rx, (std::vector<std::pair<NodeId, std::uint64_t>>{{2, 4}}));
  EXPECT_TRUE(n.up.done.at(4));
  EXPECT_EQ(n.up.first, (std::vector<std::uint64_t>{4}));
  EXPECT_EQ(n.mac->counters().transmissions, 1u);
  EXPECT_EQ(n.mac->counters().acks, 1u);
  EXPECT_EQ(n.mac->queued(1), 0u);
}

TEST(Csma, DeadLinkRetriesThreeTimesThenDrops) {
  Net n;
  n.graph.add_edge(1, 2, 1.0);
  n.start();
  n.mac->enqueue(1, interest(4, 1, 2));
  n.run(20);
  EXPECT_TRUE(n.up.rx.empty());
  EXPECT_FALSE(n.up.done.at(4));
  EXPECT_EQ(n.mac->counters().transmissions, 4u);
  EXPECT_EQ(n.mac->counters().retransmissions, 3u);
  EXPECT_EQ(n.mac->counters().drops, 1u);
}

TEST(Csma, BroadcastIsSentOnceWithoutAck) {
  Net n;
  n.graph.add_edge(1, 2);
  n.graph.add_edge(1, 3);
  n.start();
  n.mac->enqueue(1, {9, 1, std::nullopt, icn::Dio{1, 1, {1}}});
  n.run(5);
  std::set<NodeId> got;
  for (auto [at, id] : n.up.rx) got.insert(at);
  EXPECT_EQ(got, (std::set<NodeId>{2, 3}));
  EXPECT_EQ(n.mac->counters().transmissions, 1u);
  EXPECT_EQ(n.mac->counters().acks, 0u);
  EXPECT_TRUE(n.up.done.at(9));
}

TEST(Csma, HiddenTerminalsCollideAtTheMiddleAndRecoverByRetrying) {
  // 1 and 3 cannot sense each other.
  Net n;
  n.graph.add_edge(1, 2);
  n.graph.add_edge(2, 3);
  n.start(3);
  for (std::uint64_t i = 0; i < 40; ++i) {
    n.mac->enqueue(1, interest(100 + i, 1, 2));
    n.mac->enqueue(3, interest(200 + i, 3, 2));
  }
  n.run(2000);
  EXPECT_GT(n.mac->counters().retransmissions, 0u);
  std::map<std::uint64_t, int> seen;
  for (auto [at, id] : n.up.rx) ++seen[id];
  for (auto [id, c] : seen) EXPECT_EQ(c, 1) << id;
  // Every frame ends one way or the other, and every success was received.
  EXPECT_EQ(n.up.done.size(), 80u);
  for (auto [id, ok] : n.up.done)
    if (ok) EXPECT_TRUE(seen.count(id)) << id;
}

TEST(Csma, LostAcksDoNotDuplicateDelivery) {
  Net n;
  n.graph.add_edge(1, 2, 0.4);
  n.start(5);
  for (std::uint64_t i = 0; i < 200; ++i) n.mac->enqueue(1, interest(i + 1, 1, 2));
  n.run(3000);
  std::map<std::uint64_t, int> seen;
  for (auto [at, id] : n.up.rx) ++seen[id];
  for (auto [id, c] : seen) EXPECT_EQ(c, 1) << id;
  // The filter was exercised: some frame reached 2 and was still retried.
  std::set<std::uint64_t> retried;
  for (const auto& e : n.trace.events())
    if (e.event == "mac_retx") retried.insert(e.detail.at("frame").get<std::uint64_t>());
  bool refiltered = false;
  for (auto id : retried)
    if (seen.count(id) && n.up.done.count(id)) refiltered = true;
  EXPECT_TRUE(refiltered);
}

TEST(Csma, RadioNeverSleeps) {
  Net n;
  n.graph.add_edge(1, 2);
  n.start();
  n.mac->enqueue(1, interest(1, 1, 2));
  n.run(10);
  const std::uint64_t total = 10u * csma::CsmaParams{}.ticks_per_slot * csma::CsmaParams{}.tick_micros;
  for (NodeId id : {1u, 2u}) {
    const auto& e = n.energy.at(id);
    EXPECT_EQ(e.micros(harness::RadioState::kSleep), 0u);
    EXPECT_EQ(e.micros(harness::RadioState::kCpuSleep), 0u);
    EXPECT_EQ(e.micros(harness::RadioState::kTx) + e.micros(harness::RadioState::kRx), total);
  }
  EXPECT_GT(n.energy.at(1).micros(harness::RadioState::kTx), 0u);
}

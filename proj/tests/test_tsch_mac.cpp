#include <gtest/gtest.h>

#include "icntsch/routing/dodag.hpp"
#include "icntsch/tsch/mac.hpp"
#include "icntsch/tsch/schedule_builder.hpp"

using namespace icntsch;
using tsch::CellRole;
using tsch::CellUse;

namespace {

struct Recorder : LinkUpcalls {
  struct Rx {
    NodeId at, from;
    icn::Frame frame;
    sim::Asn asn;
  };
  struct Done {
    NodeId at;
    icn::Frame frame;
    bool delivered;
    sim::Asn asn;
  };
  std::vector<Rx> rx;
  std::vector<Done> done;
  std::vector<std::uint64_t> first;
  void on_receive(NodeId at, NodeId from, const icn::Frame& f, sim::Asn asn) override {
    if (!std::holds_alternative<icn::Beacon>(f.packet)) rx.push_back({at, from, f, asn});
  }
  void on_first_tx(NodeId, const icn::Frame& f, sim::Asn) override { first.push_back(f.id); }
  void on_tx_done(NodeId at, const icn::Frame& f, bool ok, sim::Asn asn) override {
    if (!std::holds_alternative<icn::Beacon>(f.packet)) done.push_back({at, f, ok, asn});
  }
};

// 1 - 2 - 3 line, root 1.
struct Line {
  radio::ConnectivityGraph graph;
  routing::Dodag dodag;
  tsch::NetworkSchedule sched;
  harness::EnergyLedger energy;
  harness::TraceLog trace;
  std::unique_ptr<tsch::TschMac> mac;
  Recorder up;
  sim::Asn asn = 0;

  explicit Line(double p_loss = 0.0, bool beacons = false) {
    graph.add_edge(1, 2, p_loss);
    graph.add_edge(2, 3, p_loss);
    dodag = routing::build_dodag(graph, 1);
    sched = tsch::build_static_schedule(graph, dodag, {});
    tsch::MacParams p;
    p.beacons = beacons;
    mac = std::make_unique<tsch::TschMac>(graph, sched, p, 1, energy, trace);
  }
  void run(std::uint64_t slots) {
    for (std::uint64_t i = 0; i < slots; ++i) mac->run_slot(asn++, up);
  }
  std::uint32_t length() const { return sched.begin()->second.partition().length; }
};

icn::Frame interest(std::uint64_t id, NodeId from, NodeId to) {
  return {id, from, to, icn::Interest{icn::Name::parse("/a/1"), id, icn::Direction::kUp, {}}};
}
icn::Frame data(std::uint64_t id, NodeId from, NodeId to) {
  return {id, from, to, icn::DataChunk{icn::Name::parse("/a/1"), 1, 64, {}}};
}

std::uint32_t tx_slot(const tsch::NetworkSchedule& s, NodeId from, NodeId to, CellUse use) {
  for (const auto& c : s.at(from).cells())
    if (c.role == CellRole::kTx && !c.broadcast && c.peer == to && c.use == use) return c.slot;
  ADD_FAILURE() << "no cell";
  return 0;
}

}  // namespace

TEST(TschMac, UnicastGoesOutInItsCellAndIsAcknowledged) {
  Line l;
  l.mac->enqueue(3, interest(10, 3, 2));
  l.run(l.length());
  ASSERT_EQ(l.up.rx.size(), 1u);
  EXPECT_EQ(l.up.rx[0].at, 2u);
  EXPECT_EQ(l.up.rx[0].from, 3u);
  EXPECT_EQ(l.up.rx[0].asn, tx_slot(l.sched, 3, 2, CellUse::kInterest));
  ASSERT_EQ(l.up.done.size(), 1u);
  EXPECT_TRUE(l.up.done[0].delivered);
  EXPECT_EQ(l.up.first, (std::vector<std::uint64_t>{10}));
  EXPECT_EQ(l.mac->counters().transmissions, 1u);
  EXPECT_EQ(l.mac->counters().retransmissions, 0u);
  EXPECT_EQ(l.mac->queued(3), 0u);
}

TEST(TschMac, LostFramesAreRetriedThenDropped) {
  Line l(1.0);
  l.mac->enqueue(3, interest(10, 3, 2));
  l.run(6 * l.length());
  EXPECT_TRUE(l.up.rx.empty());
  ASSERT_EQ(l.up.done.size(), 1u);
  EXPECT_FALSE(l.up.done[0].delivered);
  EXPECT_EQ(l.mac->counters().transmissions, 4u);
  EXPECT_EQ(l.mac->counters().retransmissions, 3u);
  EXPECT_EQ(l.mac->counters().drops, 1u);
  int retx = 0, drops = 0;
  for (const auto& e : l.trace.events()) {
    retx += e.event == "mac_retx";
    drops += e.event == "mac_drop";
  }
  EXPECT_EQ(retx, 3);
  EXPECT_EQ(drops, 1);
  EXPECT_EQ(l.up.first.size(), 1u);  // first-transmission upcall fires once
}

TEST(TschMac, UnicastWithoutACellIsALogicError) {
  Line l;
  EXPECT_THROW(l.mac->enqueue(1, interest(1, 1, 3)), std::logic_error);
  EXPECT_THROW(l.mac->set_content_activation(2, icn::kBroadcastFace, CellRole::kTx, 1), std::logic_error);
}

TEST(TschMac, InactiveContentCellsHoldDataBack) {
  Line l;
  l.mac->set_all_content_active(false);
  l.mac->enqueue(2, data(7, 2, 3));
  l.run(l.length());
  EXPECT_TRUE(l.up.rx.empty());
  EXPECT_EQ(l.mac->queued(2), 1u);
  // Only one end active: the sender transmits but nobody listens.
  l.mac->set_content_activation(2, 3, CellRole::kTx, 1);
  l.run(l.length());
  EXPECT_TRUE(l.up.rx.empty());
  l.mac->set_content_activation(3, 2, CellRole::kRx, 1);
  l.run(l.length());
  ASSERT_EQ(l.up.rx.size(), 1u);
  EXPECT_EQ(l.up.rx[0].at, 3u);
  EXPECT_EQ(l.up.rx[0].asn % l.length(), tx_slot(l.sched, 2, 3, CellUse::kContent));
}

TEST(TschMac, BroadcastCellReachesAllNeighbors) {
  Line l;
  l.mac->enqueue(2, {5, 2, std::nullopt, icn::Dio{1, 1, {1, 3}}});
  l.run(l.length());
  ASSERT_EQ(l.up.rx.size(), 2u);
  EXPECT_EQ(l.up.rx[0].at, 1u);
  EXPECT_EQ(l.up.rx[1].at, 3u);
  ASSERT_EQ(l.up.done.size(), 1u);
  EXPECT_TRUE(l.up.done[0].delivered);
}

TEST(TschMac, IdleEnergySplitsByCellOccupancy) {
  Line l;
  l.run(l.length());
  const auto slot_us = tsch::MacParams{}.slot_micros();
  for (NodeId n : {1u, 2u, 3u}) {
    // Oracle from the schedule alone: listen in every RX or shared slot,
    // sleep in other slots that hold a cell, CPU sleep elsewhere.
    std::set<std::uint32_t> listen, cells;
    for (const auto& c : l.sched.at(n).cells()) {
      cells.insert(c.slot);
      if (c.role != CellRole::kTx) listen.insert(c.slot);
    }
    const auto& e = l.energy.at(n);
    EXPECT_EQ(e.micros(harness::RadioState::kTx), 0u);
    EXPECT_EQ(e.micros(harness::RadioState::kRx), listen.size() * slot_us) << n;
    EXPECT_EQ(e.micros(harness::RadioState::kSleep), (cells.size() - listen.size()) * slot_us) << n;
    EXPECT_EQ(e.total_micros(), l.length() * slot_us);
  }
}

TEST(TschMac, UsageCountsScheduledAndUsedInterestCells) {
  Line l;
  l.mac->enqueue(3, interest(1, 3, 2));
  l.run(l.length() - 1);
  const auto& u = l.mac->frame_usage();
  ASSERT_TRUE(u.count({3, 2}));
  EXPECT_EQ(u.at({3, 2}).scheduled, 1u);
  EXPECT_EQ(u.at({3, 2}).used, 1u);
  EXPECT_EQ(u.at({2, 1}).used, 0u);
  l.run(2);  // into the next slotframe: counters reset
  for (const auto& [link, use] : l.mac->frame_usage()) EXPECT_EQ(use.used, 0u);
}

TEST(TschMac, BeaconsDrainThroughSharedCellsWithoutDedicatedCollisions) {
  Line l(0.0, true);
  l.run(20 * l.length());
  EXPECT_EQ(l.mac->counters().collisions, 0u);
  for (NodeId n : {1u, 2u, 3u}) EXPECT_LE(l.mac->queued(n), 1u);
  std::size_t beacons = 0;
  for (const auto& e : l.trace.events()) beacons += e.event == "collision";
  EXPECT_EQ(beacons, 0u);
}

TEST(TschMac, ChannelHopsEverySlot) {
  EXPECT_EQ(tsch::physical_channel(3, 0), 3u);
  EXPECT_EQ(tsch::physical_channel(3, 13), 0u);
  EXPECT_EQ(tsch::physical_channel(0, 101), 101u % 16);
}

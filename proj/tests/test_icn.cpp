#include <gtest/gtest.h>

#include "icntsch/icn/forwarder.hpp"

using namespace icntsch;
using icn::Direction;
using icn::FibMode;
using icn::InterestOutcome;
using icn::Name;

namespace {

// 1 -> {2, 3}, 2 -> {4, 5}
routing::Dodag tree() {
  radio::ConnectivityGraph g;
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 4);
  g.add_edge(2, 5);
  return routing::build_dodag(g, 1);
}

icn::Interest interest(const char* name, std::uint64_t nonce, Direction d = Direction::kUp) {
  return {Name::parse(name), nonce, d, {}};
}

}  // namespace

TEST(Name, ParseAppendAndChunkIndex) {
  auto n = Name::parse("/iotlab/data").append("17");
  EXPECT_EQ(n.to_string(), "/iotlab/data/17");
  EXPECT_EQ(icn::chunk_index(n), 17u);
  EXPECT_FALSE(icn::chunk_index(Name::parse("/iotlab/x7")).has_value());
  EXPECT_TRUE(Name::parse("/iotlab").is_prefix_of(n));
  EXPECT_FALSE(n.is_prefix_of(Name::parse("/iotlab")));
  EXPECT_TRUE(Name{}.is_prefix_of(n));
}

TEST(Pit, InsertAggregatesFacesAndKeepsTheLaterExpiry) {
  icn::PitTable pit;
  const auto n = Name::parse("/a/1");
  pit.insert(n, 4, 0, 100);
  pit.insert(n, 5, 10, 50);
  ASSERT_EQ(pit.size(), 1u);
  EXPECT_EQ(pit.find(n)->in_faces, (std::set<icn::FaceId>{4, 5}));
  EXPECT_EQ(pit.find(n)->expiry, 100u);
  EXPECT_EQ(pit.find(n)->created, 0u);
  EXPECT_TRUE(pit.expire(99).empty());
  EXPECT_EQ(pit.expire(100).size(), 1u);
  EXPECT_TRUE(pit.empty());
}

TEST(Forwarder, DuplicateNonceIsDropped) {
  auto d = tree();
  icn::Forwarder f(2, &d, 8, 30);
  EXPECT_EQ(f.on_interest(interest("/a/1", 7), 4, 0).outcome, InterestOutcome::kForwarded);
  auto r = f.on_interest(interest("/a/2", 7), 5, 1);
  EXPECT_EQ(r.outcome, InterestOutcome::kDuplicateNonce);
  EXPECT_TRUE(r.sends.empty());
}

TEST(Forwarder, SecondFaceAggregatesWithoutForwarding) {
  auto d = tree();
  icn::Forwarder f(2, &d, 8, 30);
  auto first = f.on_interest(interest("/a/1", 1), 4, 0);
  ASSERT_EQ(first.sends.size(), 1u);
  EXPECT_EQ(first.sends[0].face, 1u);
  auto again = f.on_interest(interest("/a/1", 2), 5, 1);
  EXPECT_EQ(again.outcome, InterestOutcome::kAggregated);
  EXPECT_TRUE(again.sends.empty());

  auto data = f.on_data({Name::parse("/a/1"), 1, 64, {}}, 1, 5);
  EXPECT_FALSE(data.unsolicited);
  ASSERT_EQ(data.sends.size(), 2u);
  EXPECT_EQ(data.sends[0].face, 4u);
  EXPECT_EQ(data.sends[1].face, 5u);
  EXPECT_TRUE(f.on_data({Name::parse("/a/1"), 1, 64, {}}, 1, 6).unsolicited);
  EXPECT_EQ(f.unsolicited(), 1u);
}

TEST(Forwarder, ProducerAnswersOnTheArrivalFace) {
  auto d = tree();
  icn::Forwarder f(1, &d, 8, 30);
  f.add_producer_prefix(Name::parse("/iotlab/data"));
  auto r = f.on_interest(interest("/iotlab/data/42", 1), 3, 0);
  EXPECT_EQ(r.outcome, InterestOutcome::kProduced);
  ASSERT_EQ(r.sends.size(), 1u);
  EXPECT_EQ(r.sends[0].face, 3u);
  EXPECT_EQ(std::get<icn::DataChunk>(r.sends[0].packet).index, 42u);
  EXPECT_TRUE(f.pit().empty());
}

TEST(Forwarder, PitLifetimeStartsAtFirstTransmission) {
  auto d = tree();
  icn::Forwarder f(2, &d, 8, 30);
  const auto n = Name::parse("/a/1");
  f.on_interest(interest("/a/1", 1), 4, 10);
  EXPECT_TRUE(f.expire(5000).empty());  // still queued
  f.refresh(n, 5000);
  EXPECT_EQ(f.pit().find(n)->expiry, 5030u);
  f.refresh(n, 6000);  // later transmissions do not extend it
  EXPECT_EQ(f.pit().find(n)->expiry, 5030u);
  EXPECT_TRUE(f.expire(5029).empty());
  EXPECT_EQ(f.expire(5030).size(), 1u);
}

TEST(Forwarder, SameFaceWithAFreshNonceReforwards) {
  auto d = tree();
  icn::Forwarder f(2, &d, 8, 30);
  const auto n = Name::parse("/a/1");
  f.on_interest(interest("/a/1", 1), 4, 0);
  f.refresh(n, 3);
  auto r = f.on_interest(interest("/a/1", 2), 4, 20);
  EXPECT_EQ(r.outcome, InterestOutcome::kReforwarded);
  EXPECT_EQ(r.sends.size(), 1u);
  EXPECT_EQ(f.pit().find(n)->expiry, icn::Forwarder::kHeld);
}

TEST(Forwarder, DeadEndsAreCounted) {
  auto d = tree();
  icn::Forwarder f(4, &d, 8, 30);
  auto r = f.on_interest(interest("/a/1", 1, Direction::kDown), 2, 0);
  EXPECT_EQ(r.outcome, InterestOutcome::kDeadEnd);
  EXPECT_TRUE(f.pit().empty());
  EXPECT_EQ(f.dead_ends(), 1u);
}

TEST(Forwarder, NamInstallsAnIncludeAndClimbs) {
  auto d = tree();
  icn::Forwarder mid(2, &d, 8, 30), root(1, &d, 8, 30), tiny(2, &d, 0, 30);
  icn::Nam nam{Name::parse("/light"), 5};
  auto r = mid.on_nam(nam, 5, 0);
  EXPECT_TRUE(r.installed);
  ASSERT_EQ(r.sends.size(), 1u);
  EXPECT_EQ(r.sends[0].face, 1u);
  EXPECT_EQ(mid.fib().mode_of(Name::parse("/light"), 5), FibMode::kInclude);
  EXPECT_TRUE(root.on_nam(nam, 2, 0).sends.empty());
  // No room: nothing stored, but the advertisement still goes up.
  auto t = tiny.on_nam(nam, 5, 0);
  EXPECT_FALSE(t.installed);
  EXPECT_EQ(t.sends.size(), 1u);

  // An upward Interest for the name now turns toward 5.
  auto i = mid.on_interest(interest("/light/bulb1", 1), 4, 1);
  ASSERT_EQ(i.sends.size(), 1u);
  EXPECT_EQ(i.sends[0].face, 5u);
  EXPECT_EQ(std::get<icn::Interest>(i.sends[0].packet).direction, Direction::kDown);
}

TEST(Forwarder, SilentChildrenGetExcludeAll) {
  auto d = tree();
  icn::Forwarder f(2, &d, 8, 30);
  f.on_nam({Name::parse("/light"), 5}, 5, 0);
  f.exclude_silent_children(1);
  EXPECT_EQ(f.fib().mode_of(Name{}, 4), FibMode::kExclude);
  EXPECT_FALSE(f.fib().mode_of(Name{}, 5).has_value());
  // A flooded Interest for something else skips 4.
  auto r = f.on_interest(interest("/heat/1", 1, Direction::kDown), 1, 2);
  ASSERT_EQ(r.sends.size(), 1u);
  EXPECT_EQ(r.sends[0].face, 5u);
}

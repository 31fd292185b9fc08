#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "icntsch/harness/experiment.hpp"
#include "support.hpp"

using namespace icntsch;
using harness::MacMode;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({"topology": {"edges": [[1, 2], [2, 3, 0.2]]}, "consumer": 3})");
}

harness::ScenarioConfig iotlab() { return harness::load_scenario(ICNTSCH_SCENARIO); }

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Scenario, MinimalFileFillsDefaults) {
  auto c = harness::parse_scenario(minimal());
  EXPECT_EQ(c.nodes, (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(c.root, 1u);
  EXPECT_EQ(c.producer, 1u);
  EXPECT_EQ(c.chunks, 100u);
  EXPECT_EQ(c.schedule.partition.length, 101u);
  EXPECT_DOUBLE_EQ(c.slot_ms, 15.0);
  EXPECT_EQ(c.modes.size(), 6u);
  EXPECT_DOUBLE_EQ(c.graph().loss(2, 3), 0.2);
  EXPECT_DOUBLE_EQ(c.graph(true).loss(2, 3), 0.0);  // ideal medium for TSCH
}

TEST(Scenario, RejectsBadInput) {
  auto expect_error = [](json j, const std::string& needle) {
    try {
      harness::parse_scenario(j);
      ADD_FAILURE() << "accepted " << j.dump();
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto j = minimal();
  j["colour"] = 1;
  expect_error(j, "colour");
  j = minimal();
  j["adaptive"] = {{"u_low", 0.95}};
  expect_error(j, "u_low");
  j = minimal();
  j["consumer"] = 1;
  expect_error(j, "consumer");
  j = minimal();
  j["topology"]["edges"].push_back({7, 8});
  expect_error(j, "unreachable");
  j = minimal();
  j["side_traffic"] = {{"nodes", {3}}};
  expect_error(j, "side");
  j = minimal();
  j["modes"] = {"TDMA"};
  expect_error(j, "TDMA");
  j = minimal();
  j["topology"]["edges"][0] = {1, 2, 1.5};
  EXPECT_THROW(harness::parse_scenario(j), ConfigError);
  EXPECT_THROW(harness::load_scenario("/nonexistent.json"), ConfigError);
}

TEST(Scenario, EffectiveConfigParsesBackToItself) {
  auto c = iotlab();
  auto once = harness::to_json(c);
  auto again = harness::to_json(harness::parse_scenario(json::parse(once.dump())));
  EXPECT_EQ(once.dump(), again.dump());
}

TEST(Trace, JsonLinesRoundTrip) {
  harness::TraceEvent e{42, 7, "chunk_rx", {{"name", "/a/1"}, {"hops", 3}}};
  const auto line = harness::to_json_line(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  auto back = harness::from_json_line(line);
  EXPECT_EQ(back.asn, 42u);
  EXPECT_EQ(back.node, 7u);
  EXPECT_EQ(back.event, "chunk_rx");
  EXPECT_EQ(back.detail, e.detail);
}

TEST(Energy, MeanPowerIsEnergyOverTime) {
  harness::PowerTable p;
  harness::NodeEnergy e;
  e.charge(harness::RadioState::kTx, 1'000'000);     // 1 s at 60 mW
  e.charge(harness::RadioState::kSleep, 3'000'000);  // 3 s at 0.1 mW
  EXPECT_DOUBLE_EQ(e.millijoules(p), 60.3);
  EXPECT_DOUBLE_EQ(e.mean_mw(p), 60.3 / 4.0);
  EXPECT_EQ(harness::NodeEnergy{}.mean_mw(p), 0.0);
}

TEST(Metrics, RebuiltFromEvents) {
  std::vector<harness::TraceEvent> ev{
      {0, 8, "run_start", {{"config", "X"}, {"seed", 4}, {"chunks", 3}, {"slot_ms", 10.0}}},
      {5, 8, "interest_out", {{"retx", false}}},
      {6, 9, "interest_out", {{"retx", true}}},  // not the consumer
      {7, 8, "interest_out", {{"retx", true}}},
      {9, 2, "mac_retx", {}},
      {10, 8, "chunk_rx", {}},
      {19, 8, "chunk_rx", {}},
      {20, 8, "dup_chunk", {}},
      {30, 8, "energy", {{"mJ", 1.5}, {"mean_mW", 0.2}}},
      {30, 0, "run_end", {{"duration_s", 0.3}}},
  };
  auto m = harness::metrics_from_trace(ev);
  EXPECT_EQ(m.config, "X");
  EXPECT_EQ(m.seed, 4u);
  EXPECT_EQ(m.e2e_retx, 1u);
  EXPECT_EQ(m.mac_retx, 1u);
  EXPECT_EQ(m.dups, 1u);
  EXPECT_EQ(m.delivered, 2u);
  EXPECT_FALSE(m.completed);
  EXPECT_NEAR(m.pdr, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.energy_mj.at(8), 1.5);

  ev.insert(ev.begin() + 7, {25, 8, "chunk_rx", {}});
  m = harness::metrics_from_trace(ev);
  EXPECT_TRUE(m.completed);
  EXPECT_DOUBLE_EQ(m.ttc_s, 0.26);  // through the end of slot 25
}

TEST(Metrics, CsvRowsAndSummary) {
  harness::MetricsRecord a{"CSMA", 1, true, 150.0, 1.0, 100, 100, 3, 0, 9, {{1, 10.0}, {2, 20.0}}, {}, 0};
  harness::MetricsRecord b{"CSMA", 2, false, 0.0, 0.5, 100, 50, 1, 2, 4, {{1, 30.0}, {2, 40.0}}, {}, 0};
  const std::vector<NodeId> nodes{1, 2};
  EXPECT_EQ(harness::results_header(nodes), "config,seed,ttc_s,pdr,e2e_retx,dups,mac_retx,energy_node_1_mJ,energy_node_2_mJ");
  EXPECT_EQ(harness::results_row(a, nodes), "CSMA,1,150,1,3,0,9,10,20");
  EXPECT_EQ(harness::results_row(b, nodes), "CSMA,2,censored,0.5,1,2,4,30,40");
  auto s = harness::summarize({a, b});
  EXPECT_EQ(s.completed, 1u);
  EXPECT_EQ(harness::summary_row(s, nodes), "CSMA,summary=true,150,0.75,2,1,6.5,20,30");
  EXPECT_NEAR(s.stats.at("pdr").std, std::sqrt(0.125), 1e-12);
}

TEST(Metrics, RepetitionsStopWhenTheMeanSettles) {
  harness::MetricsRecord r{"SINR", 1, true, 150.0, 1.0, 100, 100, 0, 0, 0, {}, {}, 0};
  std::vector<harness::MetricsRecord> runs(4, r);
  EXPECT_FALSE(harness::converged(runs));
  runs.push_back(r);
  EXPECT_TRUE(harness::converged(runs));
  // A late outlier moves the mean by more than 1%.
  runs.back().ttc_s = 300.0;
  EXPECT_FALSE(harness::converged(runs));
  harness::RepetitionPolicy cap;
  cap.max_runs = 5;
  EXPECT_TRUE(harness::converged(runs, cap));
}

TEST(Run, RecordMatchesItsOwnTrace) {
  auto c = iotlab();
  for (auto mode : {MacMode::kSinr, MacMode::kCsma}) {
    auto r = harness::run_experiment(c, mode, 3);
    EXPECT_EQ(r.metrics, harness::metrics_from_trace(r.trace.events())) << harness::mode_name(mode);
  }
}

TEST(Run, SameSeedSameBytes) {
  auto c = iotlab();
  for (auto mode : harness::kAllModes) {
    auto a = harness::run_experiment(c, mode, 11);
    auto b = harness::run_experiment(c, mode, 11);
    EXPECT_EQ(a.trace.lines(), b.trace.lines()) << harness::mode_name(mode);
    EXPECT_EQ(a.metrics, b.metrics) << harness::mode_name(mode);
  }
  auto x = harness::run_experiment(c, MacMode::kCsma, 11);
  auto y = harness::run_experiment(c, MacMode::kCsma, 12);
  EXPECT_NE(x.trace.lines(), y.trace.lines());
}

TEST(Run, SinrOnIdealLinksNeedsNoRetransmission) {
  auto c = iotlab();
  auto r = harness::run_experiment(c, MacMode::kSinr, 1);
  EXPECT_EQ(r.metrics.mac_retx, 0u);
  EXPECT_EQ(r.link.collisions, 0u);
  EXPECT_EQ(r.metrics.e2e_retx, 0u);
  EXPECT_DOUBLE_EQ(r.metrics.pdr, 1.0);
}

TEST(Run, SmallRandomNetworkCompletes) {
  auto g = testing_support::random_topology(12, 5);
  auto d = routing::build_dodag(g, 1);
  NodeId far = 1;
  for (NodeId n : g.nodes())
    if (d.rank(n) >= d.rank(far)) far = n;
  auto c = testing_support::scenario_for(g, far, 20);
  c.modes = {MacMode::kSinr, MacMode::kDinr};
  c.validate();
  for (auto mode : c.modes) {
    auto r = harness::run_experiment(c, mode, 1);
    EXPECT_TRUE(r.metrics.completed) << harness::mode_name(mode);
    EXPECT_EQ(r.metrics.mac_retx, 0u);
  }
}

TEST(Experiment, WritesEveryArtifact) {
  auto c = iotlab();
  c.modes = {MacMode::kSinr, MacMode::kAdinr, MacMode::kCsma};
  const auto dir = std::filesystem::temp_directory_path() / "icntsch_harness_test";
  std::filesystem::remove_all(dir);
  harness::ExperimentOptions o;
  o.seed = 5;
  o.repetitions = 2;
  o.out = dir;
  auto res = harness::run_scenario(c, o);
  EXPECT_EQ(res.runs.at(MacMode::kSinr).size(), 2u);
  for (const char* f : {"effective_config.json", "schedule.csv", "results.csv", "summary.csv",
                        "trace_SINR_5.jsonl", "trace_CSMA_6.jsonl", "adaptation_ADINR_6.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;

  auto rows = lines_of(dir / "results.csv");
  ASSERT_EQ(rows.size(), 1u + 3 * 3);
  EXPECT_EQ(rows[0].rfind("config,seed,ttc_s,pdr,e2e_retx,dups,mac_retx,energy_node_1_mJ", 0), 0u);
  EXPECT_EQ(rows[1].rfind("SINR,5,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("SINR,summary=true,", 0), 0u);
  EXPECT_EQ(lines_of(dir / "adaptation_ADINR_5.csv").at(0), "asn,link,U_cur,decision,dyn_cells_after");
  EXPECT_EQ(lines_of(dir / "schedule.csv").at(0), "node,slot_offset,channel_offset,role,peer,ssf,active");

  // Trace files are the run's JSON lines, nothing more.
  auto again = harness::run_experiment(c, MacMode::kCsma, 6);
  EXPECT_EQ(lines_of(dir / "trace_CSMA_6.jsonl"), again.trace.lines());
  std::filesystem::remove_all(dir);
}

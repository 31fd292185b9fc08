#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "icntsch/adapt/utilization.hpp"
#include "icntsch/csma/csma_mac.hpp"
#include "icntsch/harness/energy.hpp"
#include "icntsch/icn/name.hpp"
#include "icntsch/radio/graph.hpp"
#include "icntsch/tsch/mac.hpp"
#include "icntsch/tsch/schedule_builder.hpp"

namespace icntsch::harness {

enum class MacMode : std::uint8_t { kSinr, kDinr, kAdinr, kCsma, kCsma3, kCsma3St };

inline constexpr MacMode kAllModes[] = {MacMode::kSinr, MacMode::kDinr,  MacMode::kAdinr,
                                        MacMode::kCsma, MacMode::kCsma3, MacMode::kCsma3St};

inline const char* mode_name(MacMode m) {
  switch (m) {
    case MacMode::kSinr: return "SINR";
    case MacMode::kDinr: return "DINR";
    case MacMode::kAdinr: return "ADINR";
    case MacMode::kCsma: return "CSMA";
    case MacMode::kCsma3: return "CSMA-3";
    case MacMode::kCsma3St: return "CSMA-3ST";
  }
  return "?";
}

inline MacMode parse_mode(const std::string& s) {
  for (MacMode m : kAllModes)
    if (s == mode_name(m)) return m;
  throw ConfigError("unknown MAC mode '" + s + "'");
}

inline bool is_tsch(MacMode m) { return m == MacMode::kSinr || m == MacMode::kDinr || m == MacMode::kAdinr; }

struct EdgeSpec {
  NodeId a = 0;
  NodeId b = 0;
  double p_loss = 0.0;
};

struct SideTraffic {
  std::vector<NodeId> nodes;
  double rate = 1.0;           // Interests per slotframe and node
  double heavy_multiplier = 2.0;  // applied in CSMA-3ST
  bool in_tsch = false;
  std::string prefix = "/iotlab/side";
};

struct ConsumerPolicy {
  std::uint32_t rate = 1;  // Interests per slotframe
  std::uint32_t adinr_rate = 15;
  double csma_timeout_ms = 1000.0;
  double csma_pit_lifetime_ms = 2000.0;
  std::uint32_t limited_retries = 3;  // CSMA-3 and CSMA-3ST
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<NodeId> nodes;
  std::vector<EdgeSpec> edges;
  NodeId root = 1;
  NodeId consumer = 0;
  NodeId producer = 1;
  std::string content_prefix = "/iotlab/data";
  std::uint32_t chunks = 100;
  SideTraffic side;
  std::vector<MacMode> modes{std::begin(kAllModes), std::end(kAllModes)};
  double slot_ms = 15.0;
  tsch::StaticScheduleParams schedule;
  tsch::MacParams tsch_mac;
  bool tsch_ideal_medium = true;
  adapt::AdaptationParams adaptive;
  std::uint32_t drain_slotframes = 12;
  ConsumerPolicy consumer_policy;
  csma::CsmaParams csma;
  std::size_t fib_capacity = 8;
  bool exclude_silent_children = true;
  PowerTable power;
  std::uint32_t max_slotframes = 2000;
  std::uint64_t seed = 1;

  radio::ConnectivityGraph graph(bool ideal = false) const {
    radio::ConnectivityGraph g;
    for (NodeId n : nodes) g.add_node(n);
    for (const auto& e : edges) g.add_edge(e.a, e.b, ideal ? 0.0 : e.p_loss);
    return g;
  }

  void validate() const {
    if (nodes.empty()) throw ConfigError("scenario has no nodes");
    std::set<NodeId> ids(nodes.begin(), nodes.end());
    if (ids.size() != nodes.size()) throw ConfigError("duplicate node ids");
    auto known = [&](NodeId n, const char* what) {
      if (!ids.count(n)) throw ConfigError(std::string(what) + " " + std::to_string(n) + " is not a node");
    };
    known(root, "root");
    known(consumer, "consumer");
    known(producer, "producer");
    if (consumer == producer) throw ConfigError("consumer and producer must differ");
    for (const auto& e : edges) {
      known(e.a, "edge endpoint");
      known(e.b, "edge endpoint");
      if (e.p_loss < 0.0 || e.p_loss > 1.0) throw ConfigError("p_loss outside [0,1]");
    }
    for (NodeId n : side.nodes) {
      known(n, "side-traffic node");
      if (n == consumer || n == root) throw ConfigError("side traffic cannot run on the consumer or the root");
    }
    if (chunks == 0) throw ConfigError("chunk count must be >= 1");
    if (slot_ms <= 0.0) throw ConfigError("slot length must be positive");
    if (modes.empty()) throw ConfigError("no MAC modes selected");
    schedule.validate();
    if (std::find(modes.begin(), modes.end(), MacMode::kAdinr) != modes.end()) adaptive.validate();
    icn::Name::parse(content_prefix);
    icn::Name::parse(side.prefix);
    if (auto lost = graph().unreachable_from(root); !lost.empty()) {
      std::string msg = "topology is not connected; unreachable from root:";
      for (NodeId n : lost) msg += " " + std::to_string(n);
      throw ConfigError(msg);
    }
  }

  std::uint64_t slots_for_ms(double ms) const { return static_cast<std::uint64_t>(std::ceil(ms / slot_ms - 1e-9)); }
};

namespace detail {

using json = nlohmann::json;

inline void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw ConfigError("unknown key '" + k + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
  using detail::allow_keys;
  using detail::read;
  ScenarioConfig c;
  allow_keys(j,
             {"name", "topology", "root", "consumer", "producer", "content", "side_traffic", "modes",
              "slotframe", "tsch", "adaptive", "consumer_policy", "csma", "routing", "energy", "run"},
             "scenario");
  read(j, "name", c.name);
  if (!j.contains("topology")) throw ConfigError("scenario lacks a topology");
  const auto& topo = j.at("topology");
  allow_keys(topo, {"nodes", "edges"}, "topology");
  read(topo, "nodes", c.nodes);
  if (topo.contains("edges")) {
    for (const auto& e : topo.at("edges")) {
      EdgeSpec s;
      if (e.is_array()) {
        if (e.size() < 2 || e.size() > 3) throw ConfigError("edge arrays are [a, b] or [a, b, p_loss]");
        s.a = e.at(0).get<NodeId>();
        s.b = e.at(1).get<NodeId>();
        if (e.size() == 3) s.p_loss = e.at(2).get<double>();
      } else {
        allow_keys(e, {"a", "b", "p_loss"}, "edge");
        read(e, "a", s.a);
        read(e, "b", s.b);
        read(e, "p_loss", s.p_loss);
      }
      c.edges.push_back(s);
    }
  }
  read(j, "root", c.root);
  read(j, "consumer", c.consumer);
  read(j, "producer", c.producer);
  if (j.contains("content")) {
    const auto& x = j.at("content");
    allow_keys(x, {"prefix", "chunks"}, "content");
    read(x, "prefix", c.content_prefix);
    read(x, "chunks", c.chunks);
  }
  if (j.contains("side_traffic")) {
    const auto& x = j.at("side_traffic");
    allow_keys(x, {"nodes", "rate", "heavy_multiplier", "tsch", "prefix"}, "side_traffic");
    read(x, "nodes", c.side.nodes);
    read(x, "rate", c.side.rate);
    read(x, "heavy_multiplier", c.side.heavy_multiplier);
    read(x, "tsch", c.side.in_tsch);
    read(x, "prefix", c.side.prefix);
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j.at("modes")) c.modes.push_back(parse_mode(m.get<std::string>()));
  }
  if (j.contains("slotframe")) {
    const auto& x = j.at("slotframe");
    allow_keys(x,
               {"length", "slot_ms", "len_i", "len_c", "k", "cells_per_neighbor", "broadcast_cells_per_node",
                "shared_slots_in_c"},
               "slotframe");
    read(x, "length", c.schedule.partition.length);
    read(x, "slot_ms", c.slot_ms);
    read(x, "len_i", c.schedule.partition.len_i);
    read(x, "len_c", c.schedule.partition.len_c);
    read(x, "k", c.schedule.k);
    read(x, "cells_per_neighbor", c.schedule.cells_per_neighbor);
    read(x, "broadcast_cells_per_node", c.schedule.broadcast_cells_per_node);
    read(x, "shared_slots_in_c", c.schedule.shared_slots_in_c);
  }
  if (j.contains("tsch")) {
    const auto& x = j.at("tsch");
    allow_keys(x,
               {"max_retries", "beacons", "beacon_period", "ideal_medium", "shared_initial_window",
                "shared_max_window", "shared_max_retries"},
               "tsch");
    read(x, "max_retries", c.tsch_mac.max_retries);
    read(x, "beacons", c.tsch_mac.beacons);
    read(x, "beacon_period", c.tsch_mac.beacon_period);
    read(x, "ideal_medium", c.tsch_ideal_medium);
    read(x, "shared_initial_window", c.tsch_mac.shared_initial_window);
    read(x, "shared_max_window", c.tsch_mac.shared_max_window);
    read(x, "shared_max_retries", c.tsch_mac.shared_max_retries);
  }
  if (j.contains("adaptive")) {
    const auto& x = j.at("adaptive");
    allow_keys(x,
               {"window", "u_high", "u_low", "burst", "max_bursts_per_link", "oracle_knowledge",
                "drain_slotframes"},
               "adaptive");
    read(x, "window", c.adaptive.window);
    read(x, "u_high", c.adaptive.u_high);
    read(x, "u_low", c.adaptive.u_low);
    read(x, "burst", c.adaptive.burst);
    read(x, "max_bursts_per_link", c.adaptive.max_bursts_per_link);
    read(x, "oracle_knowledge", c.adaptive.oracle_knowledge);
    read(x, "drain_slotframes", c.drain_slotframes);
    c.adaptive.validate();
  }
  if (j.contains("consumer_policy")) {
    const auto& x = j.at("consumer_policy");
    allow_keys(x, {"rate", "adinr_rate", "csma_timeout_ms", "csma_pit_lifetime_ms", "limited_retries"},
               "consumer_policy");
    read(x, "rate", c.consumer_policy.rate);
    read(x, "adinr_rate", c.consumer_policy.adinr_rate);
    read(x, "csma_timeout_ms", c.consumer_policy.csma_timeout_ms);
    read(x, "csma_pit_lifetime_ms", c.consumer_policy.csma_pit_lifetime_ms);
    read(x, "limited_retries", c.consumer_policy.limited_retries);
  }
  if (j.contains("csma")) {
    const auto& x = j.at("csma");
    allow_keys(x,
               {"min_be", "max_be", "max_backoffs", "max_retries", "ticks_per_slot", "interest_ticks",
                "data_ticks", "control_ticks", "ack_ticks"},
               "csma");
    read(x, "min_be", c.csma.min_be);
    read(x, "max_be", c.csma.max_be);
    read(x, "max_backoffs", c.csma.max_backoffs);
    read(x, "max_retries", c.csma.max_retries);
    read(x, "ticks_per_slot", c.csma.ticks_per_slot);
    read(x, "interest_ticks", c.csma.interest_ticks);
    read(x, "data_ticks", c.csma.data_ticks);
    read(x, "control_ticks", c.csma.control_ticks);
    read(x, "ack_ticks", c.csma.ack_ticks);
  }
  if (j.contains("routing")) {
    const auto& x = j.at("routing");
    allow_keys(x, {"fib_capacity", "exclude_silent_children"}, "routing");
    read(x, "fib_capacity", c.fib_capacity);
    read(x, "exclude_silent_children", c.exclude_silent_children);
  }
  if (j.contains("energy")) {
    const auto& x = j.at("energy");
    allow_keys(x, {"tx_mw", "rx_mw", "sleep_mw", "cpu_sleep_mw"}, "energy");
    read(x, "tx_mw", c.power.tx_mw);
    read(x, "rx_mw", c.power.rx_mw);
    read(x, "sleep_mw", c.power.sleep_mw);
    read(x, "cpu_sleep_mw", c.power.cpu_sleep_mw);
  }
  if (j.contains("run")) {
    const auto& x = j.at("run");
    allow_keys(x, {"max_slotframes", "seed"}, "run");
    read(x, "max_slotframes", c.max_slotframes);
    read(x, "seed", c.seed);
  }
  c.tsch_mac.slot_ms = c.slot_ms;
  c.csma.tick_micros = static_cast<std::uint32_t>(std::lround(c.slot_ms * 1000.0 / c.csma.ticks_per_slot));
  if (c.nodes.empty()) {
    std::set<NodeId> ids;
    for (const auto& e : c.edges) {
      ids.insert(e.a);
      ids.insert(e.b);
    }
    c.nodes.assign(ids.begin(), ids.end());
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

// Effective configuration with every default filled in.
inline nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : c.edges) edges.push_back({e.a, e.b, e.p_loss});
  j["topology"] = {{"nodes", c.nodes}, {"edges", edges}};
  j["root"] = c.root;
  j["consumer"] = c.consumer;
  j["producer"] = c.producer;
  j["content"] = {{"prefix", c.content_prefix}, {"chunks", c.chunks}};
  j["side_traffic"] = {{"nodes", c.side.nodes},
                       {"rate", c.side.rate},
                       {"heavy_multiplier", c.side.heavy_multiplier},
                       {"tsch", c.side.in_tsch},
                       {"prefix", c.side.prefix}};
  std::vector<std::string> modes;
  for (auto m : c.modes) modes.emplace_back(mode_name(m));
  j["modes"] = modes;
  j["slotframe"] = {{"length", c.schedule.partition.length},
                    {"slot_ms", c.slot_ms},
                    {"len_i", c.schedule.partition.len_i},
                    {"len_c", c.schedule.partition.len_c},
                    {"k", c.schedule.k},
                    {"cells_per_neighbor", c.schedule.cells_per_neighbor},
                    {"broadcast_cells_per_node", c.schedule.broadcast_cells_per_node},
                    {"shared_slots_in_c", c.schedule.shared_slots_in_c}};
  j["tsch"] = {{"max_retries", c.tsch_mac.max_retries},
               {"beacons", c.tsch_mac.beacons},
               {"beacon_period", c.tsch_mac.beacon_period},
               {"ideal_medium", c.tsch_ideal_medium},
               {"shared_initial_window", c.tsch_mac.shared_initial_window},
               {"shared_max_window", c.tsch_mac.shared_max_window},
               {"shared_max_retries", c.tsch_mac.shared_max_retries}};
  j["adaptive"] = {{"window", c.adaptive.window},
                   {"u_high", c.adaptive.u_high},
                   {"u_low", c.adaptive.u_low},
                   {"burst", c.adaptive.burst},
                   {"max_bursts_per_link", c.adaptive.max_bursts_per_link},
                   {"oracle_knowledge", c.adaptive.oracle_knowledge},
                   {"drain_slotframes", c.drain_slotframes}};
  j["consumer_policy"] = {{"rate", c.consumer_policy.rate},
                          {"adinr_rate", c.consumer_policy.adinr_rate},
                          {"csma_timeout_ms", c.consumer_policy.csma_timeout_ms},
                          {"csma_pit_lifetime_ms", c.consumer_policy.csma_pit_lifetime_ms},
                          {"limited_retries", c.consumer_policy.limited_retries}};
  j["csma"] = {{"min_be", c.csma.min_be},
               {"max_be", c.csma.max_be},
               {"max_backoffs", c.csma.max_backoffs},
               {"max_retries", c.csma.max_retries},
               {"ticks_per_slot", c.csma.ticks_per_slot},
               {"interest_ticks", c.csma.interest_ticks},
               {"data_ticks", c.csma.data_ticks},
               {"control_ticks", c.csma.control_ticks},
               {"ack_ticks", c.csma.ack_ticks}};
  j["routing"] = {{"fib_capacity", c.fib_capacity}, {"exclude_silent_children", c.exclude_silent_children}};
  j["energy"] = {{"tx_mw", c.power.tx_mw},
                 {"rx_mw", c.power.rx_mw},
                 {"sleep_mw", c.power.sleep_mw},
                 {"cpu_sleep_mw", c.power.cpu_sleep_mw}};
  j["run"] = {{"max_slotframes", c.max_slotframes}, {"seed", c.seed}};
  return j;
}

}  // namespace icntsch::harness

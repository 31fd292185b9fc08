#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "icntsch/harness/scenario.hpp"
#include "icntsch/radio/graph.hpp"
#include "icntsch/sim/kernel.hpp"

namespace testing_support {

using icntsch::NodeId;

// Random connected graph on nodes 1..n: a random spanning tree with bounded
// degree plus a few chords. The degree cap keeps the static schedule within
// a 20-slot Interest subframe.
inline icntsch::radio::ConnectivityGraph random_topology(std::uint32_t n, std::uint64_t seed,
                                                         unsigned max_degree = 4, double chord_ratio = 0.3,
                                                         double p_loss = 0.0) {
  icntsch::sim::Rng rng(seed, 0, 0x746f70u);
  icntsch::radio::ConnectivityGraph g;
  g.add_node(1);
  std::vector<unsigned> degree(n + 1, 0);
  for (NodeId v = 2; v <= n; ++v) {
    NodeId u = 0;
    do {
      u = 1 + static_cast<NodeId>(rng.below(v - 1));
    } while (degree[u] >= max_degree - 1);
    g.add_edge(u, v, p_loss);
    ++degree[u];
    ++degree[v];
  }
  const auto chords = static_cast<std::uint32_t>(chord_ratio * n);
  for (std::uint32_t i = 0, tries = 0; i < chords && tries < 50 * n; ++tries) {
    NodeId a = 1 + static_cast<NodeId>(rng.below(n));
    NodeId b = 1 + static_cast<NodeId>(rng.below(n));
    if (a == b || g.adjacent(a, b) || degree[a] >= max_degree || degree[b] >= max_degree) continue;
    g.add_edge(a, b, p_loss);
    ++degree[a];
    ++degree[b];
    ++i;
  }
  return g;
}

// Scenario over a given graph: root and producer 1, consumer the deepest
// node with the largest id.
inline icntsch::harness::ScenarioConfig scenario_for(const icntsch::radio::ConnectivityGraph& g,
                                                     NodeId consumer, std::uint32_t chunks = 100) {
  icntsch::harness::ScenarioConfig c;
  c.name = "random";
  c.nodes = g.nodes();
  for (auto [a, b] : g.edges()) c.edges.push_back({a, b, g.loss(a, b)});
  c.root = 1;
  c.producer = 1;
  c.consumer = consumer;
  c.chunks = chunks;
  return c;
}

}  // namespace testing_support

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "icntsch/harness/trace.hpp"

namespace icntsch::harness {

struct MetricsRecord {
  std::string config;
  std::uint64_t seed = 0;
  bool completed = false;
  double ttc_s = 0.0;  // meaningful only when completed
  double pdr = 0.0;
  std::uint64_t requested = 0;
  std::uint64_t delivered = 0;
  std::uint64_t e2e_retx = 0;
  std::uint64_t dups = 0;
  std::uint64_t mac_retx = 0;
  std::map<NodeId, double> energy_mj;
  std::map<NodeId, double> mean_power_mw;
  double duration_s = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Rebuilds the metrics from the events a run emitted. The runner itself
// fills its record through this function, so trace and record cannot drift.
inline MetricsRecord metrics_from_trace(const std::vector<TraceEvent>& events) {
  MetricsRecord m;
  NodeId consumer = kNoNode;
  double slot_ms = 15.0;
  std::uint64_t last_rx = 0;
  for (const auto& e : events) {
    if (e.event == "run_start") {
      m.config = e.detail.at("config").get<std::string>();
      m.seed = e.detail.at("seed").get<std::uint64_t>();
      m.requested = e.detail.at("chunks").get<std::uint64_t>();
      slot_ms = e.detail.at("slot_ms").get<double>();
      consumer = e.node;
    } else if (e.event == "interest_out" && e.node == consumer) {
      if (e.detail.at("retx").get<bool>()) ++m.e2e_retx;
    } else if (e.event == "chunk_rx" && e.node == consumer) {
      ++m.delivered;
      last_rx = std::max(last_rx, e.asn);
    } else if (e.event == "dup_chunk" && e.node == consumer) {
      ++m.dups;
    } else if (e.event == "mac_retx") {
      ++m.mac_retx;
    } else if (e.event == "energy") {
      m.energy_mj[e.node] = e.detail.at("mJ").get<double>();
      m.mean_power_mw[e.node] = e.detail.at("mean_mW").get<double>();
    } else if (e.event == "run_end") {
      m.duration_s = e.detail.at("duration_s").get<double>();
    }
  }
  m.pdr = m.requested ? static_cast<double>(m.delivered) / static_cast<double>(m.requested) : 0.0;
  m.completed = m.requested > 0 && m.delivered == m.requested;
  if (m.completed) m.ttc_s = static_cast<double>(last_rx + 1) * slot_ms / 1000.0;
  return m;
}

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

inline Stat describe(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Aggregate over repetitions of one configuration. ttc is only averaged over
// completed runs.
struct Summary {
  std::string config;
  std::size_t runs = 0;
  std::size_t completed = 0;
  std::map<std::string, Stat> stats;
  std::map<NodeId, Stat> energy_mj;
  std::map<NodeId, Stat> mean_power_mw;
};

inline Summary summarize(const std::vector<MetricsRecord>& runs) {
  Summary s;
  if (runs.empty()) return s;
  s.config = runs.front().config;
  s.runs = runs.size();
  std::vector<double> ttc, pdr, e2e, dups, mac;
  std::map<NodeId, std::vector<double>> mj, mw;
  for (const auto& r : runs) {
    if (r.completed) {
      ++s.completed;
      ttc.push_back(r.ttc_s);
    }
    pdr.push_back(r.pdr);
    e2e.push_back(static_cast<double>(r.e2e_retx));
    dups.push_back(static_cast<double>(r.dups));
    mac.push_back(static_cast<double>(r.mac_retx));
    for (const auto& [n, v] : r.energy_mj) mj[n].push_back(v);
    for (const auto& [n, v] : r.mean_power_mw) mw[n].push_back(v);
  }
  s.stats["ttc_s"] = describe(ttc);
  s.stats["pdr"] = describe(pdr);
  s.stats["e2e_retx"] = describe(e2e);
  s.stats["dups"] = describe(dups);
  s.stats["mac_retx"] = describe(mac);
  for (const auto& [n, v] : mj) s.energy_mj[n] = describe(v);
  for (const auto& [n, v] : mw) s.mean_power_mw[n] = describe(v);
  return s;
}

// Repetitions stop once the running mean of the key metric stayed within
// `tolerance` (relative) over the last `window` runs, with a hard cap.
struct RepetitionPolicy {
  std::size_t min_runs = 5;
  std::size_t max_runs = 100;
  std::size_t window = 5;
  double tolerance = 0.01;
};

inline double key_metric(const MetricsRecord& r) { return r.completed ? r.ttc_s : r.pdr; }

inline bool converged(const std::vector<MetricsRecord>& runs, const RepetitionPolicy& p = {}) {
  if (runs.size() >= p.max_runs) return true;
  if (runs.size() < std::max(p.min_runs, p.window)) return false;
  std::vector<double> running;
  double sum = 0.0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    sum += key_metric(runs[i]);
    running.push_back(sum / static_cast<double>(i + 1));
  }
  const double last = running.back();
  if (last == 0.0) return true;
  for (std::size_t i = running.size() - p.window; i < running.size(); ++i)
    if (std::abs(running[i] - last) / std::abs(last) > p.tolerance) return false;
  return true;
}

namespace detail {
inline std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(10) << v;
  return o.str();
}
}  // namespace detail

inline std::string results_header(const std::vector<NodeId>& nodes) {
  std::string h = "config,seed,ttc_s,pdr,e2e_retx,dups,mac_retx";
  for (NodeId n : nodes) h += ",energy_node_" + std::to_string(n) + "_mJ";
  return h;
}

inline std::string results_row(const MetricsRecord& r, const std::vector<NodeId>& nodes) {
  std::string s = r.config + "," + std::to_string(r.seed) + ",";
  s += r.completed ? detail::num(r.ttc_s) : "censored";
  s += "," + detail::num(r.pdr) + "," + std::to_string(r.e2e_retx) + "," + std::to_string(r.dups) + "," +
       std::to_string(r.mac_retx);
  for (NodeId n : nodes) {
    auto it = r.energy_mj.find(n);
    s += "," + (it == r.energy_mj.end() ? std::string() : detail::num(it->second));
  }
  return s;
}

// Mean row tagged summary=true in the seed column.
inline std::string summary_row(const Summary& s, const std::vector<NodeId>& nodes) {
  std::string row = s.config + ",summary=true,";
  row += s.completed ? detail::num(s.stats.at("ttc_s").mean) : "censored";
  row += "," + detail::num(s.stats.at("pdr").mean) + "," + detail::num(s.stats.at("e2e_retx").mean) + "," +
         detail::num(s.stats.at("dups").mean) + "," + detail::num(s.stats.at("mac_retx").mean);
  for (NodeId n : nodes) {
    auto it = s.energy_mj.find(n);
    row += "," + (it == s.energy_mj.end() ? std::string() : detail::num(it->second.mean));
  }
  return row;
}

inline void write_summary_csv(std::ostream& os, const std::vector<Summary>& all) {
  os << "config,metric,n,mean,std,min,max\n";
  for (const auto& s : all) {
    auto line = [&](const std::string& metric, const Stat& st) {
      os << s.config << "," << metric << "," << st.n << "," << detail::num(st.mean) << ","
         << detail::num(st.std) << "," << detail::num(st.min) << "," << detail::num(st.max) << "\n";
    };
    for (const auto& [k, st] : s.stats) line(k, st);
    for (const auto& [n, st] : s.energy_mj) line("energy_node_" + std::to_string(n) + "_mJ", st);
    for (const auto& [n, st] : s.mean_power_mw) line("power_node_" + std::to_string(n) + "_mW", st);
  }
}

}  // namespace icntsch::harness

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "icntsch/common.hpp"

namespace icntsch::harness {

struct TraceEvent {
  std::uint64_t asn = 0;
  NodeId node = kNoNode;
  std::string event;
  nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

inline std::string to_json_line(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["asn"] = e.asn;
  j["node"] = e.node;
  j["event"] = e.event;
  j["detail"] = e.detail;
  return j.dump();
}

inline TraceEvent from_json_line(const std::string& line) {
  auto j = nlohmann::ordered_json::parse(line);
  TraceEvent e;
  e.asn = j.at("asn").get<std::uint64_t>();
  e.node = j.at("node").get<NodeId>();
  e.event = j.at("event").get<std::string>();
  e.detail = j.at("detail");
  return e;
}

// In-memory event log. Disabled logs drop everything except the events
// needed to recompute metrics.
class TraceLog {
 public:
  explicit TraceLog(bool verbose = true) : verbose_(verbose) {}

  void emit(std::uint64_t asn, NodeId node, std::string event,
            nlohmann::ordered_json detail = nlohmann::ordered_json::object()) {
    events_.push_back({asn, node, std::move(event), std::move(detail)});
  }
  // Low-level MAC chatter, kept only in verbose mode.
  void debug(std::uint64_t asn, NodeId node, std::string event,
             nlohmann::ordered_json detail = nlohmann::ordered_json::object()) {
    if (verbose_) emit(asn, node, std::move(event), std::move(detail));
  }

  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto& e : events_) out.push_back(to_json_line(e));
    return out;
  }
  std::size_t size() const { return events_.size(); }

 private:
  bool verbose_;
  std::vector<TraceEvent> events_;
};

}  // namespace icntsch::harness

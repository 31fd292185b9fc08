#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "icntsch/tsch/cell.hpp"

namespace icntsch::tsch {

inline constexpr const char* kScheduleCsvHeader = "node,slot_offset,channel_offset,role,peer,ssf,active";

inline void write_schedule_csv(std::ostream& os, const NetworkSchedule& schedules) {
  os << kScheduleCsvHeader << '\n';
  for (const auto& [n, m] : schedules) {
    for (const auto& c : m.cells()) {
      os << n << ',' << c.slot << ',' << unsigned(c.channel) << ',' << role_token(c) << ',';
      if (c.peer == kNoNode) {
        os << '*';
      } else {
        os << c.peer;
      }
      os << ',' << ssf_token(c.ssf) << ',' << (c.active ? 1 : 0) << '\n';
    }
  }
}

// Inverse of write_schedule_csv. Cell use is inferred from the subframe;
// dynamic cells read back as Interest cells.
inline NetworkSchedule read_schedule_csv(std::istream& is, const Partition& partition) {
  NetworkSchedule out;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty schedule file");
  if (line.rfind("node,", 0) != 0) throw ConfigError("schedule file lacks header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
    if (f.size() != 7) throw ConfigError("schedule line " + std::to_string(lineno) + ": expected 7 fields");
    try {
      const NodeId n = static_cast<NodeId>(std::stoul(f[0]));
      Cell c;
      c.slot = static_cast<std::uint32_t>(std::stoul(f[1]));
      c.channel = static_cast<std::uint8_t>(std::stoul(f[2]));
      const std::string& role = f[3];
      if (role == "TX" || role == "BTX") {
        c.role = CellRole::kTx;
      } else if (role == "RX" || role == "BRX") {
        c.role = CellRole::kRx;
      } else if (role == "SHARED") {
        c.role = CellRole::kShared;
      } else {
        throw ConfigError("unknown role " + role);
      }
      c.broadcast = role == "BTX" || role == "BRX";
      c.peer = f[4] == "*" ? kNoNode : static_cast<NodeId>(std::stoul(f[4]));
      const std::string& ssf = f[5];
      if (ssf == "B") {
        c.ssf = Subframe::kBroadcast;
      } else if (ssf == "I") {
        c.ssf = Subframe::kInterest;
      } else if (ssf == "C") {
        c.ssf = Subframe::kContent;
      } else if (ssf == "DYN") {
        c.ssf = Subframe::kDynamic;
      } else {
        throw ConfigError("unknown subframe " + ssf);
      }
      if (c.role == CellRole::kShared || c.broadcast) {
        c.use = CellUse::kBroadcast;
      } else {
        c.use = c.ssf == Subframe::kContent ? CellUse::kContent : CellUse::kInterest;
      }
      c.active = f[6] == "1";
      auto [it, _] = out.try_emplace(n, ScheduleMatrix(n, partition));
      it->second.add(c);
    } catch (const std::logic_error& e) {
      throw ConfigError("schedule line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace icntsch::tsch

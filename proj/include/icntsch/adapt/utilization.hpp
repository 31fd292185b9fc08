#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <string>

#include "icntsch/common.hpp"

namespace icntsch::adapt {

struct AdaptationParams {
  std::uint32_t window = 4;  // slotframes
  double u_high = 0.9;
  double u_low = 0.25;
  std::uint32_t burst = 2;  // Interest cells per allocation
  std::uint32_t max_bursts_per_link = 3;
  // Endpoints check the true neighborhood instead of piggybacked knowledge.
  bool oracle_knowledge = false;

  void validate() const {
    if (window == 0) throw ConfigError("adaptation window must be >= 1");
    if (burst == 0) throw ConfigError("burst size must be >= 1");
    if (!(u_low < u_high)) throw ConfigError("u_low must be below u_high");
    if (u_low < 0.0 || u_high > 1.0) throw ConfigError("utilization thresholds must lie in [0,1]");
  }
};

enum class Decision : std::uint8_t { kHold, kAllocate, kDeallocate, kReject };

inline const char* decision_token(Decision d) {
  switch (d) {
    case Decision::kHold: return "HOLD";
    case Decision::kAllocate: return "ALLOCATE";
    case Decision::kDeallocate: return "DEALLOCATE";
    case Decision::kReject: return "REJECT";
  }
  return "?";
}

// Sliding window of (scheduled, used) Interest cells of one directed link.
class UtilizationMonitor {
 public:
  explicit UtilizationMonitor(std::uint32_t window = 4) : window_(window) {}

  void record(std::uint32_t scheduled, std::uint32_t used) {
    frames_.push_back({scheduled, used});
    while (frames_.size() > window_) frames_.pop_front();
  }
  bool full() const { return frames_.size() >= window_; }
  void reset() { frames_.clear(); }

  // used / scheduled over the window; 0 when nothing was scheduled.
  double utilization() const {
    std::uint64_t s = 0, u = 0;
    for (const auto& f : frames_) {
      s += f.scheduled;
      u += f.used;
    }
    return s == 0 ? 0.0 : static_cast<double>(u) / static_cast<double>(s);
  }
  double mean_used() const {
    if (frames_.empty()) return 0.0;
    std::uint64_t u = 0;
    for (const auto& f : frames_) u += f.used;
    return static_cast<double>(u) / static_cast<double>(frames_.size());
  }
  std::size_t frames() const { return frames_.size(); }

 private:
  struct Frame {
    std::uint32_t scheduled;
    std::uint32_t used;
  };
  std::uint32_t window_;
  std::deque<Frame> frames_;
};

inline Decision evaluate_adaptation(double utilization, const AdaptationParams& p, bool has_dynamic) {
  if (utilization > p.u_high) return Decision::kAllocate;
  if (utilization < p.u_low && has_dynamic) return Decision::kDeallocate;
  return Decision::kHold;
}

// Bursts worth keeping for the observed load: enough that the load would sit
// at the upper threshold. Always strictly fewer than `current`.
inline std::uint32_t bursts_to_keep(double mean_used, std::uint32_t static_cells, std::uint32_t current,
                                    const AdaptationParams& p) {
  if (current == 0) return 0;
  const double needed_cells = mean_used / p.u_high - static_cast<double>(static_cells);
  std::uint32_t keep = 0;
  if (needed_cells > 0.0) keep = static_cast<std::uint32_t>(std::ceil(needed_cells / p.burst - 1e-9));
  return std::min(keep, current - 1);
}

}  // namespace icntsch::adapt

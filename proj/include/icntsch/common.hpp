#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace icntsch {

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Number of IEEE 802.15.4 channels; channel offsets and physical channels
// both live in [0, kNumChannels).
inline constexpr unsigned kNumChannels = 16;

// Raised for malformed scenarios, unknown nodes and invalid parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when no conflict-free schedule exists for the requested capacity.
class ScheduleInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace icntsch

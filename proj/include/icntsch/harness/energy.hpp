#pragma once

#include <array>
#include <cstdint>
#include <map>

#include "icntsch/common.hpp"

namespace icntsch::harness {

enum class RadioState : std::uint8_t { kTx = 0, kRx = 1, kSleep = 2, kCpuSleep = 3 };

struct PowerTable {
  double tx_mw = 60.0;
  double rx_mw = 55.0;
  double sleep_mw = 0.1;
  double cpu_sleep_mw = 0.1;

  double of(RadioState s) const {
    switch (s) {
      case RadioState::kTx: return tx_mw;
      case RadioState::kRx: return rx_mw;
      case RadioState::kSleep: return sleep_mw;
      case RadioState::kCpuSleep: return cpu_sleep_mw;
    }
    return 0.0;
  }
};

// Time spent per radio state, in integer microseconds so that charging is
// exact and order-independent.
class NodeEnergy {
 public:
  void charge(RadioState s, std::uint64_t micros) { us_[static_cast<std::size_t>(s)] += micros; }
  std::uint64_t micros(RadioState s) const { return us_[static_cast<std::size_t>(s)]; }
  std::uint64_t total_micros() const { return us_[0] + us_[1] + us_[2] + us_[3]; }

  double millijoules(const PowerTable& p) const {
    double nj = 0.0;  // us * mW = nJ
    for (std::size_t i = 0; i < us_.size(); ++i)
      nj += static_cast<double>(us_[i]) * p.of(static_cast<RadioState>(i));
    return nj / 1e6;
  }

  // Mean power over the charged time.
  double mean_mw(const PowerTable& p) const {
    auto t = total_micros();
    return t == 0 ? 0.0 : millijoules(p) * 1e6 / static_cast<double>(t);  // mJ/us -> mW
  }

 private:
  std::array<std::uint64_t, 4> us_{};
};

using EnergyLedger = std::map<NodeId, NodeEnergy>;

}  // namespace icntsch::harness

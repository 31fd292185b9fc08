#pragma once

#include "icntsch/adapt/allocator.hpp"
#include "icntsch/adapt/bitfield.hpp"
#include "icntsch/adapt/controller.hpp"
#include "icntsch/adapt/utilization.hpp"
#include "icntsch/common.hpp"
#include "icntsch/csma/csma_mac.hpp"
#include "icntsch/harness/energy.hpp"
#include "icntsch/harness/experiment.hpp"
#include "icntsch/harness/metrics.hpp"
#include "icntsch/harness/network.hpp"
#include "icntsch/harness/scenario.hpp"
#include "icntsch/harness/trace.hpp"
#include "icntsch/icn/fib.hpp"
#include "icntsch/icn/forwarder.hpp"
#include "icntsch/icn/name.hpp"
#include "icntsch/icn/packet.hpp"
#include "icntsch/icn/pit.hpp"
#include "icntsch/link.hpp"
#include "icntsch/radio/graph.hpp"
#include "icntsch/radio/medium.hpp"
#include "icntsch/routing/dodag.hpp"
#include "icntsch/routing/strategy.hpp"
#include "icntsch/sim/kernel.hpp"
#include "icntsch/tsch/cell.hpp"
#include "icntsch/tsch/collision_checker.hpp"
#include "icntsch/tsch/mac.hpp"
#include "icntsch/tsch/schedule_builder.hpp"
#include "icntsch/tsch/schedule_io.hpp"
#include "icntsch/urt/urt.hpp"

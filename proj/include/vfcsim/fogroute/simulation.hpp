#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vfcsim/fogroute/protocol.hpp"
#include "vfcsim/metrics/metrics.hpp"
#include "vfcsim/mobility/trace.hpp"

namespace vfcsim::fogroute {

enum class ContentOrdering { random, fifo };

struct FogRouteScenarioConfig {
    std::vector<mobility::Station> fog_servers;
    double fog_range_m = 500.0;  // coverage radius
    std::size_t content_count = 20;
    double content_size_bytes = 10.0e6;
    double affordable_delay_s = 36000.0;  // T_d
    double validation_time_s = 0.0;
    double uplink_bytes_per_s = 1.0e6;
    double hello_interval_s = 60.0;
    ContentOrdering ordering = ContentOrdering::random;
    bool fallback_enabled = true;
    double warmup_s = 7200.0;        // pattern history before requests issue
    double horizon_s = 43200.0;      // convergence horizon after requests
    std::size_t seed_copies = 3;     // servers initially holding each content
    double pickup_deadline_s = 7200.0;  // Decline if no carrier picks up in time
    double ack_timeout_s = 41400.0;  // cloud falls back if no Ack by then
    double cloud_push_latency_s = 60.0;
};

struct MessageCounters {
    std::size_t hellos = 0;
    std::size_t requests = 0;
    std::size_t accepts = 0;
    std::size_t declines = 0;
    std::size_t acks = 0;
    std::size_t dtn_deliveries = 0;   // first delivery per stale pair
    std::size_t direct_pushes = 0;    // plan-time pushes plus fallbacks
};

struct FogRouteRunResult {
    std::vector<metrics::DeliveryRecord> deliveries;
    std::vector<metrics::ConvergenceRecord> convergence;
    MessageCounters counters;
    std::size_t stale_pairs = 0;
    std::size_t unresolved_pairs = 0;
};

// Runs the FogRoute control and data planes over the given trace set:
// staleness detection at the end of warmup, carrier selection per stale pair,
// DTN pickup/delivery from the devices' contact intervals, and the
// Request/Accept/Decline/Ack exchange with cloud fallback.
FogRouteRunResult run_fogroute(const FogRouteScenarioConfig& config,
                               const mobility::TraceSet& traces, std::uint64_t seed);

}  // namespace vfcsim::fogroute

#pragma once

#include <optional>
#include <vector>

#include "vfcsim/cvfh/protocol.hpp"
#include "vfcsim/metrics/metrics.hpp"
#include "vfcsim/mobility/trace.hpp"
#include "vfcsim/sim/rng.hpp"
#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::cvfh {

struct HandoffLinkParams {
    unsigned n_vv = 4;
    unsigned n_vi = 4;
    unsigned n_80211 = 8;
    double t_pkt_vv_s = 0.002;
    double t_pkt_vi_s = 0.002;
    double t_auth_s = 0.030;
    double t_asso_s = 0.030;
    double pe_vv = 0.02;
    double pe_vi = 0.02;
    unsigned retry_budget = 3;  // retransmissions per packet
};

struct ExchangeOutcome {
    bool success = false;
    double elapsed_s = 0.0;
    unsigned packets_sent = 0;
};

// n packets over a lossy link; each packet is retried up to retry_budget
// times, every (re)transmission costs t_pkt. Fails when a packet exhausts
// its budget.
ExchangeOutcome packet_exchange(unsigned n, double t_pkt_s, double pe,
                                unsigned retry_budget, sim::RngStream& rng);

// IEEE 802.11 baseline: N_80211 packets to the AP, then authentication and
// association. The auth/asso delay is always part of the latency.
metrics::HandoffResult handoff_80211(const HandoffLinkParams& p, sim::RngStream& rng,
                                     sim::SimTime trigger_time);

struct CvfhAttemptOutcome {
    bool success = false;
    bool direct_ap = false;  // neighbor was a TAP, no V2V leg
    double latency_s = 0.0;
    unsigned packets_vv = 0;
    unsigned packets_vi = 0;
    std::string tap_id;
    std::string nav_id;
};

// One CVFH acquisition round at trigger time: direct AP if one is in range,
// otherwise neighbor sampling, qualification, timer race, and the V2V + V2I
// packet exchanges. No auth/asso component ever.
CvfhAttemptOutcome execute_handoff(const VehicleState& cv,
                                   const std::vector<AccessPoint>& aps,
                                   const mobility::HighwayFlowParams& flow,
                                   const HandoffLinkParams& link,
                                   const RadioConfig& radio,
                                   const NeighborReplyConfig& reply_cfg,
                                   sim::RngStream& rng);

struct CvfhScenarioConfig {
    double road_length_m = 9600.0;  // circular
    double ap_spacing_m = 400.0;
    double ap_range_m = 250.0;
    RadioConfig radio;
    HandoffTriggerConfig trigger;
    HandoffLinkParams link;
    NeighborReplyConfig reply;
    mobility::HighwayFlowParams flow{0.03, 8.0, 30.0, 0.5, 0.0};  // road_length set at run
    double cv_speed_mps = 20.0;
    double packet_rate_hz = 50.0;
    double packet_size_bits = 8192.0;
    double duration_s = 600.0;
    double retry_interval_s = 0.5;
};

struct CvfhRunResult {
    std::vector<metrics::HandoffResult> handoffs;
    metrics::ThroughputRecord throughput;
    double associated_time_s = 0.0;
};

// Drives one vehicle around a circular road of evenly spaced APs under the
// chosen scheme and collects handoff + throughput records.
CvfhRunResult run_cvfh_scenario(const CvfhScenarioConfig& config,
                                metrics::HandoffScheme scheme, std::uint64_t seed);

}  // namespace vfcsim::cvfh

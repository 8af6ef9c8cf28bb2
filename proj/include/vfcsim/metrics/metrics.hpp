#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::metrics {

using sim::SimTime;

enum class DeliveryChannel { dtn, cloud_direct };

struct DeliveryRecord {
    std::string content_id;
    std::string target_fog_id;
    SimTime requested_at = 0.0;
    std::optional<SimTime> delivered_at;
    DeliveryChannel channel = DeliveryChannel::dtn;
};

struct ConvergenceRecord {
    std::string fog_server_id;
    std::size_t contents_required = 0;
    std::size_t contents_received = 0;
    std::optional<SimTime> converged_at;
    SimTime started_at = 0.0;
};

enum class HandoffScheme { cvfh, ieee80211 };

struct HandoffResult {
    std::string cv_id;
    HandoffScheme scheme = HandoffScheme::cvfh;
    SimTime trigger_time = 0.0;
    SimTime completion_time = 0.0;
    bool success = false;
    unsigned packets_vv = 0;
    unsigned packets_vi = 0;
    double auth_asso_time_s = 0.0;  // always 0 for cvfh results
    double speed_mps = 0.0;
    double packet_rate_hz = 0.0;
    double delay_s() const { return completion_time - trigger_time; }
};

struct ThroughputRecord {
    std::string vehicle_id;
    HandoffScheme scheme = HandoffScheme::cvfh;
    double bits_delivered = 0.0;
    SimTime window_start = 0.0;
    SimTime window_end = 0.0;
    double speed_mps = 0.0;
    double packet_rate_hz = 0.0;
};

// Fraction of DTN-channel records delivered within expected_delay. Cloud
// fallback records are excluded unless include_cloud_fallback is set.
double delivery_ratio(const std::vector<DeliveryRecord>& records, double expected_delay_s,
                      bool include_cloud_fallback = false);

struct ConvergenceSummary {
    std::vector<double> durations_s;  // sorted, converged servers only
    std::size_t unconverged = 0;
};

ConvergenceSummary convergence_times(const std::vector<ConvergenceRecord>& records);

struct GroupStats {
    double mean_s = 0.0;
    double stddev_s = 0.0;  // population formula
    std::size_t successes = 0;
    std::size_t failures = 0;
};

enum class HandoffGroupBy { speed, packet_rate };

// group key -> scheme -> stats over successful handoffs
std::map<double, std::map<HandoffScheme, GroupStats>> handoff_delay_stats(
    const std::vector<HandoffResult>& results, HandoffGroupBy group_by);

struct ThroughputSummary {
    std::map<std::string, double> per_vehicle_bps;
    double aggregate_bps = 0.0;
};

ThroughputSummary throughput(const std::vector<ThroughputRecord>& records,
                             double duration_s);

struct AllMetrics {
    std::vector<DeliveryRecord> deliveries;
    std::vector<ConvergenceRecord> convergence;
    std::vector<HandoffResult> handoffs;
    std::vector<ThroughputRecord> throughput;
};

enum class ReportFormat { csv, json };

// Deterministic column and row order; byte-identical on identical inputs.
// Writes delivery.csv / convergence.csv / handoff.csv / throughput.csv (or
// one .json per family) under out_dir.
void emit_report(const AllMetrics& metrics, ReportFormat format,
                 const std::string& out_dir);

const char* scheme_name(HandoffScheme s);

}  // namespace vfcsim::metrics

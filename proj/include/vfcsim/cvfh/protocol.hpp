#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfcsim/mobility/trace.hpp"
#include "vfcsim/sim/rng.hpp"
#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::cvfh {

using mobility::Vec2;
using sim::SimTime;

struct AccessPoint {
    std::string ap_id;
    Vec2 position;
    double range_m = 0.0;
    std::string ip;
    std::string mac;
};

struct RadioConfig {
    double tx_power_dbm = 20.0;
    double path_loss_exponent = 2.0;
    double reference_distance_m = 1.0;
    // plr_model: constant mode returns plr_constant; ramp mode has floor
    // plr_floor inside 0.8 R and ramps linearly to 1.0 at R
    bool plr_constant_mode = false;
    double plr_constant = 0.0;
    double plr_floor = 0.05;
};

// log-distance path loss: P_tx - 10 n log10(d / d0)
double rssi_model(double distance_m, const RadioConfig& config);
double plr_model(double distance_m, double range_m, const RadioConfig& config);

struct HandoffTriggerConfig {
    double rssi_decline_window_s = 1.0;  // TI
    double plr_threshold = 0.4;          // PLR_TH
    double rssi_sample_interval_s = 0.1;
};

struct RssiSample {
    SimTime t = 0.0;
    double rssi_dbm = 0.0;
};

struct VehicleState {
    std::string vehicle_id;
    Vec2 position;
    double speed_mps = 0.0;
    Vec2 heading{1.0, 0.0};
    std::optional<std::string> sap_id;
    std::optional<std::string> tap_id;
    std::optional<std::string> nav_id;
    std::string tap_ip, tap_mac;
    std::deque<RssiSample> rssi_window;
    double plr_estimate = 0.0;  // EWMA over packet outcomes

    void push_rssi(SimTime t, double rssi, double window_span_s) {
        rssi_window.push_back({t, rssi});
        while (!rssi_window.empty() && rssi_window.front().t < t - window_span_s) {
            rssi_window.pop_front();
        }
    }
    void observe_packet(bool lost, double weight = 0.1) {
        plr_estimate = (1.0 - weight) * plr_estimate + weight * (lost ? 1.0 : 0.0);
    }
};

// true iff RSSI is strictly decreasing across every consecutive sample pair
// spanning the last TI seconds and the PLR estimate exceeds the threshold
bool detect_trigger(const VehicleState& cv, const HandoffTriggerConfig& config,
                    SimTime now);

struct NeighborReq {
    std::string cv_id;
    std::string cv_sap_id;
    Vec2 cv_position;
    Vec2 cv_heading;
    std::uint64_t request_id = 0;
};

struct NeighborRep {
    std::string responder_id;
    bool responder_is_ap = false;
    std::string tap_ap_id;
    std::string tap_ip;
    std::string tap_mac;
    std::uint64_t request_id = 0;
};

struct NeighborVehicle {
    std::string vehicle_id;
    Vec2 position;
    Vec2 heading{1.0, 0.0};
    std::optional<std::string> sap_id;
    double plr_estimate = 0.0;
    bool heard_reply = false;  // saw a NeighborRep for this request already
};

// (a) different SAP, (b) ahead of CV along its heading, (c) has not heard a
// reply for this request. Caller guarantees one-hop range.
bool qualify_neighbor(const NeighborVehicle& nv, const NeighborReq& req);

struct NeighborReplyConfig {
    double base_delay_s = 0.010;  // timer = base_delay * own PLR
};

// Timer duration for a qualified neighbor's suppression race; the lowest-loss
// neighbor fires first.
double neighbor_reply_delay(const NeighborVehicle& nv, const NeighborReplyConfig& config);

struct StaleReplyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Apply a validated first reply: AP responder -> TAP directly with ip/mac;
// vehicle responder -> NAV plus its SAP as TAP. Later replies are ignored.
void process_reply(VehicleState& cv, const NeighborRep& rep,
                   const std::vector<AccessPoint>& aps,
                   std::uint64_t outstanding_request_id);

}  // namespace vfcsim::cvfh

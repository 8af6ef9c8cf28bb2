#include "vfcsim/cvfh/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace vfcsim::cvfh {

double rssi_model(double distance_m, const RadioConfig& config) {
    if (distance_m <= 0.0) {
        throw std::invalid_argument("rssi_model: distance must be positive");
    }
    return config.tx_power_dbm -
           10.0 * config.path_loss_exponent *
               std::log10(distance_m / config.reference_distance_m);
}

double plr_model(double distance_m, double range_m, const RadioConfig& config) {
    if (distance_m < 0.0) {
        throw std::invalid_argument("plr_model: negative distance");
    }
    if (config.plr_constant_mode) {
        return distance_m <= range_m ? config.plr_constant : 1.0;
    }
    double knee = 0.8 * range_m;
    if (distance_m <= knee) return config.plr_floor;
    if (distance_m >= range_m) return 1.0;
    double f = (distance_m - knee) / (range_m - knee);
    return config.plr_floor + f * (1.0 - config.plr_floor);
}

bool detect_trigger(const VehicleState& cv, const HandoffTriggerConfig& config,
                    SimTime now) {
    if (cv.plr_estimate <= config.plr_threshold) return false;
    if (cv.rssi_window.size() < 2) return false;
    // tolerance so a window spanning exactly TI at accumulated sample times
    // (now = k * interval with rounding) still counts
    constexpr double kEdge = 1e-9;
    double window_start = now - config.rssi_decline_window_s;
    if (cv.rssi_window.front().t > window_start + kEdge) return false;  // too short
    const RssiSample* prev = nullptr;
    for (const auto& s : cv.rssi_window) {
        if (s.t < window_start - kEdge) {
            prev = &s;
            continue;
        }
        if (prev && s.rssi_dbm >= prev->rssi_dbm) return false;
        prev = &s;
    }
    return true;
}

bool qualify_neighbor(const NeighborVehicle& nv, const NeighborReq& req) {
    if (nv.heard_reply) return false;
    if (nv.sap_id && nv.sap_id == std::optional<std::string>(req.cv_sap_id)) return false;
    if (!nv.sap_id) return false;  // unassociated neighbor has no TAP to offer
    // ahead of CV along its heading, and moving the same way
    double proj = (nv.position.x - req.cv_position.x) * req.cv_heading.x +
                  (nv.position.y - req.cv_position.y) * req.cv_heading.y;
    double align = nv.heading.x * req.cv_heading.x + nv.heading.y * req.cv_heading.y;
    return proj > 0.0 && align > 0.0;
}

double neighbor_reply_delay(const NeighborVehicle& nv, const NeighborReplyConfig& config) {
    return config.base_delay_s * nv.plr_estimate;
}

void process_reply(VehicleState& cv, const NeighborRep& rep,
                   const std::vector<AccessPoint>& aps,
                   std::uint64_t outstanding_request_id) {
    if (rep.request_id != outstanding_request_id) {
        throw StaleReplyError("process_reply: reply for stale request " +
                              std::to_string(rep.request_id));
    }
    if (cv.tap_id) return;  // first validated reply wins
    auto ap = std::find_if(aps.begin(), aps.end(), [&](const AccessPoint& a) {
        return a.ap_id == rep.tap_ap_id;
    });
    if (ap == aps.end()) {
        throw StaleReplyError("process_reply: unknown TAP " + rep.tap_ap_id);
    }
    cv.tap_id = rep.tap_ap_id;
    cv.tap_ip = ap->ip;
    cv.tap_mac = ap->mac;
    if (!rep.responder_is_ap) cv.nav_id = rep.responder_id;
}

}  // namespace vfcsim::cvfh

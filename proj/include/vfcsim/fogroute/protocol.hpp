#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::fogroute {

using sim::SimTime;

struct Content {
    std::string content_id;
    double size_bytes = 0.0;
    double affordable_delay_s = 0.0;  // T_d
    SimTime date_of_update = 0.0;
    double validation_time_s = 0.0;
};

struct GlobalContentEntry {
    std::string fog_server_id;
    std::string content_id;
    SimTime date_of_update = 0.0;
    double validation_time_s = 0.0;
};

struct FogServerEntry {
    std::string fog_server_id;
    std::set<std::string> content_ids;
    std::set<std::string> mobile_device_ids;
};

struct MdmpEntry {
    std::string mobile_device_id;
    std::string fog_server_id;
    double linked_time_s = 0.0;
    std::string social_attribute;  // stored, unused by the algorithms
};

struct CloudTables {
    std::vector<GlobalContentEntry> gc;
    std::map<std::string, FogServerEntry> fs;  // keyed by fog_server_id
    std::vector<MdmpEntry> mdmp;
};

// --- message state machine -------------------------------------------------

enum class MessageType { hello, request, accept, decline, ack };

struct DissemMessage {
    MessageType type = MessageType::hello;
    std::string sender_id;
    std::string receiver_id;
    SimTime send_time = 0.0;
    std::string content_id;
    std::string target_fog_id;              // request only
    std::vector<std::string> carrier_ids;   // request only
    std::string decline_reason;             // decline only
    std::set<std::string> hello_content_ids;
    std::set<std::string> hello_device_ids;
};

// --- carrier selection -----------------------------------------------------

struct CarrierCandidate {
    std::string device_id;
    bool scheduled = false;
    double contact_frequency = 0.0;  // ConFre: contacts with the target server
    double delivery_time_s = 0.0;    // DeliTime toward the target server
    // A device survives the first filter when its measured connection time
    // exceeds the upload time the content needs at its uplink rate.
    double connection_time_s = 0.0;  // measured mean contact duration with the target
    double upload_time_s = 0.0;      // content size / device uplink rate
};

struct CarrierAssignment {
    std::vector<std::string> scheduled;      // x devices
    std::vector<std::string> non_scheduled;  // y devices
    std::string content_id;
    std::string target_fog_id;
    std::size_t total() const { return scheduled.size() + non_scheduled.size(); }
};

struct EmptyAssignmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StalePair {
    std::string target_fog_id;
    std::string content_id;
};

// (target, content) pairs where a fresher copy exists elsewhere (or the target
// lacks the content) and the target copy's validation window has lapsed.
std::vector<StalePair> detect_stale(const CloudTables& tables, SimTime now);

// DeliProb_m = (ConFre_m / sum ConFre) * (1 - DeliTime_m / sum DeliTime)
double delivery_probability(std::size_t m, const std::vector<CarrierCandidate>& candidates);

// Carrier selection: filter on connection time, split scheduled/non-scheduled,
// rank non-scheduled by delivery probability, grow y while the mean delivery
// time over x + y carriers stays below T_d. Throws when nothing survives.
CarrierAssignment select_carriers(const std::vector<CarrierCandidate>& candidates,
                                  double affordable_delay_s,
                                  const std::string& content_id,
                                  const std::string& target_fog_id);

struct Plan {
    enum class Kind { direct_cloud_push, dtn_via_carriers } kind;
    CarrierAssignment assignment;  // meaningful for dtn_via_carriers
};

Plan plan_dissemination(bool content_on_other_server,
                        const std::vector<CarrierCandidate>& candidates,
                        double affordable_delay_s, const std::string& content_id,
                        const std::string& target_fog_id);

// closed comparison: a contact exactly as long as the upload still succeeds
bool carrier_transport(double contact_duration_s, double content_size_bytes,
                       double uplink_bytes_per_s);

// --- per-node message handling --------------------------------------------

struct NodeAction {
    enum class Kind {
        copy_to_carrier,    // fog server hands content to an attached carrier
        update_tables,      // cloud applies GC + FS rows for (target, content)
        fallback_direct_push,
        deliver_content,    // target fog server stores the content
        none
    } kind = Kind::none;
    std::string content_id;
    std::string fog_server_id;
    std::vector<std::string> carrier_ids;
};

struct HandleResult {
    std::vector<NodeAction> actions;
    std::vector<DissemMessage> follow_ups;
};

struct CloudState {
    std::string node_id = "cloud";
    CloudTables tables;
    std::map<std::string, Content> catalog;
};

struct FogServerState {
    std::string node_id;
    std::set<std::string> contents;
    std::set<std::string> attached_devices;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fog-server side: Request -> copy to attached carriers, Accept/Decline.
// `transfer_ok` is the outcome of carrier_transport for the chosen carrier.
HandleResult handle_fog_message(FogServerState& fs, const DissemMessage& msg,
                                bool transfer_ok);

// Target fog server receives the content from a carrier: store it, Ack to cloud.
HandleResult handle_carrier_delivery(FogServerState& fs, const std::string& content_id,
                                     SimTime now);

// Cloud side: Ack -> transactional GC + FS update; Decline -> direct push;
// Hello -> refresh the FS row for the sender.
HandleResult handle_cloud_message(CloudState& cloud, const DissemMessage& msg);

}  // namespace vfcsim::fogroute

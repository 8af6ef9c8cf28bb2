#include "vfcsim/fogroute/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace vfcsim::fogroute {

std::vector<StalePair> detect_stale(const CloudTables& tables, SimTime now) {
    // freshest copy per content across all fog servers
    std::map<std::string, SimTime> newest;
    for (const auto& row : tables.gc) {
        auto it = newest.find(row.content_id);
        if (it == newest.end() || row.date_of_update > it->second) {
            newest[row.content_id] = row.date_of_update;
        }
    }
    std::map<std::pair<std::string, std::string>, const GlobalContentEntry*> by_key;
    for (const auto& row : tables.gc) {
        by_key[{row.fog_server_id, row.content_id}] = &row;
    }
    std::vector<StalePair> out;
    for (const auto& [fs_id, fs_row] : tables.fs) {
        for (const auto& [content_id, newest_date] : newest) {
            auto it = by_key.find({fs_id, content_id});
            if (it == by_key.end()) {
                out.push_back({fs_id, content_id});
                continue;
            }
            const GlobalContentEntry& own = *it->second;
            bool outdated = own.date_of_update < newest_date;
            bool lapsed = now >= own.date_of_update + own.validation_time_s;
            if (outdated && lapsed) out.push_back({fs_id, content_id});
        }
    }
    std::sort(out.begin(), out.end(), [](const StalePair& a, const StalePair& b) {
        return std::tie(a.target_fog_id, a.content_id) <
               std::tie(b.target_fog_id, b.content_id);
    });
    return out;
}

double delivery_probability(std::size_t m,
                            const std::vector<CarrierCandidate>& candidates) {
    if (candidates.empty() || m >= candidates.size()) {
        throw std::invalid_argument("delivery_probability: bad candidate index");
    }
    double sum_fre = 0.0, sum_time = 0.0;
    for (const auto& c : candidates) {
        if (!std::isfinite(c.delivery_time_s)) {
            throw std::invalid_argument("delivery_probability: non-finite DeliTime");
        }
        sum_fre += c.contact_frequency;
        sum_time += c.delivery_time_s;
    }
    if (sum_fre <= 0.0 || sum_time <= 0.0) {
        throw std::invalid_argument("delivery_probability: non-positive sums");
    }
    const CarrierCandidate& c = candidates[m];
    return (c.contact_frequency / sum_fre) * (1.0 - c.delivery_time_s / sum_time);
}

CarrierAssignment select_carriers(const std::vector<CarrierCandidate>& candidates,
                                  double affordable_delay_s,
                                  const std::string& content_id,
                                  const std::string& target_fog_id) {
    // filter: connection time must exceed the required upload time
    std::vector<CarrierCandidate> survivors;
    for (const auto& c : candidates) {
        if (c.connection_time_s > c.upload_time_s) survivors.push_back(c);
    }
    if (survivors.empty()) {
        throw EmptyAssignmentError("select_carriers: no candidate passes the filters");
    }

    CarrierAssignment assignment;
    assignment.content_id = content_id;
    assignment.target_fog_id = target_fog_id;

    double scheduled_time_sum = 0.0;
    std::vector<CarrierCandidate> non_scheduled;
    for (const auto& c : survivors) {
        if (c.scheduled) {
            if (c.delivery_time_s <= affordable_delay_s) {
                assignment.scheduled.push_back(c.device_id);
                scheduled_time_sum += c.delivery_time_s;
            }
        } else if (std::isfinite(c.delivery_time_s)) {
            non_scheduled.push_back(c);
        }
    }

    std::size_t x = assignment.scheduled.size();
    if (non_scheduled.size() == 1) {
        // the relative penalty degenerates to 0 for a lone candidate;
        // a single survivor is taken on its delivery time alone.
        if (non_scheduled[0].delivery_time_s <= affordable_delay_s) {
            assignment.non_scheduled.push_back(non_scheduled[0].device_id);
        }
    } else if (non_scheduled.size() > 1) {
        std::vector<std::size_t> order(non_scheduled.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<double> prob(non_scheduled.size());
        for (std::size_t i = 0; i < prob.size(); ++i) {
            prob[i] = delivery_probability(i, non_scheduled);
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (prob[a] != prob[b]) return prob[a] > prob[b];
            return non_scheduled[a].device_id < non_scheduled[b].device_id;
        });
        // greedy prefix: stop at the first candidate that pushes the mean
        // delivery time to T_d or beyond
        double ns_time_sum = 0.0;
        for (std::size_t idx : order) {
            double trial_sum = scheduled_time_sum + ns_time_sum +
                               non_scheduled[idx].delivery_time_s;
            double trial_count =
                static_cast<double>(x + assignment.non_scheduled.size() + 1);
            if (trial_sum / trial_count < affordable_delay_s) {
                assignment.non_scheduled.push_back(non_scheduled[idx].device_id);
                ns_time_sum += non_scheduled[idx].delivery_time_s;
            } else {
                break;
            }
        }
    }

    if (assignment.total() == 0) {
        throw EmptyAssignmentError("select_carriers: no carrier satisfies T_d");
    }
    return assignment;
}

Plan plan_dissemination(bool content_on_other_server,
                        const std::vector<CarrierCandidate>& candidates,
                        double affordable_delay_s, const std::string& content_id,
                        const std::string& target_fog_id) {
    if (!content_on_other_server) {
        return Plan{Plan::Kind::direct_cloud_push, {}};
    }
    try {
        return Plan{Plan::Kind::dtn_via_carriers,
                    select_carriers(candidates, affordable_delay_s, content_id,
                                    target_fog_id)};
    } catch (const EmptyAssignmentError&) {
        return Plan{Plan::Kind::direct_cloud_push, {}};
    }
}

bool carrier_transport(double contact_duration_s, double content_size_bytes,
                       double uplink_bytes_per_s) {
    return contact_duration_s >= content_size_bytes / uplink_bytes_per_s;
}

HandleResult handle_fog_message(FogServerState& fs, const DissemMessage& msg,
                                bool transfer_ok) {
    if (msg.receiver_id != fs.node_id) {
        throw ProtocolError("handle_fog_message: message addressed to " +
                            msg.receiver_id + ", handled by " + fs.node_id);
    }
    if (msg.type != MessageType::request) {
        throw ProtocolError("handle_fog_message: fog server only handles requests");
    }
    if (!fs.contents.count(msg.content_id)) {
        throw ProtocolError("handle_fog_message: unknown content " + msg.content_id);
    }
    HandleResult result;
    DissemMessage reply;
    reply.sender_id = fs.node_id;
    reply.receiver_id = msg.sender_id;
    reply.send_time = msg.send_time;
    reply.content_id = msg.content_id;
    reply.target_fog_id = msg.target_fog_id;
    if (transfer_ok) {
        result.actions.push_back({NodeAction::Kind::copy_to_carrier, msg.content_id,
                                  fs.node_id, msg.carrier_ids});
        reply.type = MessageType::accept;
    } else {
        reply.type = MessageType::decline;
        reply.decline_reason = "transfer_failed";
    }
    result.follow_ups.push_back(std::move(reply));
    return result;
}

HandleResult handle_carrier_delivery(FogServerState& fs, const std::string& content_id,
                                     SimTime now) {
    HandleResult result;
    fs.contents.insert(content_id);
    result.actions.push_back(
        {NodeAction::Kind::deliver_content, content_id, fs.node_id, {}});
    DissemMessage ack;
    ack.type = MessageType::ack;
    ack.sender_id = fs.node_id;
    ack.receiver_id = "cloud";
    ack.send_time = now;
    ack.content_id = content_id;
    ack.target_fog_id = fs.node_id;
    result.follow_ups.push_back(std::move(ack));
    return result;
}

HandleResult handle_cloud_message(CloudState& cloud, const DissemMessage& msg) {
    if (msg.receiver_id != cloud.node_id) {
        throw ProtocolError("handle_cloud_message: message addressed to " +
                            msg.receiver_id);
    }
    HandleResult result;
    switch (msg.type) {
        case MessageType::ack: {
            auto cat = cloud.catalog.find(msg.content_id);
            if (cat == cloud.catalog.end()) {
                throw ProtocolError("handle_cloud_message: unknown content " +
                                    msg.content_id);
            }
            // GC and FS rows update together
            const std::string& target = msg.target_fog_id;
            auto row = std::find_if(cloud.tables.gc.begin(), cloud.tables.gc.end(),
                                    [&](const GlobalContentEntry& e) {
                                        return e.fog_server_id == target &&
                                               e.content_id == msg.content_id;
                                    });
            if (row == cloud.tables.gc.end()) {
                cloud.tables.gc.push_back({target, msg.content_id,
                                           cat->second.date_of_update,
                                           cat->second.validation_time_s});
            } else {
                row->date_of_update = cat->second.date_of_update;
                row->validation_time_s = cat->second.validation_time_s;
            }
            cloud.tables.fs[target].fog_server_id = target;
            cloud.tables.fs[target].content_ids.insert(msg.content_id);
            result.actions.push_back(
                {NodeAction::Kind::update_tables, msg.content_id, target, {}});
            break;
        }
        case MessageType::decline:
            result.actions.push_back({NodeAction::Kind::fallback_direct_push,
                                      msg.content_id, msg.target_fog_id, {}});
            break;
        case MessageType::hello: {
            auto& row = cloud.tables.fs[msg.sender_id];
            row.fog_server_id = msg.sender_id;
            row.content_ids = msg.hello_content_ids;
            row.mobile_device_ids = msg.hello_device_ids;
            break;
        }
        default:
            throw ProtocolError("handle_cloud_message: unexpected message type");
    }
    return result;
}

}  // namespace vfcsim::fogroute

#include "vfcsim/fogroute/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "vfcsim/sim/rng.hpp"
#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::fogroute {

using metrics::DeliveryChannel;
using metrics::DeliveryRecord;
using mobility::ContactInterval;
using mobility::Station;
using mobility::VisitRecord;

namespace {

struct PairState {
    std::string target;
    std::string content;
    SimTime requested_at = 0.0;
    bool resolved = false;
    bool request_sent = false;
    bool accepted = false;
    bool declined = false;
};

struct Engine {
    const FogRouteScenarioConfig& cfg;
    const mobility::TraceSet& traces;
    sim::Simulator simulator;
    sim::RngStream rng_order;

    // pattern knowledge: per device -> per server -> contact intervals
    std::map<std::string, std::map<std::string, std::vector<ContactInterval>>> contacts;
    std::map<std::string, std::map<std::string, std::vector<VisitRecord>>> visits;
    std::map<std::string, const Station*> stations;

    CloudState cloud;
    std::map<std::string, FogServerState> servers;
    std::vector<Content> catalog;

    MessageCounters counters;
    std::map<std::pair<std::string, std::string>, PairState> pairs;
    std::vector<DeliveryRecord> deliveries;
    std::map<std::string, SimTime> converged_at;
    std::map<std::string, std::size_t> received_count;

    Engine(const FogRouteScenarioConfig& c, const mobility::TraceSet& t,
           std::uint64_t seed)
        : cfg(c), traces(t), rng_order(seed, "fogroute.ordering") {}

    double upload_time() const {
        return cfg.content_size_bytes / cfg.uplink_bytes_per_s;
    }

    void precompute_contacts() {
        for (const auto& station : cfg.fog_servers) {
            stations[station.station_id] = &station;
        }
        for (const auto& [device_id, track] : traces.tracks) {
            for (const auto& station : cfg.fog_servers) {
                auto intervals = mobility::contacts_with(track, station, cfg.fog_range_m);
                if (intervals.empty()) continue;
                auto& visit_list = visits[device_id][station.station_id];
                for (const auto& iv : intervals) {
                    visit_list.push_back({device_id, station.station_id, iv.start,
                                          mobility::position_at(track, iv.start)});
                }
                contacts[device_id][station.station_id] = std::move(intervals);
            }
        }
    }

    void seed_tables(std::uint64_t seed) {
        sim::RngStream rng(seed, "fogroute.content_seed");
        std::vector<std::string> server_ids;
        for (const auto& s : cfg.fog_servers) server_ids.push_back(s.station_id);
        std::sort(server_ids.begin(), server_ids.end());

        for (std::size_t i = 0; i < cfg.content_count; ++i) {
            Content c;
            c.content_id = "content_" + std::to_string(i);
            c.size_bytes = cfg.content_size_bytes;
            c.affordable_delay_s = cfg.affordable_delay_s;
            c.date_of_update = cfg.warmup_s;  // the version everyone must reach
            c.validation_time_s = cfg.validation_time_s;
            catalog.push_back(c);
            cloud.catalog[c.content_id] = c;

            std::size_t copies = std::min(cfg.seed_copies, server_ids.size());
            std::vector<std::size_t> picks;
            while (picks.size() < copies) {
                std::size_t p = rng.uniform_int(server_ids.size());
                if (std::find(picks.begin(), picks.end(), p) == picks.end()) {
                    picks.push_back(p);
                }
            }
            for (auto p : picks) {
                const std::string& sid = server_ids[p];
                cloud.tables.gc.push_back(
                    {sid, c.content_id, cfg.warmup_s, cfg.validation_time_s});
                cloud.tables.fs[sid].fog_server_id = sid;
                cloud.tables.fs[sid].content_ids.insert(c.content_id);
            }
        }
        for (const auto& sid : server_ids) {
            auto& row = cloud.tables.fs[sid];
            row.fog_server_id = sid;
            auto& fs = servers[sid];
            fs.node_id = sid;
            fs.contents = row.content_ids;
            received_count[sid] = row.content_ids.size();
            if (row.content_ids.size() == cfg.content_count) {
                converged_at[sid] = cfg.warmup_s;
            }
        }
        // MDMP rows from the observed movement patterns
        for (const auto& [device_id, by_server] : visits) {
            for (const auto& [server_id, visit_list] : by_server) {
                double linked = 0.0;
                for (const auto& iv : contacts[device_id][server_id]) {
                    linked += iv.duration();
                }
                cloud.tables.mdmp.push_back({device_id, server_id, linked, ""});
                cloud.tables.fs[server_id].mobile_device_ids.insert(device_id);
            }
        }
    }

    // visits to `server` with arrival <= t
    std::vector<VisitRecord> visits_before(const std::string& device,
                                           const std::string& server, SimTime t) const {
        std::vector<VisitRecord> out;
        auto dit = visits.find(device);
        if (dit == visits.end()) return out;
        auto sit = dit->second.find(server);
        if (sit == dit->second.end()) return out;
        for (const auto& v : sit->second) {
            if (v.arrival <= t) out.push_back(v);
        }
        return out;
    }

    // first contact with `server` starting (or still open) after t that leaves
    // room for a full upload; returns completion time or nullopt
    std::optional<SimTime> next_upload_completion(const std::string& device,
                                                  const std::string& server,
                                                  SimTime t) const {
        auto dit = contacts.find(device);
        if (dit == contacts.end()) return std::nullopt;
        auto sit = dit->second.find(server);
        if (sit == dit->second.end()) return std::nullopt;
        double need = upload_time();
        for (const auto& iv : sit->second) {
            double start = std::max(iv.start, t);
            if (iv.end - start >= need) return start + need;
        }
        return std::nullopt;
    }

    std::vector<CarrierCandidate> build_candidates(const std::string& target,
                                                   const std::set<std::string>& sources,
                                                   SimTime now) const {
        std::vector<CarrierCandidate> out;
        for (const auto& [device_id, by_server] : visits) {
            auto target_visits = visits_before(device_id, target, now);
            if (target_visits.size() < 2) continue;
            bool reaches_source = false;
            for (const auto& src : sources) {
                if (visits_before(device_id, src, now).size() >= 1) {
                    reaches_source = true;
                    break;
                }
            }
            if (!reaches_source) continue;

            const auto& track = traces.tracks.at(device_id);
            CarrierCandidate cand;
            cand.device_id = device_id;
            cand.scheduled = track.kind == mobility::DeviceKind::scheduled;
            cand.contact_frequency = static_cast<double>(target_visits.size());
            cand.upload_time_s = upload_time();
            double dur_sum = 0.0;
            const auto& ivs = contacts.at(device_id).at(target);
            for (const auto& iv : ivs) dur_sum += iv.duration();
            cand.connection_time_s = dur_sum / static_cast<double>(ivs.size());

            if (cand.scheduled) {
                // the timetable is exact: time to the next visit
                auto completion = next_upload_completion(device_id, target, now);
                if (!completion) continue;
                cand.delivery_time_s = *completion - now;
            } else {
                try {
                    auto est = mobility::average_speed_and_direction(
                        target_visits, *stations.at(target));
                    cand.delivery_time_s =
                        mobility::estimated_delivery_time(est, *stations.at(target));
                } catch (const mobility::NoEstimateError&) {
                    continue;
                }
                if (!std::isfinite(cand.delivery_time_s)) continue;
            }
            out.push_back(cand);
        }
        return out;
    }

    void record_delivery(PairState& pair, SimTime at, DeliveryChannel channel) {
        if (pair.resolved) return;
        pair.resolved = true;
        DeliveryRecord rec;
        rec.content_id = pair.content;
        rec.target_fog_id = pair.target;
        rec.requested_at = pair.requested_at;
        rec.delivered_at = at;
        rec.channel = channel;
        deliveries.push_back(rec);
        if (channel == DeliveryChannel::dtn) ++counters.dtn_deliveries;

        // each (content, target) pair resolves exactly once, so the count is safe
        servers[pair.target].contents.insert(pair.content);
        if (++received_count[pair.target] == cfg.content_count &&
            !converged_at.count(pair.target)) {
            converged_at[pair.target] = at;
        }
    }

    void direct_push(PairState& pair, SimTime now) {
        if (pair.resolved || !cfg.fallback_enabled) return;
        ++counters.direct_pushes;
        simulator.schedule(now + cfg.cloud_push_latency_s, [this, &pair] {
            SimTime t = simulator.now();
            record_delivery(pair, t, DeliveryChannel::cloud_direct);
            DissemMessage ack;  // cloud records its own push in the tables
            ack.type = MessageType::ack;
            ack.sender_id = pair.target;
            ack.receiver_id = cloud.node_id;
            ack.send_time = t;
            ack.content_id = pair.content;
            ack.target_fog_id = pair.target;
            handle_cloud_message(cloud, ack);
        });
    }

    void start_dtn(PairState& pair, const CarrierAssignment& assignment,
                   const std::string& source, SimTime now) {
        pair.request_sent = true;
        ++counters.requests;
        DissemMessage req;
        req.type = MessageType::request;
        req.sender_id = cloud.node_id;
        req.receiver_id = source;
        req.send_time = now;
        req.content_id = pair.content;
        req.target_fog_id = pair.target;
        req.carrier_ids = assignment.scheduled;
        req.carrier_ids.insert(req.carrier_ids.end(), assignment.non_scheduled.begin(),
                               assignment.non_scheduled.end());

        // pickups: each assigned carrier grabs the content at its next long
        // enough contact with the source server
        SimTime first_pickup = -1.0;
        std::vector<std::pair<std::string, SimTime>> pickups;
        for (const auto& carrier : req.carrier_ids) {
            auto pickup = next_upload_completion(carrier, source, now);
            if (!pickup || *pickup > now + cfg.pickup_deadline_s) continue;
            pickups.emplace_back(carrier, *pickup);
            if (first_pickup < 0.0 || *pickup < first_pickup) first_pickup = *pickup;
        }

        if (pickups.empty()) {
            // the source cannot hand the content to any carrier in time
            simulator.schedule(now + cfg.pickup_deadline_s, [this, &pair, req] {
                auto& fs = servers[req.receiver_id];
                HandleResult hr = handle_fog_message(fs, req, false);
                ++counters.declines;
                pair.declined = true;
                HandleResult cr = handle_cloud_message(cloud, hr.follow_ups.front());
                for (const auto& action : cr.actions) {
                    if (action.kind == NodeAction::Kind::fallback_direct_push) {
                        direct_push(pair, simulator.now());
                    }
                }
            });
            return;
        }

        // Accept fires at the first successful transfer to a carrier
        simulator.schedule(first_pickup, [this, &pair, req] {
            auto& fs = servers[req.receiver_id];
            HandleResult hr = handle_fog_message(fs, req, true);
            ++counters.accepts;
            pair.accepted = true;
            (void)hr;
        });

        // each picked-up carrier then rides to the target
        for (const auto& [carrier, pickup_at] : pickups) {
            auto delivery = next_upload_completion(carrier, pair.target, pickup_at);
            if (!delivery) continue;
            simulator.schedule(*delivery, [this, &pair] {
                if (pair.resolved) return;
                SimTime t = simulator.now();
                auto& fs = servers[pair.target];
                HandleResult hr = handle_carrier_delivery(fs, pair.content, t);
                ++counters.acks;
                handle_cloud_message(cloud, hr.follow_ups.front());
                record_delivery(pair, t, DeliveryChannel::dtn);
            });
        }

        // cloud-side watchdog: no Ack in time -> fall back
        simulator.schedule(now + cfg.ack_timeout_s, [this, &pair] {
            if (!pair.resolved) direct_push(pair, simulator.now());
        });
    }

    void issue_requests() {
        SimTime now = simulator.now();
        auto stale = detect_stale(cloud.tables, now);
        if (cfg.ordering == ContentOrdering::random) {
            for (std::size_t i = stale.size(); i > 1; --i) {
                std::size_t j = rng_order.uniform_int(i);
                std::swap(stale[i - 1], stale[j]);
            }
        }
        for (const auto& sp : stale) {
            auto& pair = pairs[{sp.target_fog_id, sp.content_id}];
            pair.target = sp.target_fog_id;
            pair.content = sp.content_id;
            pair.requested_at = now;

            std::set<std::string> sources;
            for (const auto& [sid, row] : cloud.tables.fs) {
                if (sid != sp.target_fog_id && row.content_ids.count(sp.content_id)) {
                    sources.insert(sid);
                }
            }
            auto candidates = build_candidates(sp.target_fog_id, sources, now);
            Plan plan = plan_dissemination(!sources.empty(), candidates,
                                           cfg.affordable_delay_s, sp.content_id,
                                           sp.target_fog_id);
            if (plan.kind == Plan::Kind::direct_cloud_push) {
                direct_push(pair, now);
                continue;
            }
            // source with the largest reachable carrier pool, ties by id
            std::string best_source;
            std::size_t best_pool = 0;
            for (const auto& src : sources) {
                std::size_t pool = 0;
                for (const auto& carrier : plan.assignment.scheduled) {
                    if (!visits_before(carrier, src, now).empty()) ++pool;
                }
                for (const auto& carrier : plan.assignment.non_scheduled) {
                    if (!visits_before(carrier, src, now).empty()) ++pool;
                }
                if (pool > best_pool || (pool == best_pool && (best_source.empty() ||
                                                               src < best_source))) {
                    best_pool = pool;
                    best_source = src;
                }
            }
            if (best_pool == 0) {
                direct_push(pair, now);
                continue;
            }
            start_dtn(pair, plan.assignment, best_source, now);
        }
    }

    void schedule_hellos() {
        for (auto& [sid, fs] : servers) {
            schedule_hello(sid);
        }
    }

    void schedule_hello(const std::string& sid) {
        SimTime next = simulator.now() + cfg.hello_interval_s;
        if (next > cfg.warmup_s + cfg.horizon_s) return;
        simulator.schedule(next, [this, sid] {
            auto& fs = servers[sid];
            DissemMessage hello;
            hello.type = MessageType::hello;
            hello.sender_id = sid;
            hello.receiver_id = cloud.node_id;
            hello.send_time = simulator.now();
            hello.hello_content_ids = fs.contents;
            hello.hello_device_ids = cloud.tables.fs[sid].mobile_device_ids;
            handle_cloud_message(cloud, hello);
            ++counters.hellos;
            schedule_hello(sid);
        });
    }
};

}  // namespace

FogRouteRunResult run_fogroute(const FogRouteScenarioConfig& config,
                               const mobility::TraceSet& traces, std::uint64_t seed) {
    Engine engine(config, traces, seed);
    engine.precompute_contacts();
    engine.seed_tables(seed);

    engine.simulator.schedule(config.warmup_s, [&engine] { engine.issue_requests(); });
    engine.schedule_hellos();
    engine.simulator.run_until(config.warmup_s + config.horizon_s);

    FogRouteRunResult result;
    result.deliveries = std::move(engine.deliveries);
    result.counters = engine.counters;
    result.stale_pairs = engine.pairs.size();
    for (const auto& [key, pair] : engine.pairs) {
        if (!pair.resolved) ++result.unresolved_pairs;
    }
    for (const auto& station : config.fog_servers) {
        metrics::ConvergenceRecord rec;
        rec.fog_server_id = station.station_id;
        rec.contents_required = config.content_count;
        rec.contents_received = engine.received_count[station.station_id];
        rec.started_at = config.warmup_s;
        auto it = engine.converged_at.find(station.station_id);
        if (it != engine.converged_at.end()) rec.converged_at = it->second;
        result.convergence.push_back(rec);
    }
    return result;
}

}  // namespace vfcsim::fogroute

#include "vfcsim/cvfh/handoff_sim.hpp"

#include <algorithm>
#include <cmath>

namespace vfcsim::cvfh {

using metrics::HandoffResult;
using metrics::HandoffScheme;

ExchangeOutcome packet_exchange(unsigned n, double t_pkt_s, double pe,
                                unsigned retry_budget, sim::RngStream& rng) {
    ExchangeOutcome out;
    for (unsigned i = 0; i < n; ++i) {
        bool delivered = false;
        for (unsigned attempt = 0; attempt <= retry_budget; ++attempt) {
            ++out.packets_sent;
            out.elapsed_s += t_pkt_s;
            if (!rng.bernoulli(pe)) {
                delivered = true;
                break;
            }
        }
        if (!delivered) return out;  // success stays false
    }
    out.success = true;
    return out;
}

HandoffResult handoff_80211(const HandoffLinkParams& p, sim::RngStream& rng,
                            sim::SimTime trigger_time) {
    HandoffResult result;
    result.scheme = HandoffScheme::ieee80211;
    result.trigger_time = trigger_time;
    ExchangeOutcome ex = packet_exchange(p.n_80211, p.t_pkt_vi_s, p.pe_vi,
                                         p.retry_budget, rng);
    result.packets_vi = ex.packets_sent;
    result.success = ex.success;
    double latency = ex.elapsed_s;
    if (ex.success) {
        latency += p.t_auth_s + p.t_asso_s;
        result.auth_asso_time_s = p.t_auth_s + p.t_asso_s;
    }
    result.completion_time = trigger_time + latency;
    return result;
}

namespace {

double ring_dist(double a, double b, double L) {
    double d = std::fmod(std::abs(a - b), L);
    return std::min(d, L - d);
}

}  // namespace

CvfhAttemptOutcome execute_handoff(const VehicleState& cv,
                                   const std::vector<AccessPoint>& aps,
                                   const mobility::HighwayFlowParams& flow,
                                   const HandoffLinkParams& link,
                                   const RadioConfig& radio,
                                   const NeighborReplyConfig& reply_cfg,
                                   sim::RngStream& rng) {
    CvfhAttemptOutcome out;

    // Case 3: a non-serving AP already in range replies itself
    const AccessPoint* direct = nullptr;
    double best_d = 0.0;
    for (const auto& ap : aps) {
        if (cv.sap_id && *cv.sap_id == ap.ap_id) continue;
        double d = mobility::distance(cv.position, ap.position);
        if (d <= ap.range_m && (!direct || d < best_d)) {
            direct = &ap;
            best_d = d;
        }
    }
    if (direct) {
        ExchangeOutcome ex = packet_exchange(link.n_vi, link.t_pkt_vi_s, link.pe_vi,
                                             link.retry_budget, rng);
        out.direct_ap = true;
        out.success = ex.success;
        out.latency_s = ex.elapsed_s;
        out.packets_vi = ex.packets_sent;
        out.tap_id = direct->ap_id;
        return out;
    }

    // neighbor sampling on the +/-R window around CV
    if (aps.empty()) return out;
    double R = aps.front().range_m;
    mobility::HighwayFlowParams window = flow;
    window.road_length_m = 2.0 * R;
    auto vehicles = mobility::sample_highway(window, rng);

    NeighborReq req;
    req.cv_id = cv.vehicle_id;
    req.cv_sap_id = cv.sap_id.value_or("");
    req.cv_position = cv.position;
    req.cv_heading = cv.heading;

    const AccessPoint* winner_sap = nullptr;
    double winner_delay = 0.0;
    double winner_plr = 0.0;
    std::size_t winner_idx = 0;
    bool have_winner = false;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        double offset = vehicles[i].position_m - R;  // relative to CV
        NeighborVehicle nv;
        nv.vehicle_id = "nv_" + std::to_string(i);
        nv.position = {cv.position.x + offset * cv.heading.x,
                       cv.position.y + offset * cv.heading.y};
        nv.heading = vehicles[i].opposite_direction
                         ? Vec2{-cv.heading.x, -cv.heading.y}
                         : cv.heading;
        const AccessPoint* nearest = nullptr;
        double nd = 0.0;
        for (const auto& ap : aps) {
            double d = mobility::distance(nv.position, ap.position);
            if (!nearest || d < nd) {
                nearest = &ap;
                nd = d;
            }
        }
        if (!nearest || nd > nearest->range_m) continue;
        nv.sap_id = nearest->ap_id;
        nv.plr_estimate = plr_model(std::abs(offset), R, radio);
        if (!qualify_neighbor(nv, req)) continue;
        double delay = neighbor_reply_delay(nv, reply_cfg);
        if (!have_winner || delay < winner_delay) {
            have_winner = true;
            winner_delay = delay;
            winner_sap = nearest;
            winner_plr = nv.plr_estimate;
            winner_idx = i;
        }
    }
    if (!have_winner) return out;  // no qualified neighbor this round

    out.nav_id = "nv_" + std::to_string(winner_idx);
    out.tap_id = winner_sap->ap_id;
    ExchangeOutcome vv = packet_exchange(link.n_vv, link.t_pkt_vv_s, link.pe_vv,
                                         link.retry_budget, rng);
    out.packets_vv = vv.packets_sent;
    out.latency_s = winner_delay + vv.elapsed_s;
    if (!vv.success) return out;
    ExchangeOutcome vi = packet_exchange(link.n_vi, link.t_pkt_vi_s, link.pe_vi,
                                         link.retry_budget, rng);
    out.packets_vi = vi.packets_sent;
    out.latency_s += vi.elapsed_s;
    out.success = vi.success;
    (void)winner_plr;
    return out;
}

namespace {

struct ScenarioState {
    const CvfhScenarioConfig& cfg;
    HandoffScheme scheme;
    std::vector<AccessPoint> aps;
    sim::Simulator simulator;
    sim::RngStream rng;
    VehicleState cv;
    double cv_start_pos = 0.0;
    bool associated = false;
    sim::SimTime assoc_since = 0.0;
    double associated_time = 0.0;
    double bits_delivered = 0.0;
    // fluid throughput accrual: the offered load flows at packet_rate while
    // associated and each instant is credited with its link survival
    // probability, integrated by trapezoid between events
    sim::SimTime accrual_t = 0.0;
    double accrual_plr = 0.0;
    // generation counter guarding exact coverage-loss events across re-associations
    std::uint64_t assoc_generation = 0;
    // pending CVFH switch
    bool tap_pending = false;
    CvfhAttemptOutcome pending;
    sim::SimTime pending_trigger = 0.0;
    sim::SimTime next_attempt_at = 0.0;
    std::vector<HandoffResult> results;

    ScenarioState(const CvfhScenarioConfig& c, HandoffScheme s, std::uint64_t seed)
        : cfg(c), scheme(s), rng(seed, s == HandoffScheme::cvfh ? "cvfh" : "80211") {}

    double pos_at(sim::SimTime t) const {
        return std::fmod(cv_start_pos + cfg.cv_speed_mps * t, cfg.road_length_m);
    }

    const AccessPoint& nearest_ap(double pos) const {
        std::size_t best = 0;
        double bd = ring_dist(pos, aps[0].position.x, cfg.road_length_m);
        for (std::size_t i = 1; i < aps.size(); ++i) {
            double d = ring_dist(pos, aps[i].position.x, cfg.road_length_m);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return aps[best];
    }

    const AccessPoint& ap_by_id(const std::string& id) const {
        return *std::find_if(aps.begin(), aps.end(),
                             [&](const AccessPoint& a) { return a.ap_id == id; });
    }

    double current_plr(sim::SimTime t) const {
        return plr_model(sap_distance(t), cfg.ap_range_m, cfg.radio);
    }

    void accrue(sim::SimTime t) {
        if (associated) {
            double plr = current_plr(t);
            bits_delivered += cfg.packet_rate_hz * cfg.packet_size_bits *
                              (t - accrual_t) * (1.0 - 0.5 * (accrual_plr + plr));
            accrual_plr = plr;
        }
        accrual_t = t;
    }

    void set_associated(bool on, sim::SimTime t) {
        if (on == associated) return;
        accrue(t);
        if (associated) associated_time += t - assoc_since;
        if (on) assoc_since = t;
        associated = on;
        if (on) accrual_plr = current_plr(t);
    }

    double sap_distance(sim::SimTime t) const {
        return ring_dist(pos_at(t), ap_by_id(*cv.sap_id).position.x, cfg.road_length_m);
    }

    HandoffResult tag(HandoffResult r) const {
        r.cv_id = cv.vehicle_id;
        r.speed_mps = cfg.cv_speed_mps;
        r.packet_rate_hz = cfg.packet_rate_hz;
        return r;
    }
};

// chained 802.11 attempts until one succeeds; returns total downtime
double run_80211_reassociation(ScenarioState& st, sim::SimTime start) {
    double downtime = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        HandoffResult r = handoff_80211(st.cfg.link, st.rng, start + downtime);
        if (st.scheme == HandoffScheme::ieee80211) st.results.push_back(st.tag(r));
        downtime += r.completion_time - r.trigger_time;
        if (r.success) return downtime;
    }
    return downtime;
}

void handle_coverage_loss(ScenarioState& st, sim::SimTime t);

void switch_to(ScenarioState& st, const std::string& ap_id, sim::SimTime t) {
    st.cv.sap_id = ap_id;
    st.cv.tap_id.reset();
    st.cv.nav_id.reset();
    st.cv.rssi_window.clear();
    st.cv.plr_estimate = 0.0;
    st.tap_pending = false;
    st.set_associated(true, t);
    // the CV's kinematics are known, so the moment it leaves the new SAP's
    // coverage is scheduled exactly; the sampled distance check remains as a
    // backstop. The generation guard voids the event after a re-association.
    ++st.assoc_generation;
    std::uint64_t gen = st.assoc_generation;
    double L = st.cfg.road_length_m;
    double rel = std::fmod(st.pos_at(t) - st.ap_by_id(ap_id).position.x, L);
    if (rel < -L / 2.0) rel += L;
    if (rel >= L / 2.0) rel -= L;
    double dt = std::max((st.cfg.ap_range_m - rel) / st.cfg.cv_speed_mps, 0.0);
    if (t + dt < st.cfg.duration_s) {
        st.simulator.schedule(t + dt, [&st, gen] {
            if (st.associated && st.assoc_generation == gen) {
                handle_coverage_loss(st, st.simulator.now());
            }
        });
    }
}

void on_rssi_sample(ScenarioState& st);

void start_cvfh_switch(ScenarioState& st, sim::SimTime t) {
    // downtime equals the already-measured wireless exchange latency; no
    // auth/asso because the TAP's ip/mac are stored
    double latency = st.pending.latency_s;
    HandoffResult r;
    r.scheme = HandoffScheme::cvfh;
    r.trigger_time = st.pending_trigger;
    r.completion_time = st.pending_trigger + latency;
    r.success = true;
    r.packets_vv = st.pending.packets_vv;
    r.packets_vi = st.pending.packets_vi;
    st.results.push_back(st.tag(r));
    std::string tap = st.pending.tap_id;
    st.set_associated(false, t);
    st.tap_pending = false;
    st.simulator.schedule(t + latency, [&st, tap] {
        switch_to(st, tap, st.simulator.now());
    });
}

void handle_coverage_loss(ScenarioState& st, sim::SimTime t) {
    st.set_associated(false, t);
    if (st.scheme == HandoffScheme::cvfh) {
        // acquisition did not finish in time
        HandoffResult r;
        r.scheme = HandoffScheme::cvfh;
        r.trigger_time = st.tap_pending ? st.pending_trigger : t;
        r.completion_time = t;
        r.success = false;
        st.results.push_back(st.tag(r));
        st.tap_pending = false;
    }
    // recover on whichever AP is nearest once the exchange completes
    // (coverage overlaps, so one is always in range)
    double downtime = run_80211_reassociation(st, t);
    st.simulator.schedule(t + downtime, [&st] {
        sim::SimTime now = st.simulator.now();
        switch_to(st, st.nearest_ap(st.pos_at(now)).ap_id, now);
    });
}

void on_rssi_sample(ScenarioState& st) {
    sim::SimTime t = st.simulator.now();
    if (t + 1e-9 < st.cfg.duration_s) {
        st.simulator.schedule(t + st.cfg.trigger.rssi_sample_interval_s,
                              [&st] { on_rssi_sample(st); });
    }
    if (!st.associated) return;
    double d = st.sap_distance(t);
    if (d > st.cfg.ap_range_m) {
        handle_coverage_loss(st, t);
        return;
    }
    st.cv.position = {st.pos_at(t), 0.0};
    st.cv.push_rssi(t, rssi_model(std::max(d, st.cfg.radio.reference_distance_m),
                                  st.cfg.radio),
                    st.cfg.trigger.rssi_decline_window_s + 1e-9);

    if (st.scheme != HandoffScheme::cvfh) return;

    if (st.tap_pending) {
        double dt = ring_dist(st.pos_at(t), st.ap_by_id(st.pending.tap_id).position.x,
                              st.cfg.road_length_m);
        if (st.cv.plr_estimate > st.cfg.trigger.plr_threshold && dt < st.cfg.ap_range_m) {
            start_cvfh_switch(st, t);
        }
        return;
    }
    if (t < st.next_attempt_at) return;
    if (!detect_trigger(st.cv, st.cfg.trigger, t)) return;

    // unwrap AP positions onto the CV's local axis so planar distances match
    // ring distances near the road seam
    std::vector<AccessPoint> aps_local = st.aps;
    double pos = st.pos_at(t);
    double L = st.cfg.road_length_m;
    for (auto& ap : aps_local) {
        double delta = std::fmod(ap.position.x - pos, L);
        if (delta < -L / 2.0) delta += L;
        if (delta >= L / 2.0) delta -= L;
        ap.position = {pos + delta, 0.0};
    }
    CvfhAttemptOutcome outcome = execute_handoff(st.cv, aps_local, st.cfg.flow,
                                                 st.cfg.link, st.cfg.radio,
                                                 st.cfg.reply, st.rng);
    if (outcome.success) {
        st.tap_pending = true;
        st.pending = outcome;
        st.pending_trigger = t;
    } else {
        st.next_attempt_at = t + st.cfg.retry_interval_s;
    }
}

void on_app_packet(ScenarioState& st) {
    sim::SimTime t = st.simulator.now();
    if (t + 1e-9 < st.cfg.duration_s) {
        st.simulator.schedule(t + 1.0 / st.cfg.packet_rate_hz,
                              [&st] { on_app_packet(st); });
    }
    if (!st.associated) return;
    st.accrue(t);
    // the sampled per-packet outcome drives the receiver's loss estimate
    st.cv.observe_packet(st.rng.bernoulli(st.accrual_plr));
}

}  // namespace

CvfhRunResult run_cvfh_scenario(const CvfhScenarioConfig& config, HandoffScheme scheme,
                                std::uint64_t seed) {
    ScenarioState st(config, scheme, seed);
    std::size_t n_aps =
        static_cast<std::size_t>(config.road_length_m / config.ap_spacing_m);
    for (std::size_t i = 0; i < n_aps; ++i) {
        AccessPoint ap;
        ap.ap_id = "ap_" + std::to_string(i);
        ap.position = {static_cast<double>(i) * config.ap_spacing_m, 0.0};
        ap.range_m = config.ap_range_m;
        ap.ip = "10.0.0." + std::to_string(i + 1);
        ap.mac = "02:00:00:00:00:" + std::to_string(i);
        st.aps.push_back(ap);
    }
    st.cv.vehicle_id = "cv";
    st.cv.heading = {1.0, 0.0};
    st.cv.speed_mps = config.cv_speed_mps;
    st.cv_start_pos = 0.0;
    st.cv.sap_id = st.aps.front().ap_id;

    st.simulator.schedule(0.0,
                          [&st] { switch_to(st, st.aps.front().ap_id, 0.0); });
    st.simulator.schedule(0.0, [&st] { on_rssi_sample(st); });
    st.simulator.schedule(0.0, [&st] { on_app_packet(st); });
    st.simulator.run_until(config.duration_s);
    st.accrue(config.duration_s);
    if (st.associated) {
        st.associated_time += config.duration_s - st.assoc_since;
        st.assoc_since = config.duration_s;
    }

    CvfhRunResult result;
    result.handoffs = std::move(st.results);
    result.associated_time_s = st.associated_time;
    result.throughput.vehicle_id = st.cv.vehicle_id;
    result.throughput.scheme = scheme;
    result.throughput.bits_delivered = st.bits_delivered;
    result.throughput.window_start = 0.0;
    result.throughput.window_end = config.duration_s;
    result.throughput.speed_mps = config.cv_speed_mps;
    result.throughput.packet_rate_hz = config.packet_rate_hz;
    return result;
}

}  // namespace vfcsim::cvfh

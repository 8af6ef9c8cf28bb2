#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vfcsim/fogroute/protocol.hpp"
#include "vfcsim/fogroute/simulation.hpp"
#include "vfcsim/mobility/trace.hpp"
#include "vfcsim/sim/rng.hpp"

using namespace vfcsim;
using namespace vfcsim::fogroute;

namespace {

CloudTables two_server_tables(double t_a, double t_b, double validation = 0.0) {
    CloudTables t;
    t.gc.push_back({"A", "c1", t_a, validation});
    t.gc.push_back({"B", "c1", t_b, validation});
    t.fs["A"].fog_server_id = "A";
    t.fs["A"].content_ids = {"c1"};
    t.fs["B"].fog_server_id = "B";
    t.fs["B"].content_ids = {"c1"};
    return t;
}

CarrierCandidate cand(std::string id, bool scheduled, double confre, double deli,
                      double conn = 100.0, double upload = 10.0) {
    return {std::move(id), scheduled, confre, deli, conn, upload};
}

}  // namespace

TEST_CASE("detect_stale: identical versions everywhere -> nothing stale") {
    auto t = two_server_tables(100.0, 100.0);
    CHECK(detect_stale(t, 200.0).empty());
}

TEST_CASE("detect_stale: older copy is reported once validation lapses") {
    auto t = two_server_tables(100.0, 50.0);
    auto stale = detect_stale(t, 200.0);
    REQUIRE(stale.size() == 1);
    CHECK(stale[0].target_fog_id == "B");
    CHECK(stale[0].content_id == "c1");
}

TEST_CASE("detect_stale: an unlapsed validation window shields the old copy") {
    auto t = two_server_tables(100.0, 50.0, /*validation=*/500.0);
    CHECK(detect_stale(t, 200.0).empty());   // 50 + 500 > 200
    CHECK(detect_stale(t, 600.0).size() == 1);
}

TEST_CASE("detect_stale: a server missing the content entirely is stale") {
    auto t = two_server_tables(100.0, 50.0);
    t.fs["C"].fog_server_id = "C";  // holds nothing
    auto stale = detect_stale(t, 200.0);
    bool c_found = false;
    for (const auto& s : stale) {
        if (s.target_fog_id == "C" && s.content_id == "c1") c_found = true;
    }
    CHECK(c_found);
}

TEST_CASE("detect_stale matches a brute-force scan over randomized tables") {
    sim::RngStream rng(2024, "test.stale");
    for (int trial = 0; trial < 50; ++trial) {
        CloudTables t;
        const int n_servers = 5, n_contents = 3;
        for (int s = 0; s < n_servers; ++s) {
            std::string sid = "s" + std::to_string(s);
            t.fs[sid].fog_server_id = sid;
            for (int c = 0; c < n_contents; ++c) {
                if (rng.bernoulli(0.7)) {
                    std::string cid = "c" + std::to_string(c);
                    double updated = rng.uniform(0.0, 100.0);
                    double validation = rng.bernoulli(0.5) ? rng.uniform(0.0, 200.0) : 0.0;
                    t.gc.push_back({sid, cid, updated, validation});
                    t.fs[sid].content_ids.insert(cid);
                }
            }
        }
        double now = 150.0;
        auto got = detect_stale(t, now);

        // independent scan: newest copy per content, then per-server comparison
        std::vector<StalePair> expected;
        for (int c = 0; c < n_contents; ++c) {
            std::string cid = "c" + std::to_string(c);
            double newest = -1.0;
            for (const auto& g : t.gc) {
                if (g.content_id == cid) newest = std::max(newest, g.date_of_update);
            }
            if (newest < 0.0) continue;  // nobody holds it
            for (const auto& [sid, row] : t.fs) {
                const GlobalContentEntry* mine = nullptr;
                for (const auto& g : t.gc) {
                    if (g.content_id == cid && g.fog_server_id == sid) mine = &g;
                }
                bool stale;
                if (!mine) {
                    stale = true;
                } else {
                    stale = mine->date_of_update < newest &&
                            mine->date_of_update + mine->validation_time_s <= now;
                }
                if (stale) expected.push_back({sid, cid});
            }
        }
        auto key = [](const StalePair& p) { return p.target_fog_id + "|" + p.content_id; };
        std::sort(expected.begin(), expected.end(),
                  [&](const StalePair& a, const StalePair& b) { return key(a) < key(b); });
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(key(got[i]) == key(expected[i]));
        }
    }
}

TEST_CASE("delivery probability: symmetric pair") {
    std::vector<CarrierCandidate> cs = {cand("a", false, 1, 1), cand("b", false, 1, 1)};
    CHECK(delivery_probability(0, cs) == doctest::Approx(0.25));
    CHECK(delivery_probability(1, cs) == doctest::Approx(0.25));
}

TEST_CASE("delivery probability: singleton degenerates to zero") {
    std::vector<CarrierCandidate> cs = {cand("a", false, 2, 5)};
    CHECK(delivery_probability(0, cs) == doctest::Approx(0.0));
}

TEST_CASE("delivery probability: direct evaluation") {
    std::vector<CarrierCandidate> cs = {cand("a", false, 3, 1), cand("b", false, 2, 2),
                                        cand("c", false, 1, 3)};
    CHECK(delivery_probability(0, cs) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("delivery probability: first factors sum to one") {
    sim::RngStream rng(5, "test.ranking");
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CarrierCandidate> cs;
        std::size_t n = 2 + rng.uniform_int(6);
        double confre_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cs.push_back(cand("d" + std::to_string(i), false, rng.uniform(0.1, 5.0),
                              rng.uniform(0.5, 10.0)));
            confre_sum += cs.back().contact_frequency;
        }
        double first_factor_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            first_factor_sum += cs[i].contact_frequency / confre_sum;
        }
        CHECK(first_factor_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("delivery probability: preconditions") {
    std::vector<CarrierCandidate> empty;
    CHECK_THROWS(delivery_probability(0, empty));
    std::vector<CarrierCandidate> zero_confre = {cand("a", false, 0, 1),
                                                 cand("b", false, 0, 2)};
    CHECK_THROWS(delivery_probability(0, zero_confre));
}

TEST_CASE("select_carriers: spec worked example") {
    // one scheduled at time 2, three non-scheduled at times 1, 3, 5, T_d = 3:
    // y grows to 3 since (2 + 1 + 3 + 5) / 4 = 2.75 < 3
    std::vector<CarrierCandidate> cs = {
        cand("sched", true, 1, 2),
        cand("ns_a", false, 3, 1),
        cand("ns_b", false, 2, 3),
        cand("ns_c", false, 1, 5),
    };
    auto a = select_carriers(cs, 3.0, "c1", "B");
    CHECK(a.scheduled == std::vector<std::string>{"sched"});
    CHECK(a.non_scheduled.size() == 3);
    CHECK(a.content_id == "c1");
    CHECK(a.target_fog_id == "B");
}

TEST_CASE("select_carriers: greedy stops at the first mean-delay violation") {
    // the relative ranking puts the fast device first; adding the slow one
    // breaks the mean bound so y stays 1
    std::vector<CarrierCandidate> cs = {
        cand("sched", true, 1, 2),
        cand("fast", false, 5, 1),
        cand("slow", false, 1, 50),
    };
    auto a = select_carriers(cs, 3.0, "c", "t");
    CHECK(a.scheduled.size() == 1);
    CHECK(a.non_scheduled == std::vector<std::string>{"fast"});
}

TEST_CASE("select_carriers: connection-time filter removes infeasible devices") {
    std::vector<CarrierCandidate> cs = {
        cand("short", true, 1, 2, /*conn=*/5.0, /*upload=*/10.0),   // filtered
        cand("long", true, 1, 2, /*conn=*/20.0, /*upload=*/10.0),
    };
    auto a = select_carriers(cs, 10.0, "c", "t");
    CHECK(a.scheduled == std::vector<std::string>{"long"});
}

TEST_CASE("select_carriers: everything filtered is an empty-assignment error") {
    std::vector<CarrierCandidate> cs = {cand("a", true, 1, 2, 5.0, 10.0)};
    CHECK_THROWS_AS(select_carriers(cs, 10.0, "c", "t"), EmptyAssignmentError);
}

TEST_CASE("select_carriers: probability ties break toward the lower device id") {
    std::vector<CarrierCandidate> cs = {
        cand("sched", true, 1, 1),
        cand("nb", false, 1, 4),
        cand("na", false, 1, 4),
    };
    auto a = select_carriers(cs, 100.0, "c", "t");
    REQUIRE(a.non_scheduled.size() == 2);
    CHECK(a.non_scheduled[0] == "na");
    CHECK(a.non_scheduled[1] == "nb");
}

TEST_CASE("select_carriers: lone surviving candidate taken when fast enough") {
    std::vector<CarrierCandidate> ok = {cand("only", false, 1, 5)};
    auto a = select_carriers(ok, 10.0, "c", "t");
    CHECK(a.non_scheduled == std::vector<std::string>{"only"});

    std::vector<CarrierCandidate> slow = {cand("only", false, 1, 50)};
    CHECK_THROWS_AS(select_carriers(slow, 10.0, "c", "t"), EmptyAssignmentError);
}

TEST_CASE("plan_dissemination branches") {
    std::vector<CarrierCandidate> cs = {cand("a", false, 1, 1), cand("b", false, 1, 2)};
    CHECK(plan_dissemination(false, cs, 10.0, "c", "t").kind ==
          Plan::Kind::direct_cloud_push);
    CHECK(plan_dissemination(true, {}, 10.0, "c", "t").kind ==
          Plan::Kind::direct_cloud_push);
    auto plan = plan_dissemination(true, cs, 10.0, "c", "t");
    CHECK(plan.kind == Plan::Kind::dtn_via_carriers);
    CHECK(plan.assignment.total() >= 1);
}

TEST_CASE("carrier_transport boundary rule") {
    CHECK(carrier_transport(20.0, 10e6, 1e6));   // needs 10 s
    CHECK_FALSE(carrier_transport(5.0, 10e6, 1e6));
    CHECK(carrier_transport(10.0, 10e6, 1e6));   // closed comparison
}

TEST_CASE("fog server answers a request with accept or decline") {
    FogServerState fs;
    fs.node_id = "A";
    fs.contents = {"c1"};
    fs.attached_devices = {"m1"};

    DissemMessage req;
    req.type = MessageType::request;
    req.sender_id = "cloud";
    req.receiver_id = "A";
    req.content_id = "c1";
    req.target_fog_id = "B";
    req.carrier_ids = {"m1"};

    auto ok = handle_fog_message(fs, req, /*transfer_ok=*/true);
    REQUIRE(ok.follow_ups.size() == 1);
    CHECK(ok.follow_ups[0].type == MessageType::accept);
    bool copied = false;
    for (const auto& a : ok.actions) {
        if (a.kind == NodeAction::Kind::copy_to_carrier) copied = true;
    }
    CHECK(copied);

    auto fail = handle_fog_message(fs, req, /*transfer_ok=*/false);
    REQUIRE(fail.follow_ups.size() == 1);
    CHECK(fail.follow_ups[0].type == MessageType::decline);

    DissemMessage unknown = req;
    unknown.content_id = "nope";
    CHECK_THROWS_AS(handle_fog_message(fs, unknown, true), ProtocolError);
}

TEST_CASE("carrier delivery stores content and acks the cloud") {
    FogServerState fs;
    fs.node_id = "B";
    auto r = handle_carrier_delivery(fs, "c1", 42.0);
    CHECK(fs.contents.count("c1") == 1);
    REQUIRE(r.follow_ups.size() == 1);
    CHECK(r.follow_ups[0].type == MessageType::ack);
    CHECK(r.follow_ups[0].receiver_id == "cloud");
    CHECK(r.follow_ups[0].send_time == 42.0);
}

TEST_CASE("cloud updates GC and FS transactionally on ack") {
    CloudState cloud;
    cloud.tables = two_server_tables(100.0, 50.0);
    cloud.catalog["c1"] = {"c1", 1e6, 3600.0, 100.0, 30.0};

    DissemMessage ack;
    ack.type = MessageType::ack;
    ack.sender_id = "B";
    ack.receiver_id = "cloud";
    ack.send_time = 200.0;
    ack.content_id = "c1";
    ack.target_fog_id = "B";
    handle_cloud_message(cloud, ack);

    bool updated = false;
    for (const auto& g : cloud.tables.gc) {
        if (g.fog_server_id == "B" && g.content_id == "c1") {
            CHECK(g.date_of_update == 100.0);  // catalog version, not ack time
            updated = true;
        }
    }
    CHECK(updated);
    CHECK(cloud.tables.fs["B"].content_ids.count("c1") == 1);
    CHECK(detect_stale(cloud.tables, 300.0).empty());
}

TEST_CASE("cloud falls back to a direct push on decline") {
    CloudState cloud;
    cloud.tables = two_server_tables(100.0, 50.0);
    DissemMessage decline;
    decline.type = MessageType::decline;
    decline.sender_id = "A";
    decline.receiver_id = "cloud";
    decline.content_id = "c1";
    decline.target_fog_id = "B";
    auto r = handle_cloud_message(cloud, decline);
    bool fallback = false;
    for (const auto& a : r.actions) {
        if (a.kind == NodeAction::Kind::fallback_direct_push) fallback = true;
    }
    CHECK(fallback);
}

TEST_CASE("hello refreshes the sender's FS row") {
    CloudState cloud;
    DissemMessage hello;
    hello.type = MessageType::hello;
    hello.sender_id = "A";
    hello.receiver_id = "cloud";
    hello.hello_content_ids = {"c1", "c2"};
    hello.hello_device_ids = {"m1"};
    handle_cloud_message(cloud, hello);
    CHECK(cloud.tables.fs["A"].content_ids ==
          std::set<std::string>{"c1", "c2"});
    CHECK(cloud.tables.fs["A"].mobile_device_ids == std::set<std::string>{"m1"});
}

// ---------------------------------------------------------------- end-to-end

namespace {

FogRouteScenarioConfig small_scenario() {
    FogRouteScenarioConfig cfg;
    for (int i = 0; i < 4; ++i) {
        cfg.fog_servers.push_back({"fog_" + std::to_string(i), "fog",
                                   {1500.0 + 2000.0 * (i % 2), 1500.0 + 2000.0 * (i / 2)},
                                   500.0});
    }
    cfg.content_count = 5;
    cfg.seed_copies = 1;
    cfg.warmup_s = 3600.0;
    cfg.horizon_s = 4 * 3600.0;
    return cfg;
}

mobility::TraceSet small_traces(const FogRouteScenarioConfig& cfg, std::uint64_t seed) {
    mobility::SyntheticTraceParams params;
    params.scheduled_devices = 12;
    params.non_scheduled_devices = 12;
    params.area_width_m = 5000.0;
    params.area_height_m = 5000.0;
    params.duration_s = cfg.warmup_s + cfg.horizon_s;
    params.speed_min_mps = 5.0;
    params.speed_max_mps = 12.0;
    params.loop_stations_min = 2;
    params.loop_stations_max = 3;
    sim::RngStream rng(seed, "mobility");
    return mobility::generate_synthetic_trace(params, cfg.fog_servers, rng);
}

}  // namespace

TEST_CASE("fogroute run conserves its message accounting") {
    auto cfg = small_scenario();
    auto traces = small_traces(cfg, 31);
    auto r = run_fogroute(cfg, traces, 31);

    CHECK(r.counters.requests == r.counters.accepts + r.counters.declines);
    CHECK(r.counters.dtn_deliveries == r.counters.acks);
    CHECK(r.unresolved_pairs == 0);
    CHECK(r.deliveries.size() == r.stale_pairs);
    CHECK(r.counters.dtn_deliveries + r.counters.direct_pushes >= r.deliveries.size());
    for (const auto& d : r.deliveries) {
        REQUIRE(d.delivered_at.has_value());
        CHECK(*d.delivered_at >= d.requested_at);
    }
}

TEST_CASE("fogroute run is deterministic under a fixed seed") {
    auto cfg = small_scenario();
    auto traces = small_traces(cfg, 32);
    auto a = run_fogroute(cfg, traces, 32);
    auto b = run_fogroute(cfg, traces, 32);
    REQUIRE(a.deliveries.size() == b.deliveries.size());
    for (std::size_t i = 0; i < a.deliveries.size(); ++i) {
        CHECK(a.deliveries[i].content_id == b.deliveries[i].content_id);
        CHECK(a.deliveries[i].target_fog_id == b.deliveries[i].target_fog_id);
        CHECK(a.deliveries[i].delivered_at == b.deliveries[i].delivered_at);
        CHECK((a.deliveries[i].channel == b.deliveries[i].channel));
    }
    CHECK(a.counters.hellos == b.counters.hellos);
}

TEST_CASE("disabling fallback can leave pairs unresolved, enabling cannot") {
    auto cfg = small_scenario();
    auto traces = small_traces(cfg, 33);
    cfg.fallback_enabled = true;
    auto with = run_fogroute(cfg, traces, 33);
    CHECK(with.unresolved_pairs == 0);

    cfg.fallback_enabled = false;
    auto without = run_fogroute(cfg, traces, 33);
    CHECK(without.counters.direct_pushes == 0);
    // resolved set shrinks or stays equal without the backup channel
    CHECK(without.deliveries.size() <= with.deliveries.size());
}

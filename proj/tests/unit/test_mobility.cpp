#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "vfcsim/mobility/trace.hpp"
#include "vfcsim/sim/rng.hpp"

using namespace vfcsim;
using mobility::Station;
using mobility::Vec2;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::binary);
    out << body;
    return path;
}

mobility::DeviceTrack straight_track(Vec2 from, Vec2 to, double t0, double t1,
                                     std::size_t samples) {
    mobility::DeviceTrack track;
    track.device_id = "d0";
    for (std::size_t i = 0; i < samples; ++i) {
        double a = static_cast<double>(i) / static_cast<double>(samples - 1);
        track.points.push_back({t0 + a * (t1 - t0),
                                {from.x + a * (to.x - from.x), from.y + a * (to.y - from.y)}});
    }
    return track;
}

}  // namespace

TEST_CASE("load_trace reads a two-row single-device file") {
    auto path = write_temp("trace_two_rows.csv",
                           "device_id,t_s,x_m,y_m\n"
                           "cab1,0.0,10.0,20.0\n"
                           "cab1,7.0,15.0,25.0\n");
    auto set = mobility::load_trace(path);
    REQUIRE(set.tracks.count("cab1") == 1);
    CHECK(set.tracks["cab1"].points.size() == 2);
    CHECK(set.tracks["cab1"].points[1].pos.x == 15.0);
    CHECK(set.malformed_rows == 0);
}

TEST_CASE("load_trace rejects devices with non-monotonic timestamps") {
    auto path = write_temp("trace_nonmono.csv",
                           "device_id,t_s,x_m,y_m\n"
                           "bad,5.0,0,0\n"
                           "bad,3.0,1,1\n"
                           "good,0.0,0,0\n"
                           "good,7.0,1,1\n");
    auto set = mobility::load_trace(path);
    CHECK(set.tracks.count("bad") == 0);
    CHECK(set.tracks.count("good") == 1);
    REQUIRE(set.rejected_devices.size() == 1);
    CHECK(set.rejected_devices[0] == "bad");
}

TEST_CASE("load_trace counts malformed rows and validates the header") {
    auto path = write_temp("trace_malformed.csv",
                           "device_id,t_s,x_m,y_m\n"
                           "a,0.0,1.0,2.0\n"
                           "not,enough\n"
                           "a,7.0,2.0,3.0\n");
    auto set = mobility::load_trace(path);
    CHECK(set.malformed_rows == 1);
    CHECK(set.tracks["a"].points.size() == 2);

    auto bad_header = write_temp("trace_badheader.csv", "id,time,x,y\na,0,0,0\n");
    CHECK_THROWS_AS(mobility::load_trace(bad_header), mobility::LoadError);
    CHECK_THROWS_AS(mobility::load_trace("/nonexistent/file.csv"), mobility::LoadError);
}

TEST_CASE("save_trace then load_trace preserves point counts") {
    mobility::TraceSet set;
    set.tracks["x1"] = straight_track({0, 0}, {100, 0}, 0, 70, 11);
    auto path = (std::filesystem::temp_directory_path() / "trace_roundtrip.csv").string();
    mobility::save_trace(set, path);
    auto back = mobility::load_trace(path);
    CHECK(back.tracks["x1"].points.size() == 11);
}

TEST_CASE("position_at interpolates linearly") {
    mobility::DeviceTrack track;
    track.points = {{0.0, {0, 0}}, {10.0, {10, 0}}};
    auto p = mobility::position_at(track, 5.0);
    CHECK(p.x == doctest::Approx(5.0));
    CHECK(p.y == doctest::Approx(0.0));

    // exact at sample points
    CHECK(mobility::position_at(track, 10.0).x == doctest::Approx(10.0));

    mobility::DeviceTrack t2;
    t2.points = {{0.0, {0, 0}}, {10.0, {4, 8}}};
    auto q = mobility::position_at(t2, 2.5);
    CHECK(q.x == doctest::Approx(1.0));
    CHECK(q.y == doctest::Approx(2.0));

    CHECK_THROWS(mobility::position_at(track, 11.0));
}

TEST_CASE("contacts_with finds nothing for a distant track") {
    auto track = straight_track({1000, 1000}, {2000, 1000}, 0, 100, 5);
    Station s{"s", "fog", {0, 0}, 100.0};
    CHECK(mobility::contacts_with(track, s, 100.0).empty());
}

TEST_CASE("straight pass through a disk yields the chord-length duration") {
    // pass at offset 60 m from a station of range 100 m at 10 m/s:
    // chord = 2*sqrt(100^2-60^2) = 160 m -> 16 s inside
    auto track = straight_track({-500, 60}, {500, 60}, 0, 100, 101);
    Station s{"s", "fog", {0, 0}, 100.0};
    auto contacts = mobility::contacts_with(track, s, 100.0);
    REQUIRE(contacts.size() == 1);
    CHECK(contacts[0].duration() == doctest::Approx(16.0).epsilon(1e-5));
    // crossing instants from the closed form: enters at (500-80)/10
    CHECK(contacts[0].start == doctest::Approx(42.0).epsilon(1e-5));
    CHECK(contacts[0].end == doctest::Approx(58.0).epsilon(1e-5));
}

TEST_CASE("track entirely inside range is one full-span interval") {
    auto track = straight_track({-10, 0}, {10, 0}, 5, 25, 5);
    Station s{"s", "fog", {0, 0}, 100.0};
    auto contacts = mobility::contacts_with(track, s, 100.0);
    REQUIRE(contacts.size() == 1);
    CHECK(contacts[0].start == doctest::Approx(5.0));
    CHECK(contacts[0].end == doctest::Approx(25.0));
}

TEST_CASE("contact intervals are disjoint, sorted, and cover in-range samples") {
    // zig-zag crossing the disk twice
    mobility::DeviceTrack track;
    track.device_id = "zig";
    double t = 0.0;
    for (Vec2 wp : {Vec2{-300, 0}, Vec2{0, 0}, Vec2{-300, 10}, Vec2{5, 10}, Vec2{-300, 20}}) {
        track.points.push_back({t, wp});
        t += 50.0;
    }
    Station s{"s", "fog", {0, 0}, 100.0};
    auto contacts = mobility::contacts_with(track, s, 100.0);
    REQUIRE(contacts.size() == 2);
    for (std::size_t i = 0; i < contacts.size(); ++i) {
        CHECK(contacts[i].end > contacts[i].start);
        if (i > 0) CHECK(contacts[i].start > contacts[i - 1].end);
    }
    // sampled membership agrees with the interval union (up to edge tolerance)
    for (double tt = 0.0; tt <= 200.0; tt += 0.5) {
        bool inside = mobility::distance(mobility::position_at(track, tt), s.pos) <= 100.0;
        bool covered = false;
        for (const auto& c : contacts) {
            if (tt >= c.start - 1e-5 && tt <= c.end + 1e-5) covered = true;
        }
        if (inside) CHECK(covered);
    }
}

TEST_CASE("average speed from two visits") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {0, 0}},
        {"d", "f", 10.0, {100, 0}},
    };
    Station server{"f", "fog", {200, 0}, 100.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(est.speed_mps == doctest::Approx(10.0));
}

TEST_CASE("three equally spaced collinear visits give the common segment speed") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {0, 0}},
        {"d", "f", 10.0, {30, 40}},
        {"d", "f", 20.0, {60, 80}},
    };
    Station server{"f", "fog", {600, 800}, 100.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(est.speed_mps == doctest::Approx(5.0));
}

TEST_CASE("only the last three visits are used") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {0, 0}},
        {"d", "f", 1.0, {1000, 0}},  // old fast segment, must be ignored
        {"d", "f", 11.0, {1010, 0}},
        {"d", "f", 21.0, {1020, 0}},
        {"d", "f", 31.0, {1030, 0}},
    };
    Station server{"f", "fog", {2000, 0}, 100.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(est.speed_mps == doctest::Approx(1.0));
}

TEST_CASE("fewer than two visits is a no-estimate error") {
    std::vector<mobility::VisitRecord> one = {{"d", "f", 0.0, {0, 0}}};
    Station server{"f", "fog", {100, 0}, 100.0};
    CHECK_THROWS_AS(mobility::average_speed_and_direction(one, server),
                    mobility::NoEstimateError);
}

TEST_CASE("delivery time: straight toward the server") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {-200, 0}},
        {"d", "f", 10.0, {-100, 0}},
    };
    Station server{"f", "fog", {0, 0}, 50.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(mobility::estimated_delivery_time(est, server) == doctest::Approx(10.0));
}

TEST_CASE("delivery time: heading away is the infinite sentinel") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {-100, 0}},
        {"d", "f", 10.0, {-200, 0}},
    };
    Station server{"f", "fog", {0, 0}, 50.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(std::isinf(mobility::estimated_delivery_time(est, server)));
}

TEST_CASE("delivery time: 60 degrees off-axis doubles the time") {
    // moving along +x at 10 m/s, server at 60 degrees from the heading, 100 m out
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {-100, 0}},
        {"d", "f", 10.0, {0, 0}},
    };
    Station server{"f", "fog", {50.0, 50.0 * std::sqrt(3.0)}, 10.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(mobility::estimated_delivery_time(est, server) == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("zero speed gives the infinite sentinel") {
    std::vector<mobility::VisitRecord> visits = {
        {"d", "f", 0.0, {0, 0}},
        {"d", "f", 10.0, {0, 0}},
    };
    Station server{"f", "fog", {100, 0}, 50.0};
    auto est = mobility::average_speed_and_direction(visits, server);
    CHECK(std::isinf(mobility::estimated_delivery_time(est, server)));
}

TEST_CASE("sample_highway degenerate cases") {
    sim::RngStream rng(3, "test");
    mobility::HighwayFlowParams p{0.0, 10.0, 20.0, 0.5, 1000.0};
    CHECK(mobility::sample_highway(p, rng).empty());

    p.lambda_per_m = 0.01;
    p.p_opposite = 1.0;
    auto vehicles = mobility::sample_highway(p, rng);
    for (const auto& v : vehicles) {
        CHECK(v.opposite_direction);
        CHECK(v.position_m >= 0.0);
        CHECK(v.position_m <= 1000.0);
        CHECK(v.speed_mps >= 10.0);
        CHECK(v.speed_mps <= 20.0);
    }
}

TEST_CASE("sample_highway count is Poisson with the right mean") {
    sim::RngStream rng(11, "test");
    mobility::HighwayFlowParams p{0.004, 10.0, 20.0, 0.5, 1000.0};  // mean 4
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(mobility::sample_highway(p, rng).size());
    CHECK(std::abs(sum / n - 4.0) < 0.02 * 4.0);
}

TEST_CASE("synthetic trace generation is deterministic and visits its loop") {
    std::vector<Station> servers;
    for (int i = 0; i < 6; ++i) {
        servers.push_back({"fog_" + std::to_string(i), "fog",
                           {1000.0 + 1500.0 * i, 2000.0}, 500.0});
    }
    mobility::SyntheticTraceParams params;
    params.scheduled_devices = 3;
    params.non_scheduled_devices = 3;
    params.duration_s = 6 * 3600.0;
    params.speed_min_mps = 5.0;
    params.speed_max_mps = 10.0;

    sim::RngStream rng1(99, "mobility"), rng2(99, "mobility");
    auto a = mobility::generate_synthetic_trace(params, servers, rng1);
    auto b = mobility::generate_synthetic_trace(params, servers, rng2);
    REQUIRE(a.tracks.size() == 6);
    for (const auto& [id, track] : a.tracks) {
        REQUIRE(b.tracks.count(id) == 1);
        const auto& other = b.tracks.at(id);
        REQUIRE(track.points.size() == other.points.size());
        for (std::size_t i = 0; i < track.points.size(); ++i) {
            CHECK(track.points[i].t == other.points[i].t);
            CHECK(track.points[i].pos.x == other.points[i].pos.x);
            CHECK(track.points[i].pos.y == other.points[i].pos.y);
        }
    }

    // every scheduled device repeatedly contacts each server on its loop
    for (const auto& [id, track] : a.tracks) {
        if (track.kind != mobility::DeviceKind::scheduled) continue;
        REQUIRE(track.loop_stations.size() >= 2);
        for (const auto& sid : track.loop_stations) {
            auto it = std::find_if(servers.begin(), servers.end(),
                                   [&](const Station& s) { return s.station_id == sid; });
            REQUIRE(it != servers.end());
            auto contacts = mobility::contacts_with(track, *it, it->range_m);
            CHECK(contacts.size() >= 2);  // loops, not a single pass
        }
    }
}

TEST_CASE("generator rejects empty work") {
    std::vector<Station> servers{{"f", "fog", {0, 0}, 100.0}};
    mobility::SyntheticTraceParams params;  // zero devices / duration
    sim::RngStream rng(1, "mobility");
    CHECK_THROWS(mobility::generate_synthetic_trace(params, servers, rng));
}

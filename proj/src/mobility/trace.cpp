#include "vfcsim/mobility/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vfcsim::mobility {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

TraceSet load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty trace file: " + path);
    if (split_csv(line) != std::vector<std::string>{"device_id", "t_s", "x_m", "y_m"}) {
        throw LoadError("trace header mismatch in " + path +
                        " (expected device_id,t_s,x_m,y_m)");
    }
    TraceSet set;
    std::map<std::string, bool> monotonic;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        TracePoint p;
        if (fields.size() != 4 || fields[0].empty() || !parse_double(fields[1], p.t) ||
            !parse_double(fields[2], p.pos.x) || !parse_double(fields[3], p.pos.y)) {
            ++set.malformed_rows;
            continue;
        }
        auto& track = set.tracks[fields[0]];
        if (track.device_id.empty()) {
            track.device_id = fields[0];
            monotonic[fields[0]] = true;
        }
        if (!track.points.empty() && p.t <= track.points.back().t) {
            monotonic[fields[0]] = false;
        }
        track.points.push_back(p);
    }
    for (auto& [id, ok] : monotonic) {
        if (!ok) {
            set.tracks.erase(id);
            set.rejected_devices.push_back(id);
        }
    }
    return set;
}

std::vector<Station> load_stations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open station file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty station file: " + path);
    if (split_csv(line) !=
        std::vector<std::string>{"station_id", "kind", "x_m", "y_m", "range_m"}) {
        throw LoadError("station header mismatch in " + path);
    }
    std::vector<Station> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv(line);
        Station s;
        if (fields.size() != 5 || fields[0].empty() ||
            (fields[1] != "fog" && fields[1] != "ap") ||
            !parse_double(fields[2], s.pos.x) || !parse_double(fields[3], s.pos.y) ||
            !parse_double(fields[4], s.range_m)) {
            throw LoadError("malformed station row: " + line);
        }
        s.station_id = fields[0];
        s.kind = fields[1];
        out.push_back(s);
    }
    return out;
}

void save_trace(const TraceSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write trace file: " + path);
    out << "device_id,t_s,x_m,y_m\n";
    char buf[160];
    for (const auto& [id, track] : set.tracks) {
        for (const auto& p : track.points) {
            std::snprintf(buf, sizeof(buf), "%s,%.3f,%.3f,%.3f\n", id.c_str(), p.t,
                          p.pos.x, p.pos.y);
            out << buf;
        }
    }
}

void save_stations(const std::vector<Station>& stations, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write station file: " + path);
    out << "station_id,kind,x_m,y_m,range_m\n";
    char buf[160];
    for (const auto& s : stations) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%.3f,%.3f\n", s.station_id.c_str(),
                      s.kind.c_str(), s.pos.x, s.pos.y, s.range_m);
        out << buf;
    }
}

TraceSet generate_synthetic_trace(const SyntheticTraceParams& params,
                                  const std::vector<Station>& fog_servers,
                                  sim::RngStream& rng) {
    if (params.duration_s <= 0.0) throw LoadError("synthetic trace: zero duration");
    if (params.scheduled_devices + params.non_scheduled_devices == 0) {
        throw LoadError("synthetic trace: zero devices");
    }
    TraceSet set;

    auto walk = [&](DeviceTrack& track, Vec2 start, auto next_waypoint, double speed) {
        Vec2 pos = start;
        Vec2 target = next_waypoint();
        double t = 0.0;
        track.points.push_back({0.0, pos});
        while (t < params.duration_s) {
            double step = speed * params.cadence_s;
            double d = distance(pos, target);
            while (d <= step) {
                // pass through the waypoint and keep going toward the next one
                step -= d;
                pos = target;
                target = next_waypoint();
                d = distance(pos, target);
                if (d == 0.0) break;
            }
            if (d > 0.0) {
                pos.x += (target.x - pos.x) / d * step;
                pos.y += (target.y - pos.y) / d * step;
            }
            t += params.cadence_s;
            track.points.push_back({t, pos});
        }
    };

    for (std::size_t i = 0; i < params.scheduled_devices; ++i) {
        DeviceTrack track;
        track.device_id = "sched_" + std::to_string(i);
        track.kind = DeviceKind::scheduled;
        std::size_t n_loop = params.loop_stations_min;
        if (params.loop_stations_max > params.loop_stations_min) {
            n_loop += rng.uniform_int(params.loop_stations_max -
                                      params.loop_stations_min + 1);
        }
        n_loop = std::min(n_loop, fog_servers.size());
        if (n_loop < 2) throw LoadError("synthetic trace: need >= 2 fog servers for loops");
        std::vector<std::size_t> picks;
        while (picks.size() < n_loop) {
            std::size_t p = rng.uniform_int(fog_servers.size());
            if (std::find(picks.begin(), picks.end(), p) == picks.end()) picks.push_back(p);
        }
        for (auto p : picks) track.loop_stations.push_back(fog_servers[p].station_id);
        double speed = rng.uniform(params.speed_min_mps, params.speed_max_mps);
        std::size_t idx = 0;
        auto next_wp = [&]() {
            Vec2 wp = fog_servers[picks[idx % picks.size()]].pos;
            ++idx;
            return wp;
        };
        Vec2 start = fog_servers[picks[0]].pos;
        ++idx;
        walk(track, start, next_wp, speed);
        set.tracks[track.device_id] = std::move(track);
    }

    for (std::size_t i = 0; i < params.non_scheduled_devices; ++i) {
        DeviceTrack track;
        track.device_id = "ns_" + std::to_string(i);
        track.kind = DeviceKind::non_scheduled;
        double speed = rng.uniform(params.speed_min_mps, params.speed_max_mps);
        auto next_wp = [&]() {
            return Vec2{rng.uniform(0.0, params.area_width_m),
                        rng.uniform(0.0, params.area_height_m)};
        };
        Vec2 start{rng.uniform(0.0, params.area_width_m),
                   rng.uniform(0.0, params.area_height_m)};
        walk(track, start, next_wp, speed);
        set.tracks[track.device_id] = std::move(track);
    }
    return set;
}

Vec2 position_at(const DeviceTrack& track, SimTime t) {
    if (track.points.empty() || t < track.points.front().t || t > track.points.back().t) {
        throw std::out_of_range("position_at: t outside track span");
    }
    auto it = std::lower_bound(track.points.begin(), track.points.end(), t,
                               [](const TracePoint& p, SimTime v) { return p.t < v; });
    if (it->t == t) return it->pos;
    const TracePoint& b = *it;
    const TracePoint& a = *(it - 1);
    double f = (t - a.t) / (b.t - a.t);
    return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
}

namespace {

// distance to station at time t on segment [a, b], linear motion
double seg_dist(const TracePoint& a, const TracePoint& b, const Vec2& c, double t) {
    double f = (t - a.t) / (b.t - a.t);
    Vec2 p{a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
    return distance(p, c);
}

// sign change of (dist - R) between t_in and t_out (either order); 1e-6 s tolerance
double bisect_crossing(const TracePoint& a, const TracePoint& b, const Vec2& c, double R,
                       double t_in, double t_out) {
    double f_in = seg_dist(a, b, c, t_in) - R;
    for (int i = 0; i < 60 && std::abs(t_out - t_in) > 1e-6; ++i) {
        double mid = 0.5 * (t_in + t_out);
        double f_mid = seg_dist(a, b, c, mid) - R;
        if ((f_in <= 0.0) == (f_mid <= 0.0)) {
            t_in = mid;
            f_in = f_mid;
        } else {
            t_out = mid;
        }
    }
    return 0.5 * (t_in + t_out);
}

// minimum distance from moving point to c over segment, for entry/exit detection
double seg_min_dist(const TracePoint& a, const TracePoint& b, const Vec2& c,
                    double& t_min) {
    double dx = b.pos.x - a.pos.x, dy = b.pos.y - a.pos.y;
    double len2 = dx * dx + dy * dy;
    t_min = a.t;
    if (len2 == 0.0) return distance(a.pos, c);
    double u = ((c.x - a.pos.x) * dx + (c.y - a.pos.y) * dy) / len2;
    u = std::clamp(u, 0.0, 1.0);
    t_min = a.t + u * (b.t - a.t);
    Vec2 p{a.pos.x + u * dx, a.pos.y + u * dy};
    return distance(p, c);
}

}  // namespace

std::vector<ContactInterval> contacts_with(const DeviceTrack& track,
                                           const Station& station, double R) {
    std::vector<ContactInterval> out;
    if (R <= 0.0) throw std::invalid_argument("contacts_with: R must be positive");
    if (track.points.size() < 2) return out;
    const Vec2& c = station.pos;

    bool inside = distance(track.points.front().pos, c) <= R;
    double open_start = track.points.front().t;

    auto close_interval = [&](double end_t) {
        if (end_t > open_start) {
            out.push_back({track.device_id, station.station_id, open_start, end_t});
        }
    };

    for (std::size_t i = 0; i + 1 < track.points.size(); ++i) {
        const TracePoint& a = track.points[i];
        const TracePoint& b = track.points[i + 1];
        double da = distance(a.pos, c) - R;
        double db = distance(b.pos, c) - R;
        if (da > 0.0 && db > 0.0) {
            // may still dip inside mid-segment
            double t_min;
            double dmin = seg_min_dist(a, b, c, t_min);
            if (dmin <= R && t_min > a.t && t_min < b.t) {
                double t_in = bisect_crossing(a, b, c, R, a.t, t_min);
                double t_out = bisect_crossing(a, b, c, R, b.t, t_min);
                open_start = t_in;
                close_interval(t_out);
                inside = false;
            }
            continue;
        }
        if (da <= 0.0 && db <= 0.0) continue;  // stays inside
        if (da > 0.0 && db <= 0.0) {
            open_start = bisect_crossing(a, b, c, R, a.t, b.t);
            inside = true;
        } else {  // exit
            double t_out = bisect_crossing(a, b, c, R, b.t, a.t);
            close_interval(t_out);
            inside = false;
        }
    }
    if (inside) close_interval(track.points.back().t);
    return out;
}

SpeedDirection average_speed_and_direction(const std::vector<VisitRecord>& visits,
                                           const Station& fog_server) {
    if (visits.size() < 2) {
        throw NoEstimateError("average_speed_and_direction: need >= 2 visits");
    }
    std::size_t n = std::min<std::size_t>(visits.size(), 3);
    std::size_t first = visits.size() - n;
    double speed_sum = 0.0;
    std::size_t segments = 0;
    for (std::size_t i = first; i + 1 < visits.size(); ++i) {
        double d = distance(visits[i].position, visits[i + 1].position);
        double dt = visits[i + 1].arrival - visits[i].arrival;
        if (dt <= 0.0) continue;
        speed_sum += d / dt;
        ++segments;
    }
    if (segments == 0) {
        throw NoEstimateError("average_speed_and_direction: degenerate visit times");
    }
    SpeedDirection est;
    est.speed_mps = speed_sum / static_cast<double>(segments);
    const VisitRecord& last = visits.back();
    const VisitRecord& prev = visits[visits.size() - 2];
    double hx = last.position.x - prev.position.x;
    double hy = last.position.y - prev.position.y;
    double hlen = std::hypot(hx, hy);
    est.heading = hlen > 0.0 ? Vec2{hx / hlen, hy / hlen} : Vec2{0.0, 0.0};
    est.bearing_rad = std::atan2(fog_server.pos.y - last.position.y,
                                 fog_server.pos.x - last.position.x);
    est.last_position = last.position;
    return est;
}

double estimated_delivery_time(const SpeedDirection& est, const Station& fog_server) {
    constexpr double kEpsilonSpeed = 1e-6;
    double d = distance(est.last_position, fog_server.pos);
    if (d == 0.0) return 0.0;
    Vec2 to_server{(fog_server.pos.x - est.last_position.x) / d,
                   (fog_server.pos.y - est.last_position.y) / d};
    double cos_angle = est.heading.x * to_server.x + est.heading.y * to_server.y;
    if (cos_angle <= 0.0) return kDeliveryTimeInfinite;
    double projected = est.speed_mps * cos_angle;
    if (projected < kEpsilonSpeed) return kDeliveryTimeInfinite;
    return d / projected;
}

std::vector<HighwayVehicle> sample_highway(const HighwayFlowParams& params,
                                           sim::RngStream& rng) {
    if (params.lambda_per_m < 0.0 || params.speed_min_mps > params.speed_max_mps ||
        params.p_opposite < 0.0 || params.p_opposite > 1.0) {
        throw std::invalid_argument("sample_highway: invalid params");
    }
    std::uint64_t n = rng.poisson(params.lambda_per_m * params.road_length_m);
    std::vector<HighwayVehicle> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        HighwayVehicle v;
        v.position_m = rng.uniform(0.0, params.road_length_m);
        v.opposite_direction = rng.bernoulli(params.p_opposite);
        v.speed_mps = rng.uniform(params.speed_min_mps, params.speed_max_mps);
        out.push_back(v);
    }
    return out;
}

}  // namespace vfcsim::mobility

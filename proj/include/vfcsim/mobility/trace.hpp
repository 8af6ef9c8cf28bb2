#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfcsim/sim/rng.hpp"
#include "vfcsim/sim/simulator.hpp"

namespace vfcsim::mobility {

using sim::SimTime;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct TracePoint {
    SimTime t = 0.0;
    Vec2 pos;
};

enum class DeviceKind { scheduled, non_scheduled };

struct DeviceTrack {
    std::string device_id;
    DeviceKind kind = DeviceKind::non_scheduled;
    std::vector<TracePoint> points;  // strictly increasing in t
    // server ids on the fixed loop, set for scheduled devices
    std::vector<std::string> loop_stations;
};

struct Station {
    std::string station_id;
    std::string kind;  // "fog" or "ap"
    Vec2 pos;
    double range_m = 0.0;
};

struct ContactInterval {
    std::string device_id;
    std::string station_id;
    SimTime start = 0.0;
    SimTime end = 0.0;
    SimTime duration() const { return end - start; }
};

struct VisitRecord {
    std::string device_id;
    std::string fog_server_id;
    SimTime arrival = 0.0;
    Vec2 position;
};

struct TraceSet {
    // keyed by device_id; std::map keeps iteration order deterministic
    std::map<std::string, DeviceTrack> tracks;
    std::size_t malformed_rows = 0;
    std::vector<std::string> rejected_devices;
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV header `device_id,t_s,x_m,y_m`; per-device rows must be time-sorted.
TraceSet load_trace(const std::string& path);

// CSV header `station_id,kind,x_m,y_m,range_m`; kind in {fog, ap}.
std::vector<Station> load_stations(const std::string& path);

void save_trace(const TraceSet& set, const std::string& path);
void save_stations(const std::vector<Station>& stations, const std::string& path);

struct SyntheticTraceParams {
    std::size_t scheduled_devices = 0;
    std::size_t non_scheduled_devices = 0;
    double area_width_m = 10000.0;
    double area_height_m = 10000.0;
    double cadence_s = 7.0;
    double duration_s = 0.0;
    double speed_min_mps = 8.0;
    double speed_max_mps = 14.0;
    std::size_t loop_stations_min = 3;  // fog servers per scheduled loop
    std::size_t loop_stations_max = 6;
};

// Scheduled devices run fixed loops through assigned fog servers;
// non-scheduled devices do a random waypoint walk. Deterministic per seed.
TraceSet generate_synthetic_trace(const SyntheticTraceParams& params,
                                  const std::vector<Station>& fog_servers,
                                  sim::RngStream& rng);

// Linear interpolation; t must lie within the track span.
Vec2 position_at(const DeviceTrack& track, SimTime t);

// Maximal intervals with distance(track, station) <= R. Crossing times are
// located by bisection on the bracketing segment to 1e-6 s.
std::vector<ContactInterval> contacts_with(const DeviceTrack& track,
                                           const Station& station, double R);

struct NoEstimateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpeedDirection {
    double speed_mps = 0.0;    // mean of segment speeds over the last visits
    double bearing_rad = 0.0;  // direction from most recent visit toward the server
    Vec2 heading;              // unit displacement over the most recent segment
    Vec2 last_position;
};

// Uses the last 3 visits (or all if fewer); throws NoEstimateError below 2.
SpeedDirection average_speed_and_direction(const std::vector<VisitRecord>& visits,
                                           const Station& fog_server);

inline constexpr double kDeliveryTimeInfinite = std::numeric_limits<double>::infinity();

// Distance over speed projected toward the server; +inf when heading away
// or speed is (near) zero.
double estimated_delivery_time(const SpeedDirection& est, const Station& fog_server);

struct HighwayFlowParams {
    double lambda_per_m = 0.0;  // average linear vehicle density
    double speed_min_mps = 0.0;
    double speed_max_mps = 0.0;
    double p_opposite = 0.0;  // P_0
    double road_length_m = 0.0;
};

struct HighwayVehicle {
    double position_m = 0.0;
    double speed_mps = 0.0;
    bool opposite_direction = false;
};

// Vehicle count ~ Poisson(lambda * road_length); positions uniform.
std::vector<HighwayVehicle> sample_highway(const HighwayFlowParams& params,
                                           sim::RngStream& rng);

}  // namespace vfcsim::mobility

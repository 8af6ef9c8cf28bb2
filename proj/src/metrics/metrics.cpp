#include "vfcsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace vfcsim::metrics {

const char* scheme_name(HandoffScheme s) {
    return s == HandoffScheme::cvfh ? "cvfh" : "ieee80211";
}

double delivery_ratio(const std::vector<DeliveryRecord>& records, double expected_delay_s,
                      bool include_cloud_fallback) {
    std::size_t considered = 0, within = 0;
    for (const auto& r : records) {
        if (r.channel == DeliveryChannel::cloud_direct && !include_cloud_fallback) {
            continue;
        }
        ++considered;
        if (r.delivered_at && *r.delivered_at - r.requested_at <= expected_delay_s) {
            ++within;
        }
    }
    if (considered == 0) {
        throw std::invalid_argument("delivery_ratio: no records to evaluate");
    }
    return static_cast<double>(within) / static_cast<double>(considered);
}

ConvergenceSummary convergence_times(const std::vector<ConvergenceRecord>& records) {
    ConvergenceSummary summary;
    for (const auto& r : records) {
        if (r.converged_at) {
            summary.durations_s.push_back(*r.converged_at - r.started_at);
        } else {
            ++summary.unconverged;
        }
    }
    std::sort(summary.durations_s.begin(), summary.durations_s.end());
    return summary;
}

std::map<double, std::map<HandoffScheme, GroupStats>> handoff_delay_stats(
    const std::vector<HandoffResult>& results, HandoffGroupBy group_by) {
    std::map<double, std::map<HandoffScheme, std::vector<double>>> delays;
    std::map<double, std::map<HandoffScheme, GroupStats>> out;
    for (const auto& r : results) {
        double key = group_by == HandoffGroupBy::speed ? r.speed_mps : r.packet_rate_hz;
        auto& stats = out[key][r.scheme];
        if (r.success) {
            delays[key][r.scheme].push_back(r.delay_s());
            ++stats.successes;
        } else {
            ++stats.failures;
        }
    }
    for (auto& [key, by_scheme] : delays) {
        for (auto& [scheme, values] : by_scheme) {
            auto& stats = out[key][scheme];
            double sum = 0.0;
            for (double v : values) sum += v;
            stats.mean_s = sum / static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - stats.mean_s) * (v - stats.mean_s);
            stats.stddev_s = std::sqrt(var / static_cast<double>(values.size()));
        }
    }
    return out;
}

ThroughputSummary throughput(const std::vector<ThroughputRecord>& records,
                             double duration_s) {
    if (duration_s <= 0.0) throw std::invalid_argument("throughput: zero duration");
    ThroughputSummary summary;
    for (const auto& r : records) {
        summary.per_vehicle_bps[r.vehicle_id] += r.bits_delivered / duration_s;
    }
    for (const auto& [id, bps] : summary.per_vehicle_bps) summary.aggregate_bps += bps;
    return summary;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

template <typename T, typename Key>
std::vector<const T*> sorted_view(const std::vector<T>& rows, Key key) {
    std::vector<const T*> view;
    view.reserve(rows.size());
    for (const auto& r : rows) view.push_back(&r);
    std::stable_sort(view.begin(), view.end(),
                     [&](const T* a, const T* b) { return key(*a) < key(*b); });
    return view;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write " + path);
    out << body;
}

}  // namespace

void emit_report(const AllMetrics& metrics, ReportFormat format,
                 const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto deliveries = sorted_view(metrics.deliveries, [](const DeliveryRecord& r) {
        return std::tie(r.content_id, r.target_fog_id, r.requested_at);
    });
    auto convergence = sorted_view(metrics.convergence, [](const ConvergenceRecord& r) {
        return r.fog_server_id;
    });
    auto handoffs = sorted_view(metrics.handoffs, [](const HandoffResult& r) {
        return std::make_tuple(static_cast<int>(r.scheme), r.speed_mps,
                               r.packet_rate_hz, r.trigger_time, r.cv_id);
    });
    auto tput = sorted_view(metrics.throughput, [](const ThroughputRecord& r) {
        return std::make_tuple(static_cast<int>(r.scheme), r.speed_mps,
                               r.packet_rate_hz, r.vehicle_id);
    });

    if (format == ReportFormat::csv) {
        std::string body = "content_id,target,requested_s,delivered_s,channel\n";
        for (const auto* r : deliveries) {
            body += r->content_id + "," + r->target_fog_id + "," + fmt(r->requested_at) +
                    "," + (r->delivered_at ? fmt(*r->delivered_at) : "") + "," +
                    (r->channel == DeliveryChannel::dtn ? "dtn" : "cloud_direct") + "\n";
        }
        write_file(out_dir + "/delivery.csv", body);

        body = "server_id,duration_s,converged\n";
        for (const auto* r : convergence) {
            bool conv = r->converged_at.has_value();
            body += r->fog_server_id + "," +
                    (conv ? fmt(*r->converged_at - r->started_at) : "") + "," +
                    (conv ? "1" : "0") + "\n";
        }
        write_file(out_dir + "/convergence.csv", body);

        body = "scheme,speed_mps,packet_rate,delay_s,success\n";
        for (const auto* r : handoffs) {
            body += std::string(scheme_name(r->scheme)) + "," + fmt(r->speed_mps) + "," +
                    fmt(r->packet_rate_hz) + "," + fmt(r->delay_s()) + "," +
                    (r->success ? "1" : "0") + "\n";
        }
        write_file(out_dir + "/handoff.csv", body);

        body = "vehicle_id,speed_mps,packet_rate,bits_per_s\n";
        for (const auto* r : tput) {
            double window = r->window_end - r->window_start;
            body += r->vehicle_id + "," + fmt(r->speed_mps) + "," +
                    fmt(r->packet_rate_hz) + "," +
                    fmt(window > 0.0 ? r->bits_delivered / window : 0.0) + "\n";
        }
        write_file(out_dir + "/throughput.csv", body);
        return;
    }

    // numbers pass through the CSV formatter so both formats round identically
    auto num = [&](double v) { return std::stod(fmt(v)); };
    nlohmann::ordered_json j;
    j["delivery"] = nlohmann::ordered_json::array();
    for (const auto* r : deliveries) {
        nlohmann::ordered_json row;
        row["content_id"] = r->content_id;
        row["target"] = r->target_fog_id;
        row["requested_s"] = num(r->requested_at);
        if (r->delivered_at) {
            row["delivered_s"] = num(*r->delivered_at);
        } else {
            row["delivered_s"] = nullptr;
        }
        row["channel"] = r->channel == DeliveryChannel::dtn ? "dtn" : "cloud_direct";
        j["delivery"].push_back(row);
    }
    j["convergence"] = nlohmann::ordered_json::array();
    for (const auto* r : convergence) {
        nlohmann::ordered_json row;
        bool conv = r->converged_at.has_value();
        row["server_id"] = r->fog_server_id;
        if (conv) {
            row["duration_s"] = num(*r->converged_at - r->started_at);
        } else {
            row["duration_s"] = nullptr;
        }
        row["converged"] = conv;
        j["convergence"].push_back(row);
    }
    j["handoff"] = nlohmann::ordered_json::array();
    for (const auto* r : handoffs) {
        nlohmann::ordered_json row;
        row["scheme"] = scheme_name(r->scheme);
        row["speed_mps"] = num(r->speed_mps);
        row["packet_rate"] = num(r->packet_rate_hz);
        row["delay_s"] = num(r->delay_s());
        row["success"] = r->success;
        j["handoff"].push_back(row);
    }
    j["throughput"] = nlohmann::ordered_json::array();
    for (const auto* r : tput) {
        nlohmann::ordered_json row;
        double window = r->window_end - r->window_start;
        row["vehicle_id"] = r->vehicle_id;
        row["speed_mps"] = num(r->speed_mps);
        row["packet_rate"] = num(r->packet_rate_hz);
        row["bits_per_s"] = num(window > 0.0 ? r->bits_delivered / window : 0.0);
        j["throughput"].push_back(row);
    }
    write_file(out_dir + "/metrics.json", j.dump(2) + "\n");
}

}  // namespace vfcsim::metrics

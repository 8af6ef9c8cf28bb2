#include "vfcsim/cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vfcsim/analytics/model.hpp"
#include "vfcsim/cvfh/handoff_sim.hpp"
#include "vfcsim/fogroute/simulation.hpp"
#include "vfcsim/metrics/metrics.hpp"
#include "vfcsim/mobility/trace.hpp"
#include "vfcsim/sim/rng.hpp"

namespace vfcsim::cli {

namespace {

namespace fs = std::filesystem;

json default_config() {
    json grid = json::object();
    grid["lambda_per_m"] = json::array({0.01});
    grid["range_m"] = json::array({250.0});
    grid["v_cv_kmh"] = json::array({60.0});
    grid["v_nav_kmh"] = json::array({72.0});
    grid["t_pkt_vv_ms"] = json::array({2.0});
    grid["t_pkt_vi_ms"] = json::array({2.0});
    grid["n_vv"] = json::array({4});
    grid["n_vi"] = json::array({4});
    grid["n_80211"] = json::array({8});
    grid["pe_vv"] = json::array({0.02});
    grid["pe_vi"] = json::array({0.02});
    grid["t_auth_ms"] = json::array({30.0});
    grid["t_asso_ms"] = json::array({30.0});
    grid["p_opposite"] = json::array({0.5});
    grid["p_slower"] = json::array({0.5});
    grid["p_ap_neighbor"] = json::array({0.3});

    json cfg;
    cfg["schema_version"] = 1;
    cfg["mode"] = "analytic";
    cfg["seed"] = 42;
    cfg["output_dir"] = "out";
    cfg["analytic"] = {{"variant", "corrected"}, {"grid", grid}};
    cfg["fogroute"] = {
        {"stations_file", ""},
        {"fog_server_count", 50},
        {"fog_range_m", 500.0},
        {"area_width_m", 10000.0},
        {"area_height_m", 10000.0},
        {"trace_file", ""},
        {"generator",
         {{"scheduled_devices", 40},
          {"non_scheduled_devices", 330},
          {"cadence_s", 7.0},
          {"speed_min_kmh", 10.0},
          {"speed_max_kmh", 25.0},
          {"loop_stations_min", 3},
          {"loop_stations_max", 6}}},
        {"content_count", 20},
        {"content_size_mb", 10.0},
        {"affordable_delay_h", 10.0},
        {"validation_time_s", 0.0},
        {"uplink_mb_per_s", 1.0},
        {"hello_interval_s", 60.0},
        {"ordering", "random"},
        {"fallback_enabled", true},
        {"warmup_h", 2.0},
        {"horizon_h", 12.0},
        {"seed_copies", 3},
        {"pickup_deadline_h", 2.0},
        {"ack_timeout_h", 11.5},
        {"cloud_push_latency_s", 60.0},
        {"expected_delays_h", json::array({2.0, 6.0, 8.0, 10.0})},
        {"include_cloud_fallback", false}};
    cfg["cvfh"] = {
        {"road_length_m", 9600.0},
        {"ap_spacing_m", 400.0},
        {"ap_range_m", 250.0},
        {"cv_speed_kmh", 72.0},
        {"packet_rate_hz", 50.0},
        {"packet_size_bits", 8192.0},
        {"duration_s", 600.0},
        {"lambda_per_m", 0.03},
        {"neighbor_speed_min_kmh", 30.0},
        {"neighbor_speed_max_kmh", 110.0},
        {"p_opposite", 0.5},
        {"plr_mode", "ramp"},
        {"plr_constant", 0.1},
        {"plr_floor", 0.05},
        {"tx_power_dbm", 20.0},
        {"path_loss_exponent", 2.0},
        {"trigger",
         {{"ti_s", 1.0}, {"plr_threshold", 0.4}, {"rssi_sample_interval_s", 0.1}}},
        {"link",
         {{"n_vv", 4},
          {"n_vi", 4},
          {"n_80211", 8},
          {"t_pkt_vv_ms", 2.0},
          {"t_pkt_vi_ms", 2.0},
          {"t_auth_ms", 30.0},
          {"t_asso_ms", 30.0},
          {"pe_vv", 0.02},
          {"pe_vi", 0.02},
          {"retry_budget", 3}}},
        {"reply_base_delay_ms", 10.0},
        {"retry_interval_s", 0.5}};
    return cfg;
}

void validate_against(const json& user, const json& tmpl, const std::string& path) {
    if (!user.is_object()) {
        throw ConfigError("config: expected object at " + (path.empty() ? "/" : path));
    }
    for (auto it = user.begin(); it != user.end(); ++it) {
        std::string here = path + "/" + it.key();
        if (path == "/analytic" && it.key() == "grid") continue;  // grid keys below
        if (!tmpl.contains(it.key())) {
            throw ConfigError("config: unknown key " + here);
        }
        if (tmpl[it.key()].is_object() && !it.value().is_null()) {
            validate_against(it.value(), tmpl[it.key()], here);
        }
    }
}

void merge_defaults(json& user, const json& tmpl) {
    for (auto it = tmpl.begin(); it != tmpl.end(); ++it) {
        if (!user.contains(it.key())) {
            user[it.key()] = it.value();
        } else if (it.value().is_object() && user[it.key()].is_object()) {
            merge_defaults(user[it.key()], it.value());
        }
    }
}

double kmh_to_mps(double v) { return v / 3.6; }

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// ---------------------------------------------------------------- analytic

analytics::AnalyticParams params_from_point(const json& pt) {
    analytics::AnalyticParams p;
    p.lambda_per_m = pt.at("lambda_per_m").get<double>();
    p.range_m = pt.at("range_m").get<double>();
    p.v_cv_mps = kmh_to_mps(pt.at("v_cv_kmh").get<double>());
    p.v_nav_mps = kmh_to_mps(pt.at("v_nav_kmh").get<double>());
    p.t_pkt_vv_s = pt.at("t_pkt_vv_ms").get<double>() / 1000.0;
    p.t_pkt_vi_s = pt.at("t_pkt_vi_ms").get<double>() / 1000.0;
    p.n_vv = pt.at("n_vv").get<unsigned>();
    p.n_vi = pt.at("n_vi").get<unsigned>();
    p.n_80211 = pt.at("n_80211").get<unsigned>();
    p.pe_vv = pt.at("pe_vv").get<double>();
    p.pe_vi = pt.at("pe_vi").get<double>();
    p.t_auth_s = pt.at("t_auth_ms").get<double>() / 1000.0;
    p.t_asso_s = pt.at("t_asso_ms").get<double>() / 1000.0;
    p.p_opposite = pt.at("p_opposite").get<double>();
    p.p_slower = pt.at("p_slower").get<double>();
    p.p_ap_neighbor = pt.at("p_ap_neighbor").get<double>();
    return p;
}

int run_analytic(const json& config, const std::string& out_dir) {
    using namespace analytics;
    const json& grid = config.at("analytic").at("grid");
    std::vector<std::string> keys;
    for (auto it = grid.begin(); it != grid.end(); ++it) keys.push_back(it.key());

    std::vector<json> points;
    json current = json::object();
    std::function<void(std::size_t)> expand = [&](std::size_t depth) {
        if (depth == keys.size()) {
            points.push_back(current);
            return;
        }
        const json& vals = grid.at(keys[depth]);
        for (const auto& v : vals) {
            current[keys[depth]] = v;
            expand(depth + 1);
        }
    };
    expand(0);

    std::string body;
    for (const auto& k : keys) body += k + ",";
    body +=
        "t_80211_s,p_80211,t_wl_s,t_ap_s,t_cvfh_s,p_s_vv,p_s_vi,"
        "p_one_in_range,p_double_prime,"
        "p_two_in_range_corrected,p_two_in_range_as_written,"
        "p_prime_corrected,p_prime_as_written,"
        "p_opposite_corrected,p_opposite_as_written,"
        "p_vehicle_assisted_corrected,p_vehicle_assisted_as_written,"
        "p_cvfh_corrected,p_cvfh_as_written\n";

    auto safely = [](auto fn) -> std::string {
        try {
            return fmt_num(fn());
        } catch (const DomainError&) {
            return "nan";
        }
    };

    for (const auto& pt : points) {
        AnalyticParams p = params_from_point(pt);
        for (const auto& k : keys) body += fmt_num(pt.at(k).get<double>()) + ",";
        double sep = -std::abs(p.v_cv_mps - p.v_nav_mps);
        body += fmt_num(latency_80211(p)) + "," + fmt_num(prob_80211(p)) + "," +
                fmt_num(t_wl(p)) + "," + fmt_num(t_ap(p)) + "," + fmt_num(t_cvfh(p)) +
                "," + fmt_num(success_prob_link(p.pe_vv, p.n_vv)) + "," +
                fmt_num(success_prob_link(p.pe_vi, p.n_vi)) + "," +
                fmt_num(prob_at_least_one_in_range(p)) + "," +
                fmt_num(p_double_prime_component(p)) + "," +
                safely([&] {
                    return prob_at_least_two_in_range(p, FormulaVariant::corrected, sep);
                }) +
                "," +
                safely([&] {
                    return prob_at_least_two_in_range(p, FormulaVariant::as_written, sep);
                }) +
                "," +
                safely([&] { return p_prime_component(p, FormulaVariant::corrected); }) +
                "," +
                safely([&] { return p_prime_component(p, FormulaVariant::as_written); }) +
                "," + safely([&] { return p_opposite(p, FormulaVariant::corrected); }) +
                "," + safely([&] { return p_opposite(p, FormulaVariant::as_written); }) +
                "," +
                safely([&] { return p_vehicle_assisted(p, FormulaVariant::corrected); }) +
                "," +
                safely([&] {
                    return p_vehicle_assisted(p, FormulaVariant::as_written);
                }) +
                "," + safely([&] { return p_cvfh(p, FormulaVariant::corrected); }) + "," +
                safely([&] { return p_cvfh(p, FormulaVariant::as_written); }) + "\n";
    }
    std::ofstream out(out_dir + "/analytic.csv", std::ios::binary);
    out << body;
    return 0;
}

// ---------------------------------------------------------------- fogroute

std::vector<mobility::Station> build_station_grid(std::size_t count, double width,
                                                  double height, double range) {
    std::vector<mobility::Station> out;
    std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(double(count))));
    std::size_t rows = (count + cols - 1) / cols;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t r = i / cols, c = i % cols;
        mobility::Station s;
        s.station_id = "fog_" + std::string(i < 10 ? "0" : "") + std::to_string(i);
        s.kind = "fog";
        s.pos.x = (c + 0.5) * width / static_cast<double>(cols);
        s.pos.y = (r + 0.5) * height / static_cast<double>(rows);
        s.range_m = range;
        out.push_back(s);
    }
    return out;
}

struct FogRouteSetup {
    fogroute::FogRouteScenarioConfig scenario;
    mobility::TraceSet traces;
};

FogRouteSetup prepare_fogroute(const json& config, std::uint64_t seed) {
    const json& fr = config.at("fogroute");
    FogRouteSetup setup;
    auto& sc = setup.scenario;
    sc.fog_range_m = fr.at("fog_range_m").get<double>();
    if (!fr.at("stations_file").get<std::string>().empty()) {
        sc.fog_servers = mobility::load_stations(fr.at("stations_file").get<std::string>());
    } else {
        sc.fog_servers = build_station_grid(fr.at("fog_server_count").get<std::size_t>(),
                                            fr.at("area_width_m").get<double>(),
                                            fr.at("area_height_m").get<double>(),
                                            sc.fog_range_m);
    }
    sc.content_count = fr.at("content_count").get<std::size_t>();
    sc.content_size_bytes = fr.at("content_size_mb").get<double>() * 1.0e6;
    sc.affordable_delay_s = fr.at("affordable_delay_h").get<double>() * 3600.0;
    sc.validation_time_s = fr.at("validation_time_s").get<double>();
    sc.uplink_bytes_per_s = fr.at("uplink_mb_per_s").get<double>() * 1.0e6;
    sc.hello_interval_s = fr.at("hello_interval_s").get<double>();
    sc.ordering = fr.at("ordering").get<std::string>() == "fifo"
                      ? fogroute::ContentOrdering::fifo
                      : fogroute::ContentOrdering::random;
    sc.fallback_enabled = fr.at("fallback_enabled").get<bool>();
    sc.warmup_s = fr.at("warmup_h").get<double>() * 3600.0;
    sc.horizon_s = fr.at("horizon_h").get<double>() * 3600.0;
    sc.seed_copies = fr.at("seed_copies").get<std::size_t>();
    sc.pickup_deadline_s = fr.at("pickup_deadline_h").get<double>() * 3600.0;
    sc.ack_timeout_s = fr.at("ack_timeout_h").get<double>() * 3600.0;
    sc.cloud_push_latency_s = fr.at("cloud_push_latency_s").get<double>();

    if (!fr.at("trace_file").get<std::string>().empty()) {
        setup.traces = mobility::load_trace(fr.at("trace_file").get<std::string>());
    } else {
        const json& gen = fr.at("generator");
        mobility::SyntheticTraceParams gp;
        gp.scheduled_devices = gen.at("scheduled_devices").get<std::size_t>();
        gp.non_scheduled_devices = gen.at("non_scheduled_devices").get<std::size_t>();
        gp.area_width_m = fr.at("area_width_m").get<double>();
        gp.area_height_m = fr.at("area_height_m").get<double>();
        gp.cadence_s = gen.at("cadence_s").get<double>();
        gp.duration_s = sc.warmup_s + sc.horizon_s;
        gp.speed_min_mps = kmh_to_mps(gen.at("speed_min_kmh").get<double>());
        gp.speed_max_mps = kmh_to_mps(gen.at("speed_max_kmh").get<double>());
        gp.loop_stations_min = gen.at("loop_stations_min").get<std::size_t>();
        gp.loop_stations_max = gen.at("loop_stations_max").get<std::size_t>();
        sim::RngStream rng(seed, "mobility");
        setup.traces = mobility::generate_synthetic_trace(gp, sc.fog_servers, rng);
    }
    return setup;
}

int run_fogroute_mode(const json& config, const std::string& out_dir) {
    std::uint64_t seed = config.at("seed").get<std::uint64_t>();
    FogRouteSetup setup = prepare_fogroute(config, seed);
    auto result = fogroute::run_fogroute(setup.scenario, setup.traces, seed);

    metrics::AllMetrics all;
    all.deliveries = result.deliveries;
    all.convergence = result.convergence;
    metrics::emit_report(all, metrics::ReportFormat::csv, out_dir);

    const json& fr = config.at("fogroute");
    bool include_fallback = fr.at("include_cloud_fallback").get<bool>();
    json summary;
    summary["stale_pairs"] = result.stale_pairs;
    summary["unresolved_pairs"] = result.unresolved_pairs;
    summary["counters"] = {{"hellos", result.counters.hellos},
                           {"requests", result.counters.requests},
                           {"accepts", result.counters.accepts},
                           {"declines", result.counters.declines},
                           {"acks", result.counters.acks},
                           {"dtn_deliveries", result.counters.dtn_deliveries},
                           {"direct_pushes", result.counters.direct_pushes}};
    json ratios = json::array();
    for (const auto& h : fr.at("expected_delays_h")) {
        double delay_s = h.get<double>() * 3600.0;
        json row;
        row["expected_delay_h"] = h;
        row["dtn_delivery_ratio"] =
            metrics::delivery_ratio(result.deliveries, delay_s, include_fallback);
        row["all_channel_ratio"] = metrics::delivery_ratio(result.deliveries, delay_s, true);
        ratios.push_back(row);
    }
    summary["delivery_ratio"] = ratios;
    // Rome-dataset reference points for the same delays; informational only
    summary["reference_delivery_ratio_percent"] = {{"2", 50}, {"6", 80}, {"8", 90},
                                                   {"10", 95}};
    auto conv = metrics::convergence_times(result.convergence);
    summary["convergence"] = {{"converged", conv.durations_s.size()},
                              {"unconverged", conv.unconverged}};
    if (!conv.durations_s.empty()) {
        summary["convergence"]["min_s"] = conv.durations_s.front();
        summary["convergence"]["max_s"] = conv.durations_s.back();
        summary["convergence"]["median_s"] =
            conv.durations_s[conv.durations_s.size() / 2];
    }
    std::ofstream out(out_dir + "/summary.json", std::ios::binary);
    out << summary.dump(2) << "\n";
    return 0;
}

// -------------------------------------------------------------------- cvfh

cvfh::CvfhScenarioConfig cvfh_config_from(const json& config) {
    const json& cv = config.at("cvfh");
    cvfh::CvfhScenarioConfig sc;
    sc.road_length_m = cv.at("road_length_m").get<double>();
    sc.ap_spacing_m = cv.at("ap_spacing_m").get<double>();
    sc.ap_range_m = cv.at("ap_range_m").get<double>();
    sc.cv_speed_mps = kmh_to_mps(cv.at("cv_speed_kmh").get<double>());
    sc.packet_rate_hz = cv.at("packet_rate_hz").get<double>();
    sc.packet_size_bits = cv.at("packet_size_bits").get<double>();
    sc.duration_s = cv.at("duration_s").get<double>();
    sc.flow.lambda_per_m = cv.at("lambda_per_m").get<double>();
    sc.flow.speed_min_mps = kmh_to_mps(cv.at("neighbor_speed_min_kmh").get<double>());
    sc.flow.speed_max_mps = kmh_to_mps(cv.at("neighbor_speed_max_kmh").get<double>());
    sc.flow.p_opposite = cv.at("p_opposite").get<double>();
    sc.radio.tx_power_dbm = cv.at("tx_power_dbm").get<double>();
    sc.radio.path_loss_exponent = cv.at("path_loss_exponent").get<double>();
    sc.radio.plr_constant_mode = cv.at("plr_mode").get<std::string>() == "constant";
    sc.radio.plr_constant = cv.at("plr_constant").get<double>();
    sc.radio.plr_floor = cv.at("plr_floor").get<double>();
    const json& tr = cv.at("trigger");
    sc.trigger.rssi_decline_window_s = tr.at("ti_s").get<double>();
    sc.trigger.plr_threshold = tr.at("plr_threshold").get<double>();
    sc.trigger.rssi_sample_interval_s = tr.at("rssi_sample_interval_s").get<double>();
    const json& li = cv.at("link");
    sc.link.n_vv = li.at("n_vv").get<unsigned>();
    sc.link.n_vi = li.at("n_vi").get<unsigned>();
    sc.link.n_80211 = li.at("n_80211").get<unsigned>();
    sc.link.t_pkt_vv_s = li.at("t_pkt_vv_ms").get<double>() / 1000.0;
    sc.link.t_pkt_vi_s = li.at("t_pkt_vi_ms").get<double>() / 1000.0;
    sc.link.t_auth_s = li.at("t_auth_ms").get<double>() / 1000.0;
    sc.link.t_asso_s = li.at("t_asso_ms").get<double>() / 1000.0;
    sc.link.pe_vv = li.at("pe_vv").get<double>();
    sc.link.pe_vi = li.at("pe_vi").get<double>();
    sc.link.retry_budget = li.at("retry_budget").get<unsigned>();
    sc.reply.base_delay_s = cv.at("reply_base_delay_ms").get<double>() / 1000.0;
    sc.retry_interval_s = cv.at("retry_interval_s").get<double>();
    return sc;
}

int run_cvfh_mode(const json& config, const std::string& out_dir) {
    std::uint64_t seed = config.at("seed").get<std::uint64_t>();
    cvfh::CvfhScenarioConfig sc = cvfh_config_from(config);

    auto cvfh_run = cvfh::run_cvfh_scenario(sc, metrics::HandoffScheme::cvfh, seed);
    auto base_run = cvfh::run_cvfh_scenario(sc, metrics::HandoffScheme::ieee80211, seed);

    metrics::AllMetrics all;
    all.handoffs = cvfh_run.handoffs;
    all.handoffs.insert(all.handoffs.end(), base_run.handoffs.begin(),
                        base_run.handoffs.end());
    all.throughput = {cvfh_run.throughput, base_run.throughput};
    metrics::emit_report(all, metrics::ReportFormat::csv, out_dir);

    json summary;
    auto stats = metrics::handoff_delay_stats(all.handoffs, metrics::HandoffGroupBy::speed);
    for (const auto& [speed, by_scheme] : stats) {
        for (const auto& [scheme, st] : by_scheme) {
            json row;
            row["speed_mps"] = speed;
            row["scheme"] = metrics::scheme_name(scheme);
            row["mean_delay_s"] = st.mean_s;
            row["stddev_s"] = st.stddev_s;
            row["successes"] = st.successes;
            row["failures"] = st.failures;
            summary["handoff"].push_back(row);
        }
    }
    auto tput = metrics::throughput(all.throughput, sc.duration_s);
    summary["throughput_bps"] = {
        {"cvfh", cvfh_run.throughput.bits_delivered / sc.duration_s},
        {"ieee80211", base_run.throughput.bits_delivered / sc.duration_s},
        {"aggregate", tput.aggregate_bps}};
    summary["associated_time_s"] = {{"cvfh", cvfh_run.associated_time_s},
                                    {"ieee80211", base_run.associated_time_s}};
    std::ofstream out(out_dir + "/summary.json", std::ios::binary);
    out << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json user;
    try {
        in >> user;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return validate_config(std::move(user));
}

json validate_config(json user) {
    json tmpl = default_config();
    validate_against(user, tmpl, "");
    if (!user.contains("mode")) throw ConfigError("config: missing required key /mode");
    std::string mode = user["mode"].get<std::string>();
    if (mode != "analytic" && mode != "sim_fogroute" && mode != "sim_cvfh") {
        throw ConfigError("config: /mode must be analytic, sim_fogroute or sim_cvfh");
    }
    if (user.contains("analytic") && user["analytic"].contains("grid")) {
        const json& allowed = tmpl["analytic"]["grid"];
        for (auto it = user["analytic"]["grid"].begin();
             it != user["analytic"]["grid"].end(); ++it) {
            if (!allowed.contains(it.key())) {
                throw ConfigError("config: unknown key /analytic/grid/" + it.key());
            }
            if (!it.value().is_array()) {  // scalar shorthand
                user["analytic"]["grid"][it.key()] = json::array({it.value()});
            }
        }
    }
    merge_defaults(user, tmpl);
    if (user["schema_version"].get<int>() != 1) {
        throw ConfigError("config: unsupported schema_version");
    }
    return user;
}

void apply_override(json& config, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--set expects key.path=value, got: " + assignment);
    }
    std::string key = assignment.substr(0, eq);
    std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;  // plain string
    }
    json* node = &config;
    std::size_t start = 0;
    while (true) {
        auto dot = key.find('.', start);
        std::string part = key.substr(start, dot - start);
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

int run_resolved(const json& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    {
        std::ofstream echo(out_dir + "/resolved_config.json", std::ios::binary);
        echo << config.dump(2) << "\n";
    }
    std::string mode = config.at("mode").get<std::string>();
    if (mode == "analytic") return run_analytic(config, out_dir);
    if (mode == "sim_fogroute") return run_fogroute_mode(config, out_dir);
    return run_cvfh_mode(config, out_dir);
}

int run(const RunOptions& options) {
    try {
        json config = load_config(options.config_path);
        for (const auto& ov : options.overrides) apply_override(config, ov);
        if (options.seed >= 0) config["seed"] = options.seed;
        if (!options.variant.empty()) config["analytic"]["variant"] = options.variant;
        config = validate_config(std::move(config));
        std::string out_dir = options.out_dir.empty()
                                  ? config.at("output_dir").get<std::string>()
                                  : options.out_dir;
        config["output_dir"] = out_dir;
        return run_resolved(config, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int sweep(const RunOptions& options, const std::string& axis,
          const std::vector<std::string>& values) {
    try {
        if (values.empty()) throw ConfigError("sweep: empty value list");
        json base = load_config(options.config_path);
        for (const auto& ov : options.overrides) apply_override(base, ov);
        if (options.seed >= 0) base["seed"] = options.seed;
        if (!options.variant.empty()) base["analytic"]["variant"] = options.variant;
        base = validate_config(std::move(base));
        std::string out_root = options.out_dir.empty()
                                   ? base.at("output_dir").get<std::string>()
                                   : options.out_dir;
        fs::create_directories(out_root);

        std::string merged = "index," + axis + ",run_dir\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            json cfg = base;
            apply_override(cfg, axis + "=" + values[i]);
            cfg["seed"] = base["seed"].get<std::uint64_t>() ^ static_cast<std::uint64_t>(i);
            cfg = validate_config(std::move(cfg));
            std::string run_dir = out_root + "/sweep_" + std::to_string(i);
            cfg["output_dir"] = run_dir;
            int rc = run_resolved(cfg, run_dir);
            if (rc != 0) return rc;
            merged += std::to_string(i) + "," + values[i] + ",sweep_" +
                      std::to_string(i) + "\n";
        }
        std::ofstream out(out_root + "/sweep_summary.csv", std::ios::binary);
        out << merged;
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace vfcsim::cli

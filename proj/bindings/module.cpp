// Python bindings for the simulator core: closed-form handoff analytics with
// their Monte-Carlo cross-check, carrier selection, the highway handoff
// scenario, and the config-driven scenario runner.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "vfcsim/analytics/model.hpp"
#include "vfcsim/analytics/monte_carlo.hpp"
#include "vfcsim/cli/runner.hpp"
#include "vfcsim/cvfh/handoff_sim.hpp"
#include "vfcsim/fogroute/protocol.hpp"
#include "vfcsim/metrics/metrics.hpp"
#include "vfcsim/sim/rng.hpp"

namespace py = pybind11;
using namespace vfcsim;

PYBIND11_MODULE(pyvfcsim, m) {
    m.doc() = "vehicular fog computing simulator: analytics, carrier selection, "
              "handoff scenarios, and config-driven runs";

    // ------------------------------------------------------------ analytics
    py::enum_<analytics::FormulaVariant>(m, "FormulaVariant")
        .value("as_written", analytics::FormulaVariant::as_written)
        .value("corrected", analytics::FormulaVariant::corrected);

    py::enum_<analytics::HandoffFormula>(m, "HandoffFormula")
        .value("at_least_two_in_range", analytics::HandoffFormula::at_least_two_in_range)
        .value("at_least_one_in_range", analytics::HandoffFormula::at_least_one_in_range)
        .value("link_vv", analytics::HandoffFormula::link_vv)
        .value("link_vi", analytics::HandoffFormula::link_vi)
        .value("same_dir_slower", analytics::HandoffFormula::same_dir_slower)
        .value("same_dir_faster", analytics::HandoffFormula::same_dir_faster)
        .value("opposite", analytics::HandoffFormula::opposite)
        .value("vehicle_assisted", analytics::HandoffFormula::vehicle_assisted)
        .value("cvfh", analytics::HandoffFormula::cvfh);

    py::class_<analytics::AnalyticParams>(m, "AnalyticParams")
        .def(py::init<>())
        .def_readwrite("lambda_per_m", &analytics::AnalyticParams::lambda_per_m)
        .def_readwrite("range_m", &analytics::AnalyticParams::range_m)
        .def_readwrite("v_cv_mps", &analytics::AnalyticParams::v_cv_mps)
        .def_readwrite("v_nav_mps", &analytics::AnalyticParams::v_nav_mps)
        .def_readwrite("t_pkt_vv_s", &analytics::AnalyticParams::t_pkt_vv_s)
        .def_readwrite("t_pkt_vi_s", &analytics::AnalyticParams::t_pkt_vi_s)
        .def_readwrite("n_vv", &analytics::AnalyticParams::n_vv)
        .def_readwrite("n_vi", &analytics::AnalyticParams::n_vi)
        .def_readwrite("n_80211", &analytics::AnalyticParams::n_80211)
        .def_readwrite("pe_vv", &analytics::AnalyticParams::pe_vv)
        .def_readwrite("pe_vi", &analytics::AnalyticParams::pe_vi)
        .def_readwrite("t_auth_s", &analytics::AnalyticParams::t_auth_s)
        .def_readwrite("t_asso_s", &analytics::AnalyticParams::t_asso_s)
        .def_readwrite("p_opposite", &analytics::AnalyticParams::p_opposite)
        .def_readwrite("p_slower", &analytics::AnalyticParams::p_slower)
        .def_readwrite("p_ap_neighbor", &analytics::AnalyticParams::p_ap_neighbor);

    py::register_exception<analytics::DomainError>(m, "DomainError");
    py::register_exception<analytics::WrongScenarioError>(m, "WrongScenarioError");

    m.def("latency_80211", &analytics::latency_80211);
    m.def("prob_80211", &analytics::prob_80211);
    m.def("poisson_pmf", &analytics::poisson_pmf);
    m.def("t_wl", &analytics::t_wl);
    m.def("t_ap", &analytics::t_ap);
    m.def("t_cvfh", &analytics::t_cvfh);
    m.def("prob_at_least_two_in_range", &analytics::prob_at_least_two_in_range);
    m.def("prob_at_least_one_in_range", &analytics::prob_at_least_one_in_range);
    m.def("success_prob_link", &analytics::success_prob_link);
    m.def("p_same_dir_slower", &analytics::p_same_dir_slower);
    m.def("p_same_dir_faster", &analytics::p_same_dir_faster);
    m.def("p_opposite", &analytics::p_opposite);
    m.def("p_vehicle_assisted", &analytics::p_vehicle_assisted);
    m.def("p_cvfh", &analytics::p_cvfh);

    m.def(
        "monte_carlo_handoff",
        [](const analytics::AnalyticParams& p, analytics::HandoffFormula formula,
           std::uint64_t trials, std::uint64_t seed) {
            sim::RngStream rng(seed, "py.mc");
            auto est = analytics::monte_carlo_handoff(p, formula, trials, rng);
            return py::make_tuple(est.probability, est.std_error, est.trials);
        },
        py::arg("params"), py::arg("formula"), py::arg("trials"), py::arg("seed"),
        "returns (probability, std_error, trials)");

    // ------------------------------------------------------ carrier selection
    py::class_<fogroute::CarrierCandidate>(m, "CarrierCandidate")
        .def(py::init<>())
        .def_readwrite("device_id", &fogroute::CarrierCandidate::device_id)
        .def_readwrite("scheduled", &fogroute::CarrierCandidate::scheduled)
        .def_readwrite("contact_frequency", &fogroute::CarrierCandidate::contact_frequency)
        .def_readwrite("delivery_time_s", &fogroute::CarrierCandidate::delivery_time_s)
        .def_readwrite("connection_time_s", &fogroute::CarrierCandidate::connection_time_s)
        .def_readwrite("upload_time_s", &fogroute::CarrierCandidate::upload_time_s);

    py::register_exception<fogroute::EmptyAssignmentError>(m, "EmptyAssignmentError");

    m.def(
        "select_carriers",
        [](const std::vector<fogroute::CarrierCandidate>& candidates,
           double affordable_delay_s) {
            auto a = fogroute::select_carriers(candidates, affordable_delay_s, "", "");
            return py::make_tuple(a.scheduled, a.non_scheduled);
        },
        py::arg("candidates"), py::arg("affordable_delay_s"),
        "returns (scheduled_ids, non_scheduled_ids)");

    m.def("delivery_probability", &fogroute::delivery_probability, py::arg("index"),
          py::arg("candidates"));

    // --------------------------------------------------------- cvfh scenario
    m.def(
        "run_cvfh_scenario",
        [](double speed_mps, double packet_rate_hz, double duration_s,
           const std::string& scheme, std::uint64_t seed) {
            cvfh::CvfhScenarioConfig cfg;
            cfg.cv_speed_mps = speed_mps;
            cfg.packet_rate_hz = packet_rate_hz;
            cfg.duration_s = duration_s;
            auto s = scheme == "cvfh" ? metrics::HandoffScheme::cvfh
                                      : metrics::HandoffScheme::ieee80211;
            auto r = cvfh::run_cvfh_scenario(cfg, s, seed);
            py::list handoffs;
            for (const auto& h : r.handoffs) {
                py::dict d;
                d["trigger_time"] = h.trigger_time;
                d["delay_s"] = h.delay_s();
                d["success"] = h.success;
                d["auth_asso_time_s"] = h.auth_asso_time_s;
                handoffs.append(d);
            }
            py::dict out;
            out["handoffs"] = handoffs;
            out["bits_delivered"] = r.throughput.bits_delivered;
            out["throughput_bps"] = r.throughput.bits_delivered / duration_s;
            out["associated_time_s"] = r.associated_time_s;
            return out;
        },
        py::arg("speed_mps"), py::arg("packet_rate_hz"), py::arg("duration_s"),
        py::arg("scheme"), py::arg("seed"),
        "runs the circular-highway handoff scenario; scheme is 'cvfh' or 'ieee80211'");

    // ------------------------------------------------------ config-driven run
    py::register_exception<cli::ConfigError>(m, "ConfigError");

    m.def(
        "run_config",
        [](const std::string& config_json, const std::string& out_dir) {
            cli::json cfg = cli::json::parse(config_json);
            return cli::run_resolved(cli::validate_config(std::move(cfg)), out_dir);
        },
        py::arg("config_json"), py::arg("out_dir"),
        "validates a JSON config string and runs it into out_dir; returns exit code");

    m.def(
        "validate_config",
        [](const std::string& config_json) {
            return cli::validate_config(cli::json::parse(config_json)).dump(2);
        },
        py::arg("config_json"),
        "returns the validated config with defaults merged, as a JSON string");
}

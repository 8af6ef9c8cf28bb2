#pragma once

#include <cstdint>
#include <stdexcept>

#include "vfcsim/sim/rng.hpp"

namespace vfcsim::analytics {

struct AnalyticParams {
    double lambda_per_m = 0.0;  // vehicle density
    double range_m = 0.0;       // R
    double v_cv_mps = 0.0;
    double v_nav_mps = 0.0;
    double t_pkt_vv_s = 0.0;
    double t_pkt_vi_s = 0.0;
    unsigned n_vv = 0;
    unsigned n_vi = 0;
    unsigned n_80211 = 0;
    double pe_vv = 0.0;
    double pe_vi = 0.0;
    double t_auth_s = 0.0;
    double t_asso_s = 0.0;
    double p_opposite = 0.0;     // P_0
    double p_slower = 0.0;       // P_1, prob speed difference < 0 given same direction
    double p_ap_neighbor = 0.0;  // P_AP
};

// as_written reproduces the printed formulas (leading R*lambda coefficient in
// the two-in-range tails, and the bare P'''_{V-I} first term of the blend);
// corrected is the internally consistent Poisson form.
enum class FormulaVariant { as_written, corrected };

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double latency_80211(const AnalyticParams& p);
double prob_80211(const AnalyticParams& p);

// mu^k e^{-mu} / k!, log-space beyond k = 20
double poisson_pmf(std::uint64_t k, double mu);

// total wireless exchange time: N_vv * T_vv + N_vi * T_vi
double t_wl(const AnalyticParams& p);

// P(X > 1) on the shrunk interval L = R - dV * T_wl
double prob_at_least_two_in_range(const AnalyticParams& p, FormulaVariant variant,
                                  double delta_v_mps);
// printed tail on the full interval R (the prose says "at least one")
double prob_at_least_one_in_range(const AnalyticParams& p);

double success_prob_link(double pe, unsigned n);

// same direction, CV slower (distance to NAV grows)
double p_same_dir_slower(const AnalyticParams& p, FormulaVariant variant);
// same direction, CV faster (closing in)
double p_same_dir_faster(const AnalyticParams& p);
// opposite directions, closing speed V_CV + V_NAV
double p_opposite(const AnalyticParams& p, FormulaVariant variant);

// factor products without the scenario gate, for blended evaluation and
// tabulation: the slower case separates at |V_CV - V_NAV|
double p_prime_component(const AnalyticParams& p, FormulaVariant variant);
double p_double_prime_component(const AnalyticParams& p);

// direction-weighted vehicle-assisted handoff probability
double p_vehicle_assisted(const AnalyticParams& p, FormulaVariant variant);
// blend with the direct-AP case
double p_cvfh(const AnalyticParams& p, FormulaVariant variant);
double t_ap(const AnalyticParams& p);
double t_cvfh(const AnalyticParams& p);

}  // namespace vfcsim::analytics

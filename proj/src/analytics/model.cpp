#include "vfcsim/analytics/model.hpp"

#include <cmath>

namespace vfcsim::analytics {

double latency_80211(const AnalyticParams& p) {
    return p.n_80211 * p.t_pkt_vi_s + p.t_auth_s + p.t_asso_s;
}

double prob_80211(const AnalyticParams& p) {
    return success_prob_link(p.pe_vi, p.n_80211);
}

double poisson_pmf(std::uint64_t k, double mu) {
    if (mu < 0.0) throw DomainError("poisson_pmf: negative mean");
    if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
    if (k <= 20) {
        double fact = 1.0;
        for (std::uint64_t i = 2; i <= k; ++i) fact *= static_cast<double>(i);
        return std::pow(mu, static_cast<double>(k)) * std::exp(-mu) / fact;
    }
    double log_p = static_cast<double>(k) * std::log(mu) - mu -
                   std::lgamma(static_cast<double>(k) + 1.0);
    return std::exp(log_p);
}

double t_wl(const AnalyticParams& p) {
    return p.n_vv * p.t_pkt_vv_s + p.n_vi * p.t_pkt_vi_s;
}

double prob_at_least_two_in_range(const AnalyticParams& p, FormulaVariant variant,
                                  double delta_v_mps) {
    double L = p.range_m - delta_v_mps * t_wl(p);
    if (L < 0.0) throw DomainError("prob_at_least_two_in_range: effective length < 0");
    double mu = L * p.lambda_per_m;
    double coeff = variant == FormulaVariant::as_written ? p.range_m * p.lambda_per_m : mu;
    return 1.0 - coeff * std::exp(-mu) - std::exp(-mu);
}

double prob_at_least_one_in_range(const AnalyticParams& p) {
    double mu = p.range_m * p.lambda_per_m;
    return 1.0 - mu * std::exp(-mu) - std::exp(-mu);
}

double success_prob_link(double pe, unsigned n) {
    if (pe < 0.0 || pe > 1.0) throw DomainError("success_prob_link: pe outside [0,1]");
    return std::pow(1.0 - pe, static_cast<double>(n));
}

namespace {

// factor math shared by the scenario-gated entry points and the blended form
double p_triple_prime_vi(const AnalyticParams& p, FormulaVariant variant) {
    return prob_at_least_two_in_range(p, variant, p.v_cv_mps + p.v_nav_mps);
}

double p_triple_prime_factors(const AnalyticParams& p, FormulaVariant variant) {
    return prob_at_least_one_in_range(p) * p_triple_prime_vi(p, variant) *
           success_prob_link(p.pe_vv, p.n_vv) * success_prob_link(p.pe_vi, p.n_vi);
}

}  // namespace

double p_prime_component(const AnalyticParams& p, FormulaVariant variant) {
    double dv = -std::abs(p.v_cv_mps - p.v_nav_mps);  // separating pair
    return prob_at_least_two_in_range(p, variant, dv) *
           success_prob_link(p.pe_vv, p.n_vv) * success_prob_link(p.pe_vi, p.n_vi);
}

double p_double_prime_component(const AnalyticParams& p) {
    return prob_at_least_one_in_range(p) * success_prob_link(p.pe_vv, p.n_vv) *
           success_prob_link(p.pe_vi, p.n_vi);
}

double p_same_dir_slower(const AnalyticParams& p, FormulaVariant variant) {
    if (p.v_cv_mps - p.v_nav_mps >= 0.0) {
        throw WrongScenarioError("p_same_dir_slower: requires V_CV < V_NAV");
    }
    return p_prime_component(p, variant);
}

double p_same_dir_faster(const AnalyticParams& p) {
    if (p.v_cv_mps - p.v_nav_mps <= 0.0) {
        throw WrongScenarioError("p_same_dir_faster: requires V_CV > V_NAV");
    }
    return p_double_prime_component(p);
}

double p_opposite(const AnalyticParams& p, FormulaVariant variant) {
    return p_triple_prime_factors(p, variant);
}

double p_vehicle_assisted(const AnalyticParams& p, FormulaVariant variant) {
    double opposite_term = variant == FormulaVariant::as_written
                               ? p_triple_prime_vi(p, variant)
                               : p_triple_prime_factors(p, variant);
    double same_dir = p.p_slower * p_prime_component(p, variant) +
                      (1.0 - p.p_slower) * p_double_prime_component(p);
    return p.p_opposite * opposite_term + (1.0 - p.p_opposite) * same_dir;
}

double p_cvfh(const AnalyticParams& p, FormulaVariant variant) {
    return p.p_ap_neighbor * success_prob_link(p.pe_vi, p.n_vi) +
           (1.0 - p.p_ap_neighbor) * p_vehicle_assisted(p, variant);
}

double t_ap(const AnalyticParams& p) { return p.n_vi * p.t_pkt_vi_s; }

double t_cvfh(const AnalyticParams& p) {
    return p.p_ap_neighbor * t_ap(p) + (1.0 - p.p_ap_neighbor) * t_wl(p);
}

}  // namespace vfcsim::analytics

#include "vfcsim/analytics/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>

namespace vfcsim::analytics {

namespace {

bool trial_at_least_two(sim::RngStream& rng, double mu) {
    return rng.poisson(mu) >= 2;
}

bool trial_link(sim::RngStream& rng, double pe, unsigned n) {
    for (unsigned i = 0; i < n; ++i) {
        if (rng.bernoulli(pe)) return false;
    }
    return true;
}

bool trial_same_dir_slower(const AnalyticParams& p, sim::RngStream& rng) {
    double dv = -std::abs(p.v_cv_mps - p.v_nav_mps);
    double L = p.range_m - dv * t_wl(p);
    return trial_at_least_two(rng, L * p.lambda_per_m) &&
           trial_link(rng, p.pe_vv, p.n_vv) && trial_link(rng, p.pe_vi, p.n_vi);
}

bool trial_same_dir_faster(const AnalyticParams& p, sim::RngStream& rng) {
    return trial_at_least_two(rng, p.range_m * p.lambda_per_m) &&
           trial_link(rng, p.pe_vv, p.n_vv) && trial_link(rng, p.pe_vi, p.n_vi);
}

bool trial_opposite(const AnalyticParams& p, sim::RngStream& rng) {
    double L = p.range_m - (p.v_cv_mps + p.v_nav_mps) * t_wl(p);
    if (L < 0.0) throw DomainError("monte_carlo_handoff: effective length < 0");
    return trial_at_least_two(rng, p.range_m * p.lambda_per_m) &&
           trial_at_least_two(rng, L * p.lambda_per_m) &&
           trial_link(rng, p.pe_vv, p.n_vv) && trial_link(rng, p.pe_vi, p.n_vi);
}

bool trial_vehicle_assisted(const AnalyticParams& p, sim::RngStream& rng) {
    if (rng.bernoulli(p.p_opposite)) return trial_opposite(p, rng);
    if (rng.bernoulli(p.p_slower)) return trial_same_dir_slower(p, rng);
    return trial_same_dir_faster(p, rng);
}

bool trial_cvfh(const AnalyticParams& p, sim::RngStream& rng) {
    if (rng.bernoulli(p.p_ap_neighbor)) return trial_link(rng, p.pe_vi, p.n_vi);
    return trial_vehicle_assisted(p, rng);
}

}  // namespace

MonteCarloEstimate monte_carlo_handoff(const AnalyticParams& p, HandoffFormula formula,
                                       std::uint64_t trials, sim::RngStream& rng) {
    if (trials < 10000) {
        throw std::invalid_argument("monte_carlo_handoff: trials must be >= 10^4");
    }
    std::uint64_t successes = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        bool ok = false;
        switch (formula) {
            case HandoffFormula::at_least_two_in_range: {
                double dv = -std::abs(p.v_cv_mps - p.v_nav_mps);
                double L = p.range_m - dv * t_wl(p);
                ok = trial_at_least_two(rng, L * p.lambda_per_m);
                break;
            }
            case HandoffFormula::at_least_one_in_range:
                ok = trial_at_least_two(rng, p.range_m * p.lambda_per_m);
                break;
            case HandoffFormula::link_vv:
                ok = trial_link(rng, p.pe_vv, p.n_vv);
                break;
            case HandoffFormula::link_vi:
                ok = trial_link(rng, p.pe_vi, p.n_vi);
                break;
            case HandoffFormula::same_dir_slower:
                ok = trial_same_dir_slower(p, rng);
                break;
            case HandoffFormula::same_dir_faster:
                ok = trial_same_dir_faster(p, rng);
                break;
            case HandoffFormula::opposite:
                ok = trial_opposite(p, rng);
                break;
            case HandoffFormula::vehicle_assisted:
                ok = trial_vehicle_assisted(p, rng);
                break;
            case HandoffFormula::cvfh:
                ok = trial_cvfh(p, rng);
                break;
        }
        if (ok) ++successes;
    }
    MonteCarloEstimate est;
    est.trials = trials;
    est.probability = static_cast<double>(successes) / static_cast<double>(trials);
    est.std_error =
        std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(trials));
    return est;
}

}  // namespace vfcsim::analytics

#pragma once

#include <cstdint>

#include "vfcsim/analytics/model.hpp"
#include "vfcsim/sim/rng.hpp"

namespace vfcsim::analytics {

struct MonteCarloEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

// Which closed form the sampler checks. Each trial draws the Poisson vehicle
// counts and Bernoulli packet outcomes that the corresponding formula
// marginalizes over.
enum class HandoffFormula {
    at_least_two_in_range,   // tail on L = R - dV * T_wl, separating pair
    at_least_one_in_range,   // printed tail on R
    link_vv,
    link_vi,
    same_dir_slower,         // P'
    same_dir_faster,         // P''
    opposite,                // P'''
    vehicle_assisted,        // direction-weighted blend (corrected composition)
    cvfh,                    // blend with the direct-AP case
};

MonteCarloEstimate monte_carlo_handoff(const AnalyticParams& p, HandoffFormula formula,
                                       std::uint64_t trials, sim::RngStream& rng);

}  // namespace vfcsim::analytics

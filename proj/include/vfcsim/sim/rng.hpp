#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace vfcsim::sim {

// Counter-based generator (splitmix64 core). std:: distributions are not
// bit-reproducible across standard libraries, so all sampling is done here.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view stream_id)
        : state_(mix(seed ^ fnv1a(stream_id))), stream_id_(stream_id) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        // rejection to avoid modulo bias
        std::uint64_t limit = ~0ull - ~0ull % n;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    // Knuth multiplication in chunks; exact enough for the means used here.
    std::uint64_t poisson(double mu) {
        std::uint64_t k = 0;
        while (mu > 0.0) {
            double chunk = mu > 500.0 ? 500.0 : mu;
            double limit = std::exp(-chunk);
            double p = 1.0;
            std::uint64_t kc = 0;
            do {
                ++kc;
                p *= uniform();
            } while (p > limit);
            k += kc - 1;
            mu -= chunk;
        }
        return k;
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // Box-Muller, one value per call (cache unused half for determinism simplicity)
        if (has_cached_) {
            has_cached_ = false;
            return mean + stddev * cached_;
        }
        double u1, u2;
        do { u1 = uniform(); } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(6.283185307179586477 * u2);
        has_cached_ = true;
        return mean + stddev * r * std::cos(6.283185307179586477 * u2);
    }

    const std::string& stream_id() const { return stream_id_; }

private:
    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
        return z ^ (z >> 33);
    }

    std::uint64_t state_;
    std::string stream_id_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace vfcsim::sim

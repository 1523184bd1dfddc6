#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stylelab {

// Deterministic RNG. mt19937_64 output is pinned by the standard; the
// uniform/normal conversions are done by hand because the std::*_distribution
// algorithms are implementation-defined and would break byte-identical reruns
// across standard libraries.
class Rng {
 public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n >= 1. Multiply-shift; bias is O(n/2^64).
    uint64_t uniform_int(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(engine_()) * n) >> 64);
    }

    // Standard normal via Box-Muller, one spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Derives an independent stream (e.g. dataset selection vs. training).
    Rng fork(uint64_t salt) const {
        std::mt19937_64 probe = engine_;
        return Rng(probe() ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    }

 private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stylelab

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>

namespace driftnet {

/** Deterministic random source for a whole run.
 *
 * One mt19937_64 stream, consumed in simulation phase order.  All
 * distributions are derived here as stateless per-call transforms, so the
 * engine state is exactly the mt19937_64 state and snapshots can restore
 * the stream mid-run.  Draws with probability 0 or 1 short-circuit without
 * touching the stream, which keeps frozen-dynamics runs byte-stable.
 */
class Rng {
public:
    Rng() : eng_(0) {}
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // (0, 1], safe as a log argument
    double uniform_open() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return uniform() < p;
    }

    // unbiased integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // Box-Muller; consumes exactly two variates, no cached spare
    double normal(double mean = 0.0, double sd = 1.0) {
        if (sd <= 0.0) return mean;
        const double u1 = uniform_open();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(2.0 * std::numbers::pi * u2);
    }

    double lognormal(double mean_log, double sd_log) {
        return std::exp(normal(mean_log, sd_log));
    }

    // Knuth in log space; O(mean) draws
    std::int64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double threshold = -mean;
        double acc = 0.0;
        std::int64_t k = 0;
        for (;;) {
            acc += std::log(uniform_open());
            if (acc < threshold) return k;
            ++k;
        }
    }

    // trials until first success, support {1, 2, ...}, mean 1/p
    std::int64_t geometric(double p) {
        if (p >= 1.0) return 1;
        if (p <= 0.0) return INT64_MAX;
        const double u = uniform_open();
        return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p))) + 1;
    }

    std::string save() const {
        std::ostringstream os;
        os << eng_;
        return os.str();
    }

    void restore(const std::string& text) {
        std::istringstream is(text);
        is >> eng_;
        if (is.fail()) throw std::runtime_error("rng: malformed state string");
    }

    bool operator==(const Rng& o) const { return eng_ == o.eng_; }

private:
    std::mt19937_64 eng_;
};

} // namespace driftnet

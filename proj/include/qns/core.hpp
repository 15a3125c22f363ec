#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string>
#include <string_view>

namespace qns {

using ComponentId = std::uint32_t;
using DemandId = std::uint64_t;
using PgtId = std::uint64_t;

// All schedule arithmetic is done in integer nanoseconds to keep overlap
// and minsep comparisons exact.
using Nanos = std::int64_t;

constexpr double kNanosPerSecond = 1e9;

inline Nanos seconds_to_nanos(double s) {
    return static_cast<Nanos>(std::llround(s * kNanosPerSecond));
}

inline double nanos_to_seconds(Nanos ns) {
    return static_cast<double>(ns) / kNanosPerSecond;
}

// Seeded random stream. One master seed is split into named streams so that
// toggling a feature (e.g. disabling the bonus phase) does not shift the
// draws of unrelated parts of a run.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit mantissa in [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_int(std::uint64_t n) {
        // n == 0 would be a caller bug
        return engine_() % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean, double stddev) {
        if (stddev <= 0.0) return mean;
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mean + stddev * r * std::cos(a);
    }

    double exponential(double mean) {
        double u = uniform();
        while (u <= 1e-300) u = uniform();
        return -mean * std::log(u);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a based stream splitting: stream(seed, "traffic") etc.
inline std::uint64_t split_seed(std::uint64_t master, std::string_view name) {
    std::uint64_t h = 1469598103934665603ull ^ master;
    for (char c : name) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 1099511628211ull;
    }
    h ^= master >> 32;
    h *= 1099511628211ull;
    return h;
}

inline RngStream make_stream(std::uint64_t master, std::string_view name) {
    return RngStream(split_seed(master, name));
}

} // namespace qns

#pragma once

#include "qns/sim.hpp"

namespace qns {

struct BenchPoint {
    double x = 0;
    double mean_s = 0;
    double std_s = 0;
    int repeats = 0;
};

// random (active set, intake) pairs on a small random topology; times one
// admit_tasks call per repeat (first warmup repeats discarded)
std::vector<BenchPoint> bench_admit_sweep_k(const std::vector<int>& k_values,
                                            int n_active, int repeats,
                                            std::uint64_t seed);
std::vector<BenchPoint> bench_admit_sweep_n(const std::vector<int>& n_values,
                                            int k_incoming, int repeats,
                                            std::uint64_t seed);

// single timed admit round, exposed for the headline latency check
double bench_admit_once(int n_active, int k_incoming, int repeats, std::uint64_t seed,
                        double* std_out = nullptr);

struct ScheduleBenchPoint {
    int n = 0;
    int repeats = 0;
    double minimal_mean_s = 0, minimal_std_s = 0;
    double bonus_mean_s = 0, bonus_std_s = 0;
    double total_mean_s = 0;
    std::uint64_t bonus_pgas = 0;
};

// The stress sweep: one shared-path class, first task minsep 200 s, all
// durations 1 s, all allocations 20, interval 8000 s.
std::vector<ScheduleBenchPoint> bench_schedule_sweep(int n_min, int n_max, int n_step,
                                                     int repeats, std::uint64_t seed);

struct PolyFit {
    std::vector<double> coefficients; // lowest degree first
    double r_squared = 0;
};

// least squares polynomial fit (x values normalized internally)
PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree);

// interior local maximum of the bonus means (3-point smoothed); returns the
// N of the highest-valued interior peak, or -1 when the curve has none
int bonus_local_max_n(const std::vector<ScheduleBenchPoint>& points);
// first N with zero bonus PGAs, or -1
int bonus_zero_n(const std::vector<ScheduleBenchPoint>& points);

std::string bench_points_to_csv(const std::string& phase,
                                const std::vector<BenchPoint>& points);
std::string schedule_bench_to_csv(const std::vector<ScheduleBenchPoint>& points);

} // namespace qns

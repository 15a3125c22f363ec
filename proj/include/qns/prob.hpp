#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace qns {

// log of C(n,k) p^k q^(n-k), safe for large n
double log_binomial_pmf(std::uint64_t k, std::uint64_t n, double p);
double binomial_pmf(std::uint64_t k, std::uint64_t n, double p);

// P[X <= k] for X ~ Binomial(n, p)
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

// P[X < threshold]; 0 when threshold == 0
double binomial_tail_below(std::uint64_t threshold, std::uint64_t n, double p);

struct InvalidWindow : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Probability model for "some window of u consecutive attempts out of m
// holds >= s successes", attempts Bernoulli(p).
//
// s == 1 and u >= m are exact. Otherwise a two-block scan-statistics
// approximation in the style of the Naus product method is used:
//   P(no hit over m) ~= Q1 * (Q2/Q1)^((m-u)/u)
// where Q1 is the exact one-window miss probability and Q2 the exact
// two-block (2u trials) miss probability, computed by a hypergeometric
// sweep over the window boundary in O(u s^2).
class ScanModel {
public:
    ScanModel(std::uint64_t window, std::uint32_t pairs, double p_attempt);

    double eval(std::uint64_t attempts) const;

    // smallest m <= m_max with eval(m) >= target
    std::optional<std::uint64_t> min_attempts(double target, std::uint64_t m_max) const;

    std::uint64_t window() const { return window_; }

private:
    std::uint64_t window_;
    std::uint32_t pairs_;
    double p_;
    double q1_ = 1.0;         // one-window miss probability
    double block_ratio_ = 1.0; // per-block miss decay Q2/Q1
};

// exact P(no u-window among 2u trials reaches s successes), s >= 2
double two_block_miss_probability(std::uint64_t u, std::uint32_t s, double p);

// Probability that some window of length window_s inside a block of
// duration pga_duration_s contains at least `pairs` successes, with
// successes arriving as Bernoulli attempts of period attempt_period_s and
// per-attempt probability rate*attempt_period_s. Throws InvalidWindow when
// the window exceeds the block.
double packet_success_probability(double rate, double window_s, std::uint32_t pairs,
                                  double pga_duration_s, double attempt_period_s);

// Smallest integer allocation l >= 1 such that the certified tail bound
// P[Binomial(l*n_si, p) < n_inst] < epsilon holds, via Hoeffding's
// inequality (exact handling of the deterministic p == 1 case). nullopt when
// no l up to the ceiling certifies the bound.
std::optional<std::uint32_t> minimal_allocation(double p_packet, std::uint32_t n_inst,
                                                std::uint32_t n_si, double epsilon,
                                                std::uint32_t ceiling = 1000000);

} // namespace qns

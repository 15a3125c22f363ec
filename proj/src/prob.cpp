#include "qns/prob.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qns {

double log_binomial_pmf(std::uint64_t k, std::uint64_t n, double p) {
    if (k > n) return -INFINITY;
    if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
    if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
    double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                std::lgamma(static_cast<double>(k) + 1.0) -
                std::lgamma(static_cast<double>(n - k) + 1.0);
    return lc + static_cast<double>(k) * std::log(p) +
           static_cast<double>(n - k) * std::log1p(-p);
}

double binomial_pmf(std::uint64_t k, std::uint64_t n, double p) {
    return std::exp(log_binomial_pmf(k, n, p));
}

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p) {
    if (k >= n) return 1.0;
    double sum = 0.0;
    for (std::uint64_t i = 0; i <= k; ++i) sum += binomial_pmf(i, n, p);
    return std::min(sum, 1.0);
}

double binomial_tail_below(std::uint64_t threshold, std::uint64_t n, double p) {
    if (threshold == 0) return 0.0;
    return binomial_cdf(threshold - 1, n, p);
}

double two_block_miss_probability(std::uint64_t u, std::uint32_t s, double p) {
    // Sweep the window across the block boundary. State (r, w): r successes
    // of block one not yet passed by the window's left edge, w successes in
    // the revealed prefix of block two; every intermediate window holds
    // r + w successes and must stay below s.
    const std::uint32_t k = s - 1;
    const std::size_t side = k + 1;
    std::vector<double> cur(side * side, 0.0), next(side * side, 0.0);
    auto at = [side](std::vector<double>& v, std::uint32_t r, std::uint32_t w) -> double& {
        return v[r * side + w];
    };
    for (std::uint32_t t = 0; t <= k; ++t)
        at(cur, t, 0) = binomial_pmf(t, u, p);

    for (std::uint64_t j = 0; j < u; ++j) {
        std::fill(next.begin(), next.end(), 0.0);
        const double rem = static_cast<double>(u - j);
        for (std::uint32_t r = 0; r <= k; ++r) {
            for (std::uint32_t w = 0; w + r <= k; ++w) {
                double pr = at(cur, r, w);
                if (pr == 0.0) continue;
                double px1 = r == 0 ? 0.0 : static_cast<double>(r) / rem;
                for (int x = 0; x <= 1; ++x) {
                    double px = x ? px1 : 1.0 - px1;
                    if (px <= 0.0) continue;
                    for (int y = 0; y <= 1; ++y) {
                        double py = y ? p : 1.0 - p;
                        std::uint32_t nr = r - static_cast<std::uint32_t>(x);
                        std::uint32_t nw = w + static_cast<std::uint32_t>(y);
                        if (nr + nw > k) continue; // window reached s: a hit
                        at(next, nr, nw) += pr * px * py;
                    }
                }
            }
        }
        cur.swap(next);
    }
    double miss = 0.0;
    for (double v : cur) miss += v;
    return std::clamp(miss, 0.0, 1.0);
}

ScanModel::ScanModel(std::uint64_t window, std::uint32_t pairs, double p_attempt)
    : window_(window), pairs_(pairs), p_(p_attempt) {
    if (pairs_ < 2 || p_ <= 0.0 || p_ >= 1.0 || window_ < pairs_) return;
    q1_ = binomial_cdf(pairs_ - 1, window_, p_);
    if (q1_ <= 0.0) return;
    block_ratio_ = two_block_miss_probability(window_, pairs_, p_) / q1_;
    block_ratio_ = std::clamp(block_ratio_, 0.0, 1.0);
}

double ScanModel::eval(std::uint64_t attempts) const {
    const std::uint64_t m = attempts;
    if (pairs_ == 0) return 1.0;
    if (m < pairs_ || window_ < pairs_) return 0.0;
    if (p_ <= 0.0) return 0.0;
    if (p_ >= 1.0) return 1.0;
    if (pairs_ == 1)
        return -std::expm1(static_cast<double>(m) * std::log1p(-p_));
    if (window_ >= m) return 1.0 - binomial_cdf(pairs_ - 1, m, p_);
    if (q1_ <= 0.0) return 1.0;
    double exponent = static_cast<double>(m - window_) / static_cast<double>(window_);
    double miss = q1_ * std::pow(block_ratio_, exponent);
    return std::clamp(1.0 - miss, 0.0, 1.0);
}

std::optional<std::uint64_t> ScanModel::min_attempts(double target,
                                                     std::uint64_t m_max) const {
    if (m_max == 0) return std::nullopt;
    if (eval(m_max) < target) return std::nullopt;
    std::uint64_t lo = 1, hi = m_max;
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (eval(mid) >= target) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

double packet_success_probability(double rate, double window_s, std::uint32_t pairs,
                                  double pga_duration_s, double attempt_period_s) {
    if (window_s <= 0.0 || attempt_period_s <= 0.0)
        throw std::invalid_argument("window and attempt period must be positive");
    if (window_s > pga_duration_s)
        throw InvalidWindow("packet window exceeds pga duration");
    double p = rate * attempt_period_s;
    if (p > 1.0) throw std::invalid_argument("rate * attempt_period exceeds 1");
    auto m = static_cast<std::uint64_t>(pga_duration_s / attempt_period_s);
    auto u = static_cast<std::uint64_t>(window_s / attempt_period_s);
    u = std::max<std::uint64_t>(u, 1);
    u = std::min(u, m);
    return ScanModel(u, pairs, p).eval(m);
}

std::optional<std::uint32_t> minimal_allocation(double p_packet, std::uint32_t n_inst,
                                                std::uint32_t n_si, double epsilon,
                                                std::uint32_t ceiling) {
    if (n_inst == 0) return 1; // P[X < 0] = 0 for any allocation
    if (p_packet >= 1.0) {
        std::uint64_t l = (n_inst + n_si - 1) / n_si; // successes are deterministic
        l = std::max<std::uint64_t>(l, 1);
        if (l > ceiling) return std::nullopt;
        return static_cast<std::uint32_t>(l);
    }
    if (p_packet <= 0.0) return std::nullopt;

    auto certified = [&](std::uint64_t l) {
        double trials = static_cast<double>(l) * n_si;
        double slack = trials * p_packet - static_cast<double>(n_inst);
        if (slack < 0.0) return false;
        return std::exp(-2.0 * slack * slack / trials) < epsilon;
    };

    if (!certified(ceiling)) return std::nullopt;
    std::uint64_t lo = 1, hi = ceiling;
    while (lo < hi) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (certified(mid)) hi = mid;
        else lo = mid + 1;
    }
    return static_cast<std::uint32_t>(lo);
}

} // namespace qns

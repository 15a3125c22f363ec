#include <doctest.h>

#include "qns/core.hpp"
#include "qns/prob.hpp"

#include <bit>
#include <cmath>
#include <vector>

using namespace qns;

namespace {

// Monte Carlo scan-statistic oracle
double scan_mc(std::uint64_t m, std::uint64_t u, std::uint32_t s, double p,
               std::uint64_t trials, std::uint64_t seed) {
    RngStream rng(seed);
    std::uint64_t hits = 0;
    std::vector<int> x(m);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (std::uint64_t i = 0; i < m; ++i) x[i] = rng.bernoulli(p) ? 1 : 0;
        int count = 0;
        for (std::uint64_t i = 0; i < u; ++i) count += x[i];
        bool hit = count >= static_cast<int>(s);
        for (std::uint64_t i = u; i < m && !hit; ++i) {
            count += x[i] - x[i - u];
            if (count >= static_cast<int>(s)) hit = true;
        }
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

// exact scan probability by Markov embedding over the last u-1 attempts
double scan_exact(std::uint64_t m, std::uint64_t u, std::uint32_t s, double p) {
    if (s == 1) return -std::expm1(static_cast<double>(m) * std::log1p(-p));
    if (u >= m) return 1.0 - binomial_cdf(s - 1, m, p);
    const std::uint64_t nbits = u - 1;
    std::vector<double> state(1ull << nbits, 0.0), next(1ull << nbits, 0.0);
    state[0] = 1.0;
    for (std::uint64_t t = 0; t < nbits; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t bits = 0; bits < state.size(); ++bits) {
            if (state[bits] == 0.0) continue;
            std::size_t shifted = (bits << 1) & (state.size() - 1);
            next[shifted] += state[bits] * (1.0 - p);
            next[shifted | 1] += state[bits] * p;
        }
        state.swap(next);
    }
    double hit = 0.0;
    // prefix windows holding >= s successes are hits before any slide
    for (std::size_t bits = 0; bits < state.size(); ++bits) {
        if (state[bits] == 0.0) continue;
        if (static_cast<std::uint32_t>(std::popcount(bits)) >= s) {
            hit += state[bits];
            state[bits] = 0.0;
        }
    }
    for (std::uint64_t t = nbits; t < m; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t bits = 0; bits < state.size(); ++bits) {
            if (state[bits] == 0.0) continue;
            std::size_t shifted = (bits << 1) & (state.size() - 1);
            next[shifted] += state[bits] * (1.0 - p);
            if (static_cast<std::uint32_t>(std::popcount(bits)) + 1 >= s)
                hit += state[bits] * p;
            else
                next[shifted | 1] += state[bits] * p;
        }
        state.swap(next);
    }
    return hit;
}

} // namespace

TEST_CASE("binomial cdf matches direct evaluation") {
    CHECK(binomial_cdf(2, 5, 0.3) ==
          doctest::Approx(std::pow(0.7, 5) + 5 * 0.3 * std::pow(0.7, 4) +
                          10 * 0.09 * std::pow(0.7, 3)));
    CHECK(binomial_cdf(5, 5, 0.3) == doctest::Approx(1.0));
    CHECK(binomial_tail_below(0, 10, 0.5) == 0.0);
    CHECK(binomial_tail_below(1, 10, 0.5) == doctest::Approx(std::pow(0.5, 10)));
}

TEST_CASE("single pair probability is the exact complement") {
    // m = 10 attempts at p = 0.1
    double p = packet_success_probability(0.1, 1.0, 1, 10.0, 1.0);
    CHECK(p == doctest::Approx(1.0 - std::pow(0.9, 10)).epsilon(1e-12));
    CHECK(p == doctest::Approx(0.6513).epsilon(1e-3));
}

TEST_CASE("fewer attempts than pairs is impossible") {
    CHECK(ScanModel(5, 6, 0.5).eval(3) == 0.0);  // m < s
    CHECK(ScanModel(3, 6, 0.5).eval(20) == 0.0); // window < s
    CHECK(ScanModel(8, 3, 0.5).eval(2) == 0.0);
}

TEST_CASE("pinned example stays within tolerance of the Monte Carlo oracle") {
    // s = 3 pairs, window of 5 attempts, m = 20 attempts, p = 0.3
    ScanModel model(5, 3, 0.3);
    double approx = model.eval(20);
    double mc = scan_mc(20, 5, 3, 0.3, 1000000, 42);
    CHECK(std::abs(approx - mc) < 0.02);
    // frozen value of the pinned approximation
    CHECK(approx == doctest::Approx(0.6786).epsilon(2e-3));
}

TEST_CASE("approximation tracks the exact chain on a small grid") {
    for (std::uint64_t u : {3, 5, 8, 12}) {
        for (std::uint32_t s = 2; s <= u && s <= 9; ++s) {
            for (double p : {0.15, 0.35, 0.55, 0.75}) {
                ScanModel model(u, s, p);
                for (std::uint64_t mult : {2, 4, 8}) {
                    std::uint64_t m = u * mult;
                    double exact = scan_exact(m, u, s, p);
                    CHECK(std::abs(model.eval(m) - exact) < 0.03);
                }
            }
        }
    }
}

TEST_CASE("probability is monotone in attempts, rate and pairs") {
    for (std::uint64_t u : {4, 7, 11}) {
        for (std::uint32_t s = 1; s <= u; ++s) {
            for (double p : {0.1, 0.3, 0.5, 0.8}) {
                ScanModel model(u, s, p);
                double last = -1.0;
                for (std::uint64_t m = u; m < u + 50; ++m) {
                    double v = model.eval(m);
                    CHECK(v >= last - 1e-12);
                    last = v;
                }
            }
        }
    }
    // rate monotonicity through the public seconds-based interface
    for (double w : {2.0, 5.0}) {
        for (std::uint32_t s : {1u, 2u, 4u}) {
            double last = -1.0;
            for (double rate = 0.5; rate <= 8.0; rate += 0.25) {
                double v = packet_success_probability(rate, w, s, 10.0 * w, 0.05 / 1.0);
                CHECK(v >= last - 1e-9);
                last = v;
            }
        }
    }
    // pairs monotonicity
    for (std::uint64_t u : {5, 9}) {
        for (double p : {0.2, 0.5}) {
            double last = 2.0;
            for (std::uint32_t s = 1; s <= u; ++s) {
                double v = ScanModel(u, s, p).eval(4 * u);
                CHECK(v <= last + 1e-12);
                last = v;
            }
        }
    }
}

TEST_CASE("window wider than the block is rejected") {
    CHECK_THROWS_AS(packet_success_probability(1.0, 5.0, 2, 4.0, 0.5), InvalidWindow);
}

TEST_CASE("attempt inversion finds the smallest sufficient count") {
    ScanModel model(6, 2, 0.4);
    auto m = model.min_attempts(0.9, 100000);
    REQUIRE(m.has_value());
    CHECK(model.eval(*m) >= 0.9);
    CHECK(model.eval(*m - 1) < 0.9);
    CHECK(!model.min_attempts(0.999999999, 10).has_value());
}

TEST_CASE("deterministic successes give the floor allocation") {
    auto l = minimal_allocation(1.0, 10, 5, 1e-5);
    REQUIRE(l.has_value());
    CHECK(*l == 2);
}

TEST_CASE("zero required instances give the floor of one") {
    auto l = minimal_allocation(0.5, 0, 10, 1e-5);
    REQUIRE(l.has_value());
    CHECK(*l == 1);
}

TEST_CASE("hoeffding certificate is confirmed by the exact binomial tail") {
    auto l = minimal_allocation(0.5, 10, 10, 0.01);
    REQUIRE(l.has_value());
    CHECK(*l == 4); // (5l-10)^2 > 5l ln(100) first holds at l = 4
    double tail = binomial_tail_below(10, static_cast<std::uint64_t>(*l) * 10, 0.5);
    CHECK(tail < 0.01);

    // the bound is the smallest certified, not merely a certified one
    double trials = static_cast<double>(*l - 1) * 10;
    double slack = trials * 0.5 - 10.0;
    CHECK((slack < 0.0 || std::exp(-2.0 * slack * slack / trials) >= 0.01));
}

TEST_CASE("random allocations always satisfy the exact tail bound") {
    RngStream rng(9);
    int produced = 0;
    while (produced < 200) {
        double p = 0.05 + rng.uniform() * 0.9;
        std::uint32_t n_inst = 1 + static_cast<std::uint32_t>(rng.uniform_int(40));
        std::uint32_t n_si = 1 + static_cast<std::uint32_t>(rng.uniform_int(30));
        double eps = std::pow(10.0, -1.0 - rng.uniform() * 4.0);
        auto l = minimal_allocation(p, n_inst, n_si, eps);
        if (!l) continue;
        ++produced;
        double tail = binomial_tail_below(n_inst, static_cast<std::uint64_t>(*l) * n_si, p);
        CHECK(tail < eps);
    }
}

TEST_CASE("unsatisfiable allocations return nothing") {
    CHECK(!minimal_allocation(1e-9, 1000, 1, 1e-9, 100).has_value());
    CHECK(!minimal_allocation(0.0, 5, 5, 0.1).has_value());
}

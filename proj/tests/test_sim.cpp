#include <doctest.h>

#include "qns/sim.hpp"

#include <cmath>
#include <sstream>

using namespace qns;

namespace {

ScenarioConfig dumbbell_config() {
    ScenarioConfig config;
    config.topology = dumbbell_topology();
    config.applications = default_application_catalog();
    config.t_si_seconds = 1800.0;
    config.horizon_intervals = 40;
    config.epsilon_service = 1e-5;
    config.seeds = {1};
    return config;
}

std::string metrics_without_timings(const RunResult& run) {
    std::ostringstream os;
    for (const auto& m : run.intervals) {
        os << m.interval << '|' << m.active_pgts << '|' << m.submitted << '|'
           << m.registered << '|' << m.accepted << '|' << m.rejected << '|'
           << m.satisfied << '|' << m.expired << '|' << m.pgas_minimal << '|'
           << m.pgas_bonus << '\n';
    }
    return os.str();
}

} // namespace

TEST_CASE("zero fractions assign no sources") {
    ResourceGraph g = dumbbell_topology();
    auto areas = compute_local_areas(g);
    auto paths = enumerate_allowed_paths(g, areas);
    auto [partition, xi] = build_path_partition(paths, g, areas);
    CellFractions none{0.0, 0.0, 0.0};
    auto sources = assign_applications(g, partition, none, default_application_catalog(),
                                       {{"nv", 8.0}}, seconds_to_nanos(1800.0), 1);
    CHECK(sources.empty());
}

TEST_CASE("dumbbell assignment lands near the expected source count") {
    ResourceGraph g = dumbbell_topology();
    auto areas = compute_local_areas(g);
    auto paths = enumerate_allowed_paths(g, areas);
    auto [partition, xi] = build_path_partition(paths, g, areas);
    CellFractions fractions{0.8, 0.1, 0.1};

    double total = 0;
    int runs = 40;
    for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(runs); ++seed) {
        auto sources =
            assign_applications(g, partition, fractions, default_application_catalog(),
                                {{"nv", 8.0}, {"trapped-ion", 2.0}},
                                seconds_to_nanos(1800.0), seed);
        total += static_cast<double>(sources.size());
        for (const auto& s : sources) {
            // reachability oracle: some allowed path joins the pair
            bool found = false;
            for (const Path& p : paths)
                if ((p.src() == std::min(s.src, s.dst)) &&
                    (p.dst() == std::max(s.src, s.dst)))
                    found = true;
            CHECK(found);
            // discoverability rule: not both servers
            CHECK(!(g.discoverable.count(s.src) && g.discoverable.count(s.dst)));
        }
    }
    double mean = total / runs;
    // 30 interface pairs * 0.8 + 25 junction pairs * 0.1 + 50 backbone * 0.1
    // minus the server-server and incompatibility losses
    CHECK(mean > 15.0);
    CHECK(mean < 35.0);
}

TEST_CASE("execution draws follow the two-stage rule") {
    RngStream rng(4);
    SUBCASE("certain success stops at the remaining need") {
        CHECK(execute_schedule_draws(5, 3, 1.0, rng) == 3);
    }
    SUBCASE("zero probability never succeeds") {
        CHECK(execute_schedule_draws(20, 10, 0.0, rng) == 0);
    }
    SUBCASE("binomial moments at count twenty") {
        const int trials = 100000;
        double sum = 0, sum2 = 0;
        for (int i = 0; i < trials; ++i) {
            // remaining larger than count forces the binomial branch
            double v = execute_schedule_draws(20, 100, 0.3, rng);
            sum += v;
            sum2 += v * v;
        }
        double mean = sum / trials;
        double var = sum2 / trials - mean * mean;
        double expect_mean = 20 * 0.3;
        double expect_var = 20 * 0.3 * 0.7;
        // three sigma of the estimator
        CHECK(std::abs(mean - expect_mean) < 3.0 * std::sqrt(expect_var / trials));
        CHECK(std::abs(var - expect_var) <
              3.0 * std::sqrt(2.0 * expect_var * expect_var / trials) + 0.05);
    }
}

TEST_CASE("an empty interval produces a zero metrics delta") {
    ScenarioConfig config = dumbbell_config();
    config.fractions = {0.0, 0.0, 0.0}; // no sources at all
    config.horizon_intervals = 3;
    Simulation sim(config, 1);
    sim.step();
    auto result = sim.take_result();
    REQUIRE(result.intervals.size() == 1);
    const auto& m = result.intervals[0];
    CHECK(m.submitted == 0);
    CHECK(m.accepted == 0);
    CHECK(m.active_pgts == 0);
    CHECK(m.pgas_minimal == 0);
    CHECK(m.pgas_bonus == 0);
}

TEST_CASE("replay with the same seed is identical") {
    ScenarioConfig config = dumbbell_config();
    config.horizon_intervals = 25;
    RunResult a = run_single(config, 7);
    RunResult b = run_single(config, 7);
    CHECK(metrics_without_timings(a) == metrics_without_timings(b));
    REQUIRE(a.demands.size() == b.demands.size());
    for (std::size_t i = 0; i < a.demands.size(); ++i) {
        CHECK(a.demands[i].outcome == b.demands[i].outcome);
        CHECK(a.demands[i].submit_ns == b.demands[i].submit_ns);
        CHECK(a.demands[i].pgt_id == b.demands[i].pgt_id);
    }
    RunResult c = run_single(config, 8);
    CHECK(metrics_without_timings(a) != metrics_without_timings(c));
}

TEST_CASE("short dumbbell run serves demands reliably") {
    ScenarioConfig config = dumbbell_config();
    config.horizon_intervals = 60;
    config.seeds = {1, 2, 3};
    std::vector<RunResult> runs;
    ScenarioSummary summary = run_scenario(config, &runs);

    CHECK(summary.invariant_violations == 0);
    CHECK(summary.total_submitted > 0);
    CHECK(summary.total_accepted > 0);
    CHECK(summary.total_completed > 0);
    CHECK(summary.minimal_service_proportion == doctest::Approx(1.0));
    CHECK(summary.bonus_pga_proportion > 0.0);

    // the pgt population ramps up
    for (const RunResult& run : runs) {
        std::size_t peak = 0;
        for (const auto& m : run.intervals) peak = std::max(peak, m.active_pgts);
        CHECK(peak > 0);
    }

    // accept/reject decisions land in the submission interval (R1)
    for (const RunResult& run : runs) {
        for (const auto& d : run.demands) {
            if (d.accept_ns < 0) continue;
            CHECK(d.accept_ns - d.submit_ns < seconds_to_nanos(config.t_si_seconds));
        }
    }
}

TEST_CASE("satisfied demands terminate and stop consuming the schedule") {
    ScenarioConfig config = dumbbell_config();
    config.horizon_intervals = 50;
    config.seeds = {5};
    std::vector<RunResult> runs;
    run_scenario(config, &runs);
    const RunResult& run = runs[0];

    bool saw_satisfied = false;
    for (const auto& d : run.demands) {
        if (d.outcome == DemandRecord::Outcome::Satisfied) {
            saw_satisfied = true;
            CHECK(d.minimal_service);
            CHECK(d.satisfy_ns <= d.expiry_ns);
            CHECK(d.service_to_expiry > 0.0);
            CHECK(d.service_to_expiry <= 1.0);
        }
    }
    CHECK(saw_satisfied);
}

TEST_CASE("bonus disabled slows service without breaking reliability") {
    ScenarioConfig config = dumbbell_config();
    config.horizon_intervals = 60;
    config.seeds = {1, 2};
    ScenarioSummary with_bonus = run_scenario(config);
    config.bonus_enabled = false;
    ScenarioSummary without_bonus = run_scenario(config);

    CHECK(without_bonus.bonus_pga_proportion == 0.0);
    CHECK(without_bonus.invariant_violations == 0);
    CHECK(without_bonus.minimal_service_proportion == doctest::Approx(1.0));
    if (with_bonus.total_satisfied > 10 && without_bonus.total_satisfied > 10)
        CHECK(without_bonus.mean_service_to_expiry > with_bonus.mean_service_to_expiry);
}

TEST_CASE("scenario config json round trip and validation") {
    ScenarioConfig config = dumbbell_config();
    std::string text = scenario_to_json(config);
    ScenarioConfig back = scenario_from_json(text);
    CHECK(back.t_si_seconds == config.t_si_seconds);
    CHECK(back.applications.size() == config.applications.size());
    CHECK(back.seeds == config.seeds);
    REQUIRE(back.topology.has_value());
    CHECK(back.topology->vertices == config.topology->vertices);

    CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{\"epsilon_service\": 2.0}"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{\"seeds\": []}"), ConfigError);
}

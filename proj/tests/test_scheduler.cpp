#include <doctest.h>

#include "qns/schedule.hpp"
#include "qns/topology.hpp"
#include "qns/validate.hpp"

#include <algorithm>
#include <functional>

using namespace qns;

namespace {

struct World {
    ResourceGraph graph;
    LocalAreaSet areas;
    std::vector<Path> paths;
    PathPartition partition;
    AssociatedResourceMap xi;
    FillingClassSet classes;
};

World make_world(const ResourceGraph& graph) {
    World w;
    w.graph = graph;
    w.areas = compute_local_areas(w.graph);
    w.paths = enumerate_allowed_paths(w.graph, w.areas);
    std::tie(w.partition, w.xi) = build_path_partition(w.paths, w.graph, w.areas);
    w.classes = build_filling_classes(w.partition, w.xi);
    return w;
}

World dumbbell_world() { return make_world(dumbbell_topology()); }

Pgt task_on(const Path& path, PgtId id, double e_s, double minsep_s,
            std::uint32_t alloc) {
    Pgt t;
    t.pgt_id = id;
    t.demand_id = id;
    t.path = path;
    t.pga_duration_ns = seconds_to_nanos(e_s);
    t.minsep_ns = seconds_to_nanos(minsep_s);
    t.min_alloc = alloc;
    t.expiry_ns = seconds_to_nanos(1e9);
    t.packet_success = 0.5;
    return t;
}

Path find_path(const World& w, ComponentId src, ComponentId dst) {
    for (const Path& p : w.paths)
        if ((p.src() == src && p.dst() == dst) || (p.src() == dst && p.dst() == src))
            return p;
    throw std::logic_error("no path in fixture");
}

GammaD gamma_of(DemandId id, std::vector<Pgt> alternatives) {
    GammaD g;
    g.demand_id = id;
    g.alternatives = std::move(alternatives);
    return g;
}

// independent reservation oracle: recompute every resource's availability
// from scratch and check the chain bound directly
Nanos accounting_oracle(const FillingClassSet& classes) {
    std::map<ComponentId, Nanos> reserved;
    for (const auto& [key, fc] : classes.classes) {
        std::vector<Pgt> sorted = fc.tasks;
        std::sort(sorted.begin(), sorted.end(), [](const Pgt& a, const Pgt& b) {
            return std::tie(a.min_alloc, a.pgt_id) < std::tie(b.min_alloc, b.pgt_id);
        });
        Nanos required = calculate_required_time(sorted);
        for (ComponentId r : classes.xi.of(key)) reserved[r] += required;
    }
    Nanos worst = 0;
    for (const auto& [r, amount] : reserved) worst = std::max(worst, amount);
    return worst;
}

std::vector<Pgt> all_tasks(const FillingClassSet& classes) {
    std::vector<Pgt> tasks;
    for (const auto& [key, fc] : classes.classes)
        tasks.insert(tasks.end(), fc.tasks.begin(), fc.tasks.end());
    return tasks;
}

} // namespace

TEST_CASE("admit on empty intake changes nothing") {
    World w = dumbbell_world();
    auto before = all_tasks(w.classes).size();
    auto outcome = admit_tasks({}, w.classes, seconds_to_nanos(1800.0));
    CHECK(outcome.accepted.empty());
    CHECK(outcome.rejected.empty());
    CHECK(all_tasks(w.classes).size() == before);
}

TEST_CASE("single task fitting the interval is accepted") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    // R = l*(E+ms) - ms + E... for one task: (l-1)*(E+ms) + E = 2*31 + 1 = 63 <= 1800
    Pgt t = task_on(p, 1, 1.0, 30.0, 3);
    auto outcome = admit_tasks({gamma_of(1, {t})}, w.classes, seconds_to_nanos(1800.0));
    REQUIRE(outcome.accepted.size() == 1);
    CHECK(outcome.accepted[0].first == 1);
    CHECK(good_accounting_bound(w.classes) == seconds_to_nanos(63.0));
    CHECK(accounting_oracle(w.classes) == seconds_to_nanos(63.0));
}

TEST_CASE("oversized task is rejected outright") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    Pgt t = task_on(p, 1, 100.0, 1000.0, 3); // R = 2*1100 + 100 > 1800
    auto outcome = admit_tasks({gamma_of(1, {t})}, w.classes, seconds_to_nanos(1800.0));
    CHECK(outcome.accepted.empty());
    REQUIRE(outcome.rejected.size() == 1);
    CHECK(all_tasks(w.classes).empty());
}

TEST_CASE("saturated interface falls back to the disjoint alternative") {
    World w = dumbbell_world();
    Path on_i1 = find_path(w, 10, 11);
    Path on_i2 = find_path(w, 15, 16); // end nodes of EGI 2
    // saturate interface 1 close to the interval
    Pgt filler = task_on(on_i1, 1, 100.0, 0.0, 17); // R = 1700
    auto first =
        admit_tasks({gamma_of(1, {filler})}, w.classes, seconds_to_nanos(1800.0));
    REQUIRE(first.accepted.size() == 1);

    // demand with a saturating first alternative and a disjoint second
    Pgt alt1 = task_on(on_i1, 2, 100.0, 0.0, 2); // would push R(I1) to 1900
    Pgt alt2 = task_on(on_i2, 3, 100.0, 0.0, 2);
    auto second =
        admit_tasks({gamma_of(2, {alt1, alt2})}, w.classes, seconds_to_nanos(1800.0));
    REQUIRE(second.accepted.size() == 1);
    CHECK(second.accepted[0].second.pgt_id == 3); // second alternative won
    CHECK(second.accepted[0].second.path == on_i2);

    CHECK(good_accounting_bound(w.classes) <= seconds_to_nanos(1800.0));
    CHECK(accounting_oracle(w.classes) <= seconds_to_nanos(1800.0));
}

TEST_CASE("admission respects reservations of greater classes") {
    World w = dumbbell_world();
    Path cross = find_path(w, 10, 20);  // backbone path through I1
    Path direct = find_path(w, 10, 11); // interface 1 only

    Pgt heavy = task_on(cross, 1, 200.0, 0.0, 8); // R = 1600 on the whole chain
    auto first = admit_tasks({gamma_of(1, {heavy})}, w.classes, seconds_to_nanos(1800.0));
    REQUIRE(first.accepted.size() == 1);

    // interface 1 has only 200 s left; a 300 s demand must be rejected
    Pgt big = task_on(direct, 2, 300.0, 0.0, 1);
    auto second = admit_tasks({gamma_of(2, {big})}, w.classes, seconds_to_nanos(1800.0));
    CHECK(second.rejected.size() == 1);

    // a 150 s demand still fits
    Pgt small = task_on(direct, 3, 150.0, 0.0, 1);
    auto third = admit_tasks({gamma_of(3, {small})}, w.classes, seconds_to_nanos(1800.0));
    CHECK(third.accepted.size() == 1);
    CHECK(good_accounting_bound(w.classes) == seconds_to_nanos(1750.0));
}

TEST_CASE("randomized admission keeps the accounting bound sound") {
    RngStream rng(17);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        World w = make_world(random_topology({2, 2, 14, 0.25}, seed));
        const Nanos t_si = seconds_to_nanos(1800.0);
        PgtId next_id = 1;
        for (int round = 0; round < 8; ++round) {
            std::vector<GammaD> intake;
            for (int d = 0; d < 6; ++d) {
                const Path& p = w.paths[rng.uniform_int(w.paths.size())];
                Pgt t = task_on(p, next_id, 5.0 + rng.uniform() * 120.0,
                                rng.uniform() * 120.0,
                                1 + static_cast<std::uint32_t>(rng.uniform_int(4)));
                intake.push_back(gamma_of(next_id, {t}));
                ++next_id;
            }
            admit_tasks(intake, w.classes, t_si);
            CHECK(good_accounting_bound(w.classes) <= t_si);
            CHECK(accounting_oracle(w.classes) <= t_si);
            CHECK(good_accounting_bound(w.classes) == accounting_oracle(w.classes));
        }
    }
}

TEST_CASE("update keeps classes unchanged without events") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    admit_tasks({gamma_of(1, {task_on(p, 1, 10.0, 5.0, 2)})}, w.classes,
                seconds_to_nanos(1800.0));
    Nanos required_before = w.classes.cached_required({CellKey::Kind::Interface, 1});

    auto outcome = update_filling_classes(w.classes, {}, w.partition, w.xi,
                                          seconds_to_nanos(100.0),
                                          seconds_to_nanos(1800.0));
    CHECK(outcome.removed.empty());
    CHECK(outcome.rehomed.empty());
    CHECK(outcome.classes.active_count() == 1);
    CHECK(outcome.classes.cached_required({CellKey::Kind::Interface, 1}) ==
          required_before);
}

TEST_CASE("expiry boundary removes the task at equality") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    Pgt t = task_on(p, 1, 10.0, 5.0, 2);
    t.expiry_ns = seconds_to_nanos(500.0);
    admit_tasks({gamma_of(1, {t})}, w.classes, seconds_to_nanos(1800.0));

    auto keep = update_filling_classes(w.classes, {}, w.partition, w.xi,
                                       seconds_to_nanos(499.0), seconds_to_nanos(1800.0));
    CHECK(keep.classes.active_count() == 1);
    auto drop = update_filling_classes(w.classes, {}, w.partition, w.xi,
                                       seconds_to_nanos(500.0), seconds_to_nanos(1800.0));
    CHECK(drop.classes.active_count() == 0);
}

TEST_CASE("terminated tasks leave their class") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    admit_tasks({gamma_of(1, {task_on(p, 1, 10.0, 5.0, 2)}),
                 gamma_of(2, {task_on(p, 2, 10.0, 5.0, 2)})},
                w.classes, seconds_to_nanos(1800.0));
    auto outcome = update_filling_classes(w.classes, {1}, w.partition, w.xi, 0,
                                          seconds_to_nanos(1800.0));
    CHECK(outcome.classes.active_count() == 1);
    CHECK(outcome.classes.all_tasks()[0]->pgt_id == 2);
}

TEST_CASE("partition change applies the missing path rule") {
    World w = dumbbell_world();
    Path direct = find_path(w, 10, 11);
    admit_tasks({gamma_of(1, {task_on(direct, 1, 10.0, 5.0, 2)})}, w.classes,
                seconds_to_nanos(1800.0));

    // new partition version without the direct path
    PathPartition pruned = w.partition;
    pruned.version = 2;
    auto& cell = pruned.cells.at({CellKey::Kind::Interface, 1});
    std::erase(cell, direct);
    AssociatedResourceMap xi2 = w.xi;

    SUBCASE("task is removed when no alternative exists") {
        auto outcome = update_filling_classes(w.classes, {}, pruned, xi2, 0,
                                              seconds_to_nanos(1800.0), nullptr);
        CHECK(outcome.classes.active_count() == 0);
        REQUIRE(outcome.removed.size() == 1);
        CHECK(outcome.removed[0].pgt_id == 1);
    }
    SUBCASE("task re-homes onto a surviving feasible path") {
        // pretend the demand can also be served through the junction route
        Path via_junction = find_path(w, 10, 15); // I1-J1-I2 style path
        auto alternatives = [&](const Pgt& orphan) {
            Pgt alt = orphan;
            alt.pgt_id = 99;
            alt.path = via_junction;
            return std::vector<Pgt>{alt};
        };
        auto outcome = update_filling_classes(w.classes, {}, pruned, xi2, 0,
                                              seconds_to_nanos(1800.0), alternatives);
        CHECK(outcome.removed.empty());
        REQUIRE(outcome.rehomed.size() == 1);
        CHECK(outcome.rehomed[0].first == 1);
        CHECK(outcome.classes.active_count() == 1);
        CHECK(outcome.classes.all_tasks()[0]->pgt_id == 99);
    }
}

TEST_CASE("minimal phase starts blocks after the greater classes") {
    World w = dumbbell_world();
    const Nanos t_si = seconds_to_nanos(8000.0);
    Path cross = find_path(w, 10, 20);      // backbone cell
    Path junction = find_path(w, 10, 15);   // junction cell of hub one
    Path direct1 = find_path(w, 10, 11);    // interface 1
    Path direct3 = find_path(w, 20, 21);    // interface 3

    auto outcome = admit_tasks({gamma_of(1, {task_on(cross, 1, 10.0, 0.0, 3)}),
                                gamma_of(2, {task_on(junction, 2, 20.0, 0.0, 2)}),
                                gamma_of(3, {task_on(direct1, 3, 30.0, 0.0, 2)}),
                                gamma_of(4, {task_on(direct3, 4, 40.0, 0.0, 2)})},
                               w.classes, t_si);
    REQUIRE(outcome.accepted.size() == 4);

    NetworkSchedule s = minimal_allocation_phase(w.classes, w.graph, t_si);
    Nanos r_backbone = w.classes.cached_required({CellKey::Kind::Backbone, 0});
    Nanos r_junction = w.classes.cached_required({CellKey::Kind::Junction, 0});
    CHECK(r_backbone == seconds_to_nanos(30.0));
    CHECK(r_junction == seconds_to_nanos(40.0));

    // interface 1 block starts after backbone and its junction cell
    auto first_start_of = [&](PgtId id) {
        for (const auto& [r, list] : s.per_resource)
            for (const Pga& pga : list)
                if (pga.pgt_id == id) return pga.start_ns;
        return Nanos{-1};
    };
    CHECK(first_start_of(1) == 0);
    CHECK(first_start_of(2) == r_backbone);
    CHECK(first_start_of(3) == r_backbone + r_junction);
    // interface 3 (hub two, no junction-cell load) starts right after the
    // backbone block and overlaps interface 1 in time
    CHECK(first_start_of(4) == r_backbone);

    auto report = validate_schedule(s, all_tasks(w.classes), t_si);
    CHECK(report.valid());
    CHECK(report.minimal_allocations_met());
}

TEST_CASE("bonus fills an idle gap and never breaks validity") {
    World w = dumbbell_world();
    const Nanos t_si = seconds_to_nanos(100.0);
    Path p = find_path(w, 10, 11);
    // one task with a large separation leaves gaps inside its cycles
    Pgt gappy = task_on(p, 1, 2.0, 20.0, 3);
    Pgt filler = task_on(p, 2, 2.0, 0.0, 1);
    auto outcome =
        admit_tasks({gamma_of(1, {gappy}), gamma_of(2, {filler})}, w.classes, t_si);
    REQUIRE(outcome.accepted.size() == 2);

    NetworkSchedule s = minimal_allocation_phase(w.classes, w.graph, t_si);
    auto before = validate_schedule(s, all_tasks(w.classes), t_si);
    REQUIRE(before.valid());
    std::uint64_t before_minimal = s.total_minimal();

    bonus_allocation(w.classes, w.graph, s, t_si);
    auto after = validate_schedule(s, all_tasks(w.classes), t_si);
    CHECK(after.valid());
    CHECK(after.minimal_allocations_met());
    CHECK(s.total_bonus() > 0);                 // the gap received PGAs
    CHECK(s.total_minimal() == before_minimal); // counts only increase
    for (const auto& [id, count] : before.pga_counts)
        CHECK(after.pga_counts.at(id) >= count);
}

TEST_CASE("bonus respects minsep across the phase boundary") {
    World w = dumbbell_world();
    const Nanos t_si = seconds_to_nanos(60.0);
    Path p = find_path(w, 10, 11);
    Pgt lone = task_on(p, 1, 2.0, 7.0, 2);
    REQUIRE(admit_tasks({gamma_of(1, {lone})}, w.classes, t_si).accepted.size() == 1);

    NetworkSchedule s = minimal_allocation_phase(w.classes, w.graph, t_si);
    bonus_allocation(w.classes, w.graph, s, t_si);
    auto report = validate_schedule(s, all_tasks(w.classes), t_si);
    CHECK(report.valid());
    CHECK(report.pga_counts.at(1) > 2); // residual interval time got used
}

TEST_CASE("no residual time means no bonus") {
    World w = dumbbell_world();
    Path p = find_path(w, 10, 11);
    // R = (5-1)*10 + 10 = 50 s exactly fills the interval, no gaps
    Pgt dense = task_on(p, 1, 10.0, 0.0, 5);
    const Nanos t_si = seconds_to_nanos(50.0);
    REQUIRE(admit_tasks({gamma_of(1, {dense})}, w.classes, t_si).accepted.size() == 1);
    NetworkSchedule s = minimal_allocation_phase(w.classes, w.graph, t_si);
    bonus_allocation(w.classes, w.graph, s, t_si);
    CHECK(s.total_bonus() == 0);
}

TEST_CASE("schedules are bit-reproducible") {
    World a = dumbbell_world();
    World b = dumbbell_world();
    const Nanos t_si = seconds_to_nanos(300.0);
    for (World* w : {&a, &b}) {
        Path p1 = find_path(*w, 10, 11);
        Path p2 = find_path(*w, 10, 20);
        admit_tasks({gamma_of(1, {task_on(p1, 1, 3.0, 9.0, 2)}),
                     gamma_of(2, {task_on(p2, 2, 5.0, 2.0, 3)})},
                    w->classes, t_si);
    }
    NetworkSchedule sa = minimal_allocation_phase(a.classes, a.graph, t_si);
    NetworkSchedule sb = minimal_allocation_phase(b.classes, b.graph, t_si);
    bonus_allocation(a.classes, a.graph, sa, t_si);
    bonus_allocation(b.classes, b.graph, sb, t_si);
    CHECK(schedule_to_jsonl(sa) == schedule_to_jsonl(sb));
}

TEST_CASE("compile replicates onto end nodes and serializes") {
    World w = dumbbell_world();
    const Nanos t_si = seconds_to_nanos(300.0);
    Path junction_path = find_path(w, 10, 15); // 3 internal resources
    REQUIRE(junction_path.vertices.size() == 5);
    admit_tasks({gamma_of(1, {task_on(junction_path, 1, 3.0, 0.0, 1)})}, w.classes, t_si);
    NetworkSchedule s = minimal_allocation_phase(w.classes, w.graph, t_si);

    CompiledSchedule compiled = compile_schedule(s, w.classes);
    CHECK(compiled.size() == 5); // 3 internal + 2 end nodes
    for (ComponentId v : junction_path.vertices) {
        REQUIRE(compiled.count(v));
        REQUIRE(compiled.at(v).size() == 1);
        CHECK(compiled.at(v)[0].start_ns == 0);
    }

    SUBCASE("empty schedule compiles to empty lists") {
        NetworkSchedule empty;
        CHECK(compile_schedule(empty, w.classes).empty());
    }
    SUBCASE("jsonl round trip") {
        s.interval_index = 12;
        s.version = 4;
        NetworkSchedule back = schedule_from_jsonl(schedule_to_jsonl(s));
        CHECK(back.interval_index == 12);
        CHECK(back.version == 4);
        CHECK(schedule_to_jsonl(back) == schedule_to_jsonl(s));
    }
    SUBCASE("pgt set json round trip") {
        auto tasks = all_tasks(w.classes);
        auto back = pgts_from_json(pgts_to_json(tasks));
        REQUIRE(back.size() == tasks.size());
        CHECK(back[0].pgt_id == tasks[0].pgt_id);
        CHECK(back[0].path == tasks[0].path);
        CHECK(back[0].minsep_ns == tasks[0].minsep_ns);
    }
}

TEST_CASE("validator flags hand-built defects") {
    Path p(std::vector<ComponentId>{10, 1, 11});
    Pgt t = task_on(p, 1, 1.0, 10.0, 1);

    SUBCASE("overlap on a shared resource") {
        NetworkSchedule s;
        s.per_resource[1] = {{1, 1, 0, seconds_to_nanos(2.0)},
                             {2, 2, seconds_to_nanos(1.0), seconds_to_nanos(3.0)}};
        auto report = validate_schedule(s, {}, seconds_to_nanos(10.0));
        CHECK(report.conflicts.size() == 1);
        CHECK(!report.valid());
    }
    SUBCASE("separation one second short") {
        NetworkSchedule s;
        Nanos e = seconds_to_nanos(1.0);
        Nanos gap = seconds_to_nanos(9.0); // needs 10
        s.per_resource[1] = {{1, 1, 0, e}, {1, 1, e + gap, 2 * e + gap}};
        auto report = validate_schedule(s, {t}, seconds_to_nanos(100.0));
        REQUIRE(report.minsep_violations.size() == 1);
        CHECK(report.minsep_violations[0].separation_ns == gap);
    }
    SUBCASE("missing copy breaks alignment") {
        NetworkSchedule s;
        s.per_resource[1] = {{1, 1, 0, seconds_to_nanos(1.0)}};
        Pgt wide = task_on(find_path(dumbbell_world(), 10, 15), 1, 1.0, 0.0, 1);
        auto report = validate_schedule(s, {wide}, seconds_to_nanos(100.0));
        CHECK(!report.alignment_failures.empty());
    }
    SUBCASE("duration overrun") {
        NetworkSchedule s;
        s.per_resource[1] = {{1, 1, 0, seconds_to_nanos(11.0)}};
        auto report = validate_schedule(s, {}, seconds_to_nanos(10.0));
        CHECK(!report.duration_ok);
    }
}

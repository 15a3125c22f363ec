#include "qns/sim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace qns {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point from) {
    return std::chrono::duration<double>(Clock::now() - from).count();
}

std::uint64_t indexed_seed(std::uint64_t master, std::string_view name,
                           std::uint64_t index) {
    return split_seed(split_seed(master, name) ^ (index * 0x9e3779b97f4a7c15ull), name);
}

} // namespace

std::vector<ApplicationSpec> default_application_catalog() {
    // Requirement values are configuration data; these defaults provide a
    // mixed load of key-distribution, computation, and test traffic sized
    // so that admission control is contended at half-hour intervals.
    std::vector<ApplicationSpec> apps;
    apps.push_back({"qkd_e91", 0.80, 8, 8.0, 90.0, 50, 18000.0, 1200.0, 4.0});
    apps.push_back({"bqc_2", 0.84, 3, 3.0, 120.0, 60, 21600.0, 1200.0, 2.0});
    apps.push_back({"bqc_6", 0.85, 6, 6.0, 100.0, 45, 18000.0, 1200.0, 4.0});
    apps.push_back({"bqc_10", 0.85, 8, 10.0, 150.0, 30, 21600.0, 1200.0, 6.0});
    apps.push_back({"teleport", 0.55, 3, 2.0, 60.0, 80, 14400.0, 1200.0, 1.5});
    apps.push_back({"purify_qkd", 0.75, 9, 10.0, 120.0, 40, 18000.0, 1200.0, 6.0});
    return apps;
}

std::vector<DemandSource> assign_applications(const ResourceGraph& graph,
                                              const PathPartition& partition,
                                              const CellFractions& fractions,
                                              const std::vector<ApplicationSpec>& catalog,
                                              const std::vector<PlatformSpec>& platforms,
                                              Nanos t_si_ns, std::uint64_t seed) {
    // classify each connected end-node pair by the cell kind of its paths
    std::map<std::pair<ComponentId, ComponentId>, CellKey::Kind> pair_kind;
    for (const auto& [key, paths] : partition.cells) {
        for (const Path& p : paths) {
            auto id = std::make_pair(p.src(), p.dst());
            auto it = pair_kind.find(id);
            // interface beats junction beats backbone when mixed
            if (it == pair_kind.end() || static_cast<int>(key.kind) > static_cast<int>(it->second))
                pair_kind[id] = key.kind;
        }
    }

    auto platform_of = [&](ComponentId node) -> const PlatformSpec& {
        std::uint64_t h = indexed_seed(seed, "platform", node);
        return platforms[h % platforms.size()];
    };

    RngStream rng = make_stream(seed, "assignment");
    std::vector<DemandSource> sources;
    for (const auto& [pair, kind] : pair_kind) {
        double fraction = kind == CellKey::Kind::Interface ? fractions.interface_pairs
                          : kind == CellKey::Kind::Junction ? fractions.junction_pairs
                                                            : fractions.backbone_pairs;
        double roll = rng.uniform();
        if (roll >= fraction) continue;
        // only demand-submitting pairs: at least one node is not a server
        if (graph.discoverable.count(pair.first) && graph.discoverable.count(pair.second))
            continue;
        double window_cap = std::min(platform_of(pair.first).max_window_s,
                                     platform_of(pair.second).max_window_s);
        std::vector<std::size_t> compatible;
        for (std::size_t i = 0; i < catalog.size(); ++i)
            if (catalog[i].platform_window_floor_s <= window_cap) compatible.push_back(i);
        if (compatible.empty()) continue;
        std::size_t app = compatible[rng.uniform_int(compatible.size())];

        DemandSource source;
        source.app_index = app;
        source.src = pair.first;
        source.dst = pair.second;
        double upper =
            nanos_to_seconds(2 * t_si_ns) + catalog[app].expiry_rel_s; // t_start + expiry
        source.next_submit_ns = seconds_to_nanos(rng.uniform(0.0, upper));
        sources.push_back(source);
    }
    return sources;
}

std::uint32_t execute_schedule_draws(std::uint64_t scheduled_count,
                                     std::uint32_t remaining, double packet_success,
                                     RngStream& rng) {
    if (remaining == 0 || scheduled_count == 0) return 0;
    if (scheduled_count < remaining) {
        // termination impossible this interval: one binomial draw
        std::uint32_t successes = 0;
        for (std::uint64_t i = 0; i < scheduled_count; ++i)
            if (rng.bernoulli(packet_success)) ++successes;
        return successes;
    }
    std::uint32_t successes = 0;
    for (std::uint64_t i = 0; i < scheduled_count; ++i) {
        if (rng.bernoulli(packet_success)) {
            ++successes;
            if (successes == remaining) break; // demand can be terminated
        }
    }
    return successes;
}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed), t_si_ns_(seconds_to_nanos(config.t_si_seconds)),
      exec_rng_(make_stream(seed, "execution")), burst_rng_(make_stream(seed, "burst")) {
    if (config_.applications.empty())
        config_.applications = default_application_catalog();
    if (config_.topology) {
        graph_ = *config_.topology;
    } else if (config_.topology_params) {
        std::uint64_t topo_seed =
            config_.topology_seed ? *config_.topology_seed : split_seed(seed_, "topology");
        graph_ = random_topology(*config_.topology_params, topo_seed);
    } else {
        throw ConfigError("config: topology or topology_params required");
    }
    auto report = validate_graph(graph_);
    if (!report.ok()) throw ConfigError("config: topology fails validation");

    areas_ = compute_local_areas(graph_);
    auto paths = enumerate_allowed_paths(graph_, areas_);
    std::tie(partition_, xi_) = build_path_partition(paths, graph_, areas_);
    partition_.version = 1;
    table_ = generate_capabilities(partition_, graph_, config_.capabilities,
                                   split_seed(seed_, "capabilities"), 1);
    classes_ = build_filling_classes(partition_, xi_);

    sources_ = assign_applications(graph_, partition_, config_.fractions,
                                   config_.applications, config_.platforms, t_si_ns_,
                                   split_seed(seed_, "assignment"));
    for (std::size_t i = 0; i < sources_.size(); ++i)
        source_rngs_.emplace_back(indexed_seed(seed_, "traffic", i));

    result_.seed = seed_;
    result_.source_count = sources_.size();
}

void Simulation::log_event(DemandId id, const std::string& event,
                           const std::string& reason) {
    result_.events.push_back({interval_ * t_si_ns_, id, event, reason});
}

void Simulation::schedule_resubmit(std::size_t source_index, Nanos from_ns) {
    auto& source = sources_[source_index];
    source.active_demand.reset();
    double wait = source_rngs_[source_index].exponential(
        config_.applications[source.app_index].resubmit_mean_s);
    source.next_submit_ns = from_ns + seconds_to_nanos(wait);
}

void Simulation::submit_due_demands() {
    const Nanos now = interval_ * t_si_ns_;
    const Nanos interval_end = now + t_si_ns_;
    const Nanos t_start = (interval_ + 2) * t_si_ns_; // scheduling offset of 2

    if (config_.burst_sources > 0 && interval_ == config_.burst_interval &&
        !sources_.empty()) {
        for (std::uint32_t i = 0; i < config_.burst_sources; ++i) {
            DemandSource clone = sources_[i % sources_.size()];
            clone.active_demand.reset();
            clone.next_submit_ns = now;
            sources_.push_back(clone);
            source_rngs_.emplace_back(indexed_seed(seed_, "burst-traffic", i));
        }
    }

    for (std::size_t i = 0; i < sources_.size(); ++i) {
        auto& source = sources_[i];
        if (source.active_demand || source.next_submit_ns >= interval_end) continue;

        const ApplicationSpec& app = config_.applications[source.app_index];
        Demand demand;
        demand.demand_id = next_demand_id_++;
        demand.packet = {app.window_s, app.pairs, app.min_fidelity};
        demand.minsep_s = app.minsep_s;
        demand.expiry_ns = t_start + seconds_to_nanos(app.expiry_rel_s);
        demand.n_inst = app.n_inst;
        demand.src = source.src;
        demand.dst = source.dst;
        demand.capability_version = table_.version;
        demand.session_id = demand.demand_id;
        demand.service_epsilon =
            app.service_epsilon > 0.0 ? app.service_epsilon : config_.epsilon_service;

        DemandRecord record;
        record.demand_id = demand.demand_id;
        record.source_index = i;
        record.submit_ns = std::max(source.next_submit_ns, now);
        record.start_time_ns = t_start;
        record.expiry_ns = demand.expiry_ns;
        record.n_inst = demand.n_inst;
        record_index_[demand.demand_id] = result_.demands.size();
        result_.demands.push_back(record);
        ++current_.submitted;

        auto registration = register_demand(demand, graph_, table_, t_start, t_si_ns_,
                                            config_.pgt_params, ledger_, next_pgt_id_);
        if (registration.pass) {
            next_pgt_id_ += registration.gamma.alternatives.size();
            source.active_demand = demand.demand_id;
            intake_.push(std::move(registration.gamma));
            ++current_.registered;
            log_event(demand.demand_id, "registered");
        } else {
            result_.demands.back().outcome = DemandRecord::Outcome::FailedRegistration;
            log_event(demand.demand_id, "registration_failed", to_string(registration.reason));
            schedule_resubmit(i, now);
        }
    }
}

void Simulation::run_scheduler() {
    const Nanos now = interval_ * t_si_ns_;

    auto terminated = terminations_.read_and_flush();
    auto t0 = Clock::now();
    auto update = update_filling_classes(classes_, terminated, partition_, xi_, now,
                                         t_si_ns_, nullptr);
    classes_ = std::move(update.classes);
    current_.t_update_s = elapsed_s(t0);
    for (const Pgt& removed : update.removed) {
        auto it = pgt_demand_.find(removed.pgt_id);
        if (it == pgt_demand_.end()) continue;
        DemandId demand = it->second;
        auto& active = active_.at(demand);
        if (!active.done) {
            if (ledger_.status(demand).state == DemandState::Accepted)
                ledger_.transition(demand, DemandState::Active);
            ledger_.transition(demand, DemandState::Removed);
            result_.demands[record_index_.at(demand)].outcome =
                DemandRecord::Outcome::Removed;
            log_event(demand, "removed", "missing_path");
            active.done = true;
            schedule_resubmit(active.source_index, now);
        }
    }

    auto intake = intake_.read_and_flush();
    t0 = Clock::now();
    auto admitted = admit_tasks(intake, classes_, t_si_ns_);
    current_.t_admit_s = elapsed_s(t0);

    for (const auto& [demand_id, pgt] : admitted.accepted) {
        apply_decision(ledger_, demand_id, Decision{true, pgt});
        auto& record = result_.demands[record_index_.at(demand_id)];
        record.accept_ns = now;
        record.pgt_id = pgt.pgt_id;
        record.min_alloc = pgt.min_alloc;

        ActiveDemand active;
        active.demand_id = demand_id;
        active.source_index = record.source_index;
        active.pgt_id = pgt.pgt_id;
        active.packet_success = pgt.packet_success;
        active.remaining = pgt.n_inst;
        active.start_time_ns = pgt.start_time_ns;
        active.expiry_ns = pgt.expiry_ns;
        active_[demand_id] = active;
        pgt_demand_[pgt.pgt_id] = demand_id;
        ++current_.accepted;
        log_event(demand_id, "accepted");
    }
    for (DemandId demand_id : admitted.rejected) {
        apply_decision(ledger_, demand_id, Decision{false, std::nullopt});
        auto& record = result_.demands[record_index_.at(demand_id)];
        record.outcome = DemandRecord::Outcome::Rejected;
        ++current_.rejected;
        log_event(demand_id, "rejected", "scheduler_reject");
        schedule_resubmit(record.source_index, now);
    }

    if (config_.check_invariants) {
        if (good_accounting_bound(classes_) > t_si_ns_) {
            ++current_.invariant_violations;
            ++current_.violations_accounting;
            ++result_.invariant_violations;
        }
    }

    t0 = Clock::now();
    NetworkSchedule schedule = minimal_allocation_phase(classes_, graph_, t_si_ns_);
    schedule.interval_index = interval_ + 2;
    schedule.version = static_cast<std::uint64_t>(interval_ + 1);
    current_.t_minimal_s = elapsed_s(t0);

    t0 = Clock::now();
    if (config_.bonus_enabled) {
        BonusBudget budget;
        budget.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(
                                                 config_.bonus_budget_fraction *
                                                 config_.t_si_seconds));
        bonus_allocation(classes_, graph_, schedule, t_si_ns_, budget);
    }
    current_.t_bonus_s = elapsed_s(t0);

    current_.pgas_minimal += schedule.total_minimal();
    current_.pgas_bonus += schedule.total_bonus();

    auto& record = exec_records_[interval_ + 2];
    for (const auto& [key, fc] : classes_.classes) {
        for (const Pgt& task : fc.tasks) {
            std::uint64_t count = 0;
            auto mit = schedule.minimal_pga_count.find(task.pgt_id);
            if (mit != schedule.minimal_pga_count.end()) count += mit->second;
            auto bit = schedule.bonus_pga_count.find(task.pgt_id);
            if (bit != schedule.bonus_pga_count.end()) count += bit->second;
            if (count > 0)
                record.push_back({task.pgt_id, task.demand_id, task.packet_success, count});
        }
    }

    t0 = Clock::now();
    CompiledSchedule compiled = compile_schedule(schedule, classes_);
    current_.t_compile_s = elapsed_s(t0);
    (void)compiled; // distribution is in-process; execution uses exec_records_

    if (config_.export_schedules && interval_ + 1 == config_.horizon_intervals) {
        result_.last_schedule_jsonl = schedule_to_jsonl(schedule);
        std::vector<Pgt> tasks;
        for (const auto& [key, fc] : classes_.classes)
            tasks.insert(tasks.end(), fc.tasks.begin(), fc.tasks.end());
        result_.last_pgts_json = pgts_to_json(tasks);
    }

    current_.t_total_s = current_.t_update_s + current_.t_admit_s + current_.t_minimal_s +
                         current_.t_bonus_s + current_.t_compile_s;

    if (config_.check_invariants) {
        std::vector<Pgt> tasks;
        for (const auto& [key, fc] : classes_.classes)
            tasks.insert(tasks.end(), fc.tasks.begin(), fc.tasks.end());
        auto report = validate_schedule(schedule, tasks, t_si_ns_);
        if (!report.conflicts.empty() || !report.minsep_violations.empty() ||
            !report.alignment_failures.empty())
            ++current_.violations_schedule;
        if (!report.minimal_allocations_met()) ++current_.violations_counts;
        if (!report.duration_ok) ++current_.violations_duration;
        if (!report.valid() || !report.minimal_allocations_met()) {
            ++current_.invariant_violations;
            ++result_.invariant_violations;
        }
    }
}

void Simulation::execute_interval() {
    const Nanos interval_end = (interval_ + 1) * t_si_ns_;

    auto rec = exec_records_.find(interval_);
    if (rec != exec_records_.end()) {
        for (const auto& entry : rec->second) {
            auto it = active_.find(entry.demand_id);
            if (it == active_.end()) continue;
            ActiveDemand& active = it->second;
            if (active.done || active.remaining == 0) continue;

            if (ledger_.status(entry.demand_id).state == DemandState::Accepted)
                ledger_.transition(entry.demand_id, DemandState::Active);

            std::uint32_t successes = execute_schedule_draws(
                entry.count, active.remaining, entry.packet_success, exec_rng_);
            active.remaining -= std::min(successes, active.remaining);

            if (active.remaining == 0) {
                active.done = true;
                ledger_.transition(entry.demand_id, DemandState::Satisfied);
                terminations_.push(active.pgt_id);
                auto& record = result_.demands[record_index_.at(entry.demand_id)];
                record.outcome = DemandRecord::Outcome::Satisfied;
                record.minimal_service = true;
                record.satisfy_ns = interval_end;
                double horizon =
                    static_cast<double>(active.expiry_ns - active.start_time_ns);
                if (horizon > 0)
                    record.service_to_expiry =
                        static_cast<double>(interval_end - active.start_time_ns) / horizon;
                ++current_.satisfied;
                log_event(entry.demand_id, "satisfied");
                schedule_resubmit(active.source_index, interval_end);
            }
        }
        exec_records_.erase(exec_records_.begin(), std::next(rec));
    }

    std::vector<DemandId> finished;
    for (auto& [demand_id, active] : active_) {
        if (active.done) {
            finished.push_back(demand_id);
            continue;
        }
        if (active.expiry_ns <= interval_end) {
            active.done = true;
            if (ledger_.status(demand_id).state == DemandState::Accepted)
                ledger_.transition(demand_id, DemandState::Active);
            ledger_.transition(demand_id, DemandState::Expired);
            auto& record = result_.demands[record_index_.at(demand_id)];
            record.outcome = DemandRecord::Outcome::Expired;
            record.minimal_service = false;
            ++current_.expired;
            log_event(demand_id, "expired");
            schedule_resubmit(active.source_index, interval_end);
            finished.push_back(demand_id);
        }
    }
    for (DemandId id : finished) {
        auto it = active_.find(id);
        if (it != active_.end() && it->second.done) {
            pgt_demand_.erase(it->second.pgt_id);
            active_.erase(it);
        }
    }
}

void Simulation::step() {
    current_ = IntervalMetrics{};
    current_.interval = interval_;
    current_.seed = seed_;

    submit_due_demands();
    run_scheduler();
    execute_interval();

    current_.active_pgts = classes_.active_count();
    result_.intervals.push_back(current_);
    ++interval_;
}

RunResult Simulation::take_result() { return std::move(result_); }

RunResult run_single(const ScenarioConfig& config, std::uint64_t seed) {
    Simulation sim(config, seed);
    for (std::int64_t i = 0; i < config.horizon_intervals; ++i) sim.step();
    return sim.take_result();
}

ScenarioSummary summarize(const std::vector<RunResult>& runs) {
    ScenarioSummary s;
    std::uint64_t pgas_minimal = 0, pgas_bonus = 0;
    double sum_ste = 0.0;
    std::uint64_t n_intervals = 0;
    double sum_compute = 0.0;
    for (const RunResult& run : runs) {
        s.mean_sources += static_cast<double>(run.source_count);
        s.invariant_violations += run.invariant_violations;
        for (const auto& m : run.intervals) {
            s.total_submitted += m.submitted;
            s.total_registered += m.registered;
            s.total_accepted += m.accepted;
            pgas_minimal += m.pgas_minimal;
            pgas_bonus += m.pgas_bonus;
            sum_compute += m.t_total_s;
            s.max_interval_compute_s = std::max(s.max_interval_compute_s, m.t_total_s);
            s.violations_accounting += m.violations_accounting;
            s.violations_schedule += m.violations_schedule;
            s.violations_counts += m.violations_counts;
            s.violations_duration += m.violations_duration;
            ++n_intervals;
        }
        for (const auto& d : run.demands) {
            if (d.outcome == DemandRecord::Outcome::Satisfied) {
                ++s.total_satisfied;
                ++s.total_completed;
                sum_ste += d.service_to_expiry;
            } else if (d.outcome == DemandRecord::Outcome::Expired) {
                ++s.total_completed;
            }
        }
    }
    if (!runs.empty()) s.mean_sources /= static_cast<double>(runs.size());
    if (s.total_completed > 0)
        s.minimal_service_proportion =
            static_cast<double>(s.total_satisfied) / static_cast<double>(s.total_completed);
    if (s.total_submitted > 0) {
        s.acceptance_proportion =
            static_cast<double>(s.total_accepted) / static_cast<double>(s.total_submitted);
        s.registration_proportion =
            static_cast<double>(s.total_registered) / static_cast<double>(s.total_submitted);
    }
    if (s.total_satisfied > 0)
        s.mean_service_to_expiry = sum_ste / static_cast<double>(s.total_satisfied);
    if (pgas_minimal + pgas_bonus > 0)
        s.bonus_pga_proportion = static_cast<double>(pgas_bonus) /
                                 static_cast<double>(pgas_minimal + pgas_bonus);
    if (n_intervals > 0)
        s.mean_interval_compute_s = sum_compute / static_cast<double>(n_intervals);
    return s;
}

ScenarioSummary run_scenario(const ScenarioConfig& config,
                             std::vector<RunResult>* runs_out, unsigned jobs) {
    std::vector<RunResult> runs(config.seeds.size());
    if (jobs <= 1 || config.seeds.size() <= 1) {
        for (std::size_t i = 0; i < config.seeds.size(); ++i)
            runs[i] = run_single(config, config.seeds[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= config.seeds.size()) return;
                runs[i] = run_single(config, config.seeds[i]);
            }
        };
        std::vector<std::thread> pool;
        unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(config.seeds.size()));
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    ScenarioSummary summary = summarize(runs);
    if (runs_out) *runs_out = std::move(runs);
    return summary;
}

std::string metrics_to_csv(const std::vector<RunResult>& runs) {
    std::ostringstream os;
    os << "seed,interval,active_pgts,submitted,registered,accepted,rejected,"
          "satisfied,expired,pgas_minimal,pgas_bonus,t_update_s,t_admit_s,"
          "t_minimal_s,t_bonus_s,t_compile_s,t_total_s,invariant_violations\n";
    for (const RunResult& run : runs) {
        for (const auto& m : run.intervals) {
            os << m.seed << ',' << m.interval << ',' << m.active_pgts << ','
               << m.submitted << ',' << m.registered << ',' << m.accepted << ','
               << m.rejected << ',' << m.satisfied << ',' << m.expired << ','
               << m.pgas_minimal << ',' << m.pgas_bonus << ',' << m.t_update_s << ','
               << m.t_admit_s << ',' << m.t_minimal_s << ',' << m.t_bonus_s << ','
               << m.t_compile_s << ',' << m.t_total_s << ',' << m.invariant_violations
               << '\n';
        }
    }
    return os.str();
}

std::string summary_to_json(const ScenarioSummary& s) {
    nlohmann::json j;
    j["minimal_service_proportion"] = s.minimal_service_proportion;
    j["acceptance_proportion"] = s.acceptance_proportion;
    j["registration_proportion"] = s.registration_proportion;
    j["mean_service_to_expiry"] = s.mean_service_to_expiry;
    j["bonus_pga_proportion"] = s.bonus_pga_proportion;
    j["total_submitted"] = s.total_submitted;
    j["total_registered"] = s.total_registered;
    j["total_accepted"] = s.total_accepted;
    j["total_completed"] = s.total_completed;
    j["total_satisfied"] = s.total_satisfied;
    j["invariant_violations"] = s.invariant_violations;
    j["violations_accounting"] = s.violations_accounting;
    j["violations_schedule"] = s.violations_schedule;
    j["violations_counts"] = s.violations_counts;
    j["violations_duration"] = s.violations_duration;
    j["mean_interval_compute_s"] = s.mean_interval_compute_s;
    j["max_interval_compute_s"] = s.max_interval_compute_s;
    j["mean_sources"] = s.mean_sources;
    return j.dump(2);
}

std::string events_to_jsonl(const std::vector<RunResult>& runs) {
    std::ostringstream os;
    for (const RunResult& run : runs) {
        for (const EventRecord& e : run.events) {
            nlohmann::json j;
            j["t"] = nanos_to_seconds(e.t_ns);
            j["seed"] = run.seed;
            j["demand_id"] = e.demand_id;
            j["event"] = e.event;
            if (!e.reason.empty()) j["reason"] = e.reason;
            os << j.dump() << '\n';
        }
    }
    return os.str();
}

namespace {

void parse_capabilities(const nlohmann::json& j, CapabilityModel& m) {
    m.base_rate_mean = j.value("base_rate_mean", m.base_rate_mean);
    m.base_rate_std = j.value("base_rate_std", m.base_rate_std);
    m.base_fid_mean = j.value("base_fid_mean", m.base_fid_mean);
    m.base_fid_std = j.value("base_fid_std", m.base_fid_std);
    m.per_hop_rate_factor = j.value("per_hop_rate_factor", m.per_hop_rate_factor);
    m.per_backbone_rate_factor =
        j.value("per_backbone_rate_factor", m.per_backbone_rate_factor);
    m.per_hop_fid_penalty = j.value("per_hop_fid_penalty", m.per_hop_fid_penalty);
    m.per_backbone_fid_penalty =
        j.value("per_backbone_fid_penalty", m.per_backbone_fid_penalty);
}

} // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid json: ") + e.what());
    }
    ScenarioConfig c;
    try {
        if (j.contains("topology_file")) {
            std::ifstream in(j.at("topology_file").get<std::string>());
            if (!in)
                throw ConfigError("config: topology_file: cannot open " +
                                  j.at("topology_file").get<std::string>());
            std::stringstream ss;
            ss << in.rdbuf();
            c.topology = graph_from_json(ss.str());
        } else if (j.contains("topology")) {
            c.topology = graph_from_json(j.at("topology").dump());
        }
        if (j.contains("topology_params")) {
            const auto& p = j.at("topology_params");
            TopologyParams params;
            params.backbones = p.value("backbones", params.backbones);
            params.local_areas = p.value("local_areas", params.local_areas);
            params.end_nodes = p.value("end_nodes", params.end_nodes);
            params.discoverable_fraction =
                p.value("discoverable_fraction", params.discoverable_fraction);
            c.topology_params = params;
        }
        if (j.contains("topology_seed")) c.topology_seed = j.at("topology_seed").get<std::uint64_t>();
        if (j.contains("capabilities")) parse_capabilities(j.at("capabilities"), c.capabilities);
        if (j.contains("applications")) {
            for (const auto& a : j.at("applications")) {
                ApplicationSpec app;
                app.name = a.value("name", std::string("app"));
                app.min_fidelity = a.value("min_fidelity", app.min_fidelity);
                app.pairs = a.value("pairs", app.pairs);
                app.window_s = a.value("window_s", app.window_s);
                app.minsep_s = a.value("minsep_s", app.minsep_s);
                app.n_inst = a.value("n_inst", app.n_inst);
                app.expiry_rel_s = a.value("expiry_rel_s", app.expiry_rel_s);
                app.resubmit_mean_s = a.value("resubmit_mean_s", app.resubmit_mean_s);
                app.platform_window_floor_s =
                    a.value("platform_window_floor_s", app.window_s);
                app.service_epsilon = a.value("service_epsilon", 0.0);
                c.applications.push_back(app);
            }
        }
        if (j.contains("platforms")) {
            c.platforms.clear();
            for (const auto& p : j.at("platforms"))
                c.platforms.push_back(
                    {p.value("name", std::string("platform")), p.value("max_window_s", 5.0)});
        }
        if (j.contains("fractions")) {
            const auto& f = j.at("fractions");
            c.fractions.interface_pairs = f.value("interface", c.fractions.interface_pairs);
            c.fractions.junction_pairs = f.value("junction", c.fractions.junction_pairs);
            c.fractions.backbone_pairs = f.value("backbone", c.fractions.backbone_pairs);
        }
        c.epsilon_service = j.value("epsilon_service", c.epsilon_service);
        c.t_si_seconds = j.value("T_SI_seconds", c.t_si_seconds);
        c.horizon_intervals = j.value("horizon_intervals", c.horizon_intervals);
        c.bonus_enabled = j.value("bonus_enabled", c.bonus_enabled);
        if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        c.check_invariants = j.value("check_invariants", c.check_invariants);
        c.bonus_budget_fraction = j.value("bonus_budget_fraction", c.bonus_budget_fraction);
        c.export_schedules = j.value("export_schedules", c.export_schedules);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (c.epsilon_service <= 0.0 || c.epsilon_service >= 1.0)
        throw ConfigError("config: epsilon_service must be in (0,1)");
    if (c.t_si_seconds <= 0.0) throw ConfigError("config: T_SI_seconds must be positive");
    if (c.horizon_intervals <= 0)
        throw ConfigError("config: horizon_intervals must be positive");
    if (c.seeds.empty()) throw ConfigError("config: seeds must not be empty");
    return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
    nlohmann::json j;
    if (c.topology) j["topology"] = nlohmann::json::parse(graph_to_json(*c.topology));
    if (c.topology_params) {
        j["topology_params"] = {{"backbones", c.topology_params->backbones},
                                {"local_areas", c.topology_params->local_areas},
                                {"end_nodes", c.topology_params->end_nodes},
                                {"discoverable_fraction",
                                 c.topology_params->discoverable_fraction}};
    }
    if (c.topology_seed) j["topology_seed"] = *c.topology_seed;
    j["capabilities"] = {{"base_rate_mean", c.capabilities.base_rate_mean},
                         {"base_rate_std", c.capabilities.base_rate_std},
                         {"base_fid_mean", c.capabilities.base_fid_mean},
                         {"base_fid_std", c.capabilities.base_fid_std},
                         {"per_hop_rate_factor", c.capabilities.per_hop_rate_factor},
                         {"per_backbone_rate_factor", c.capabilities.per_backbone_rate_factor},
                         {"per_hop_fid_penalty", c.capabilities.per_hop_fid_penalty},
                         {"per_backbone_fid_penalty", c.capabilities.per_backbone_fid_penalty}};
    j["applications"] = nlohmann::json::array();
    for (const auto& a : c.applications) {
        j["applications"].push_back({{"name", a.name},
                                     {"min_fidelity", a.min_fidelity},
                                     {"pairs", a.pairs},
                                     {"window_s", a.window_s},
                                     {"minsep_s", a.minsep_s},
                                     {"n_inst", a.n_inst},
                                     {"expiry_rel_s", a.expiry_rel_s},
                                     {"resubmit_mean_s", a.resubmit_mean_s},
                                     {"platform_window_floor_s", a.platform_window_floor_s}});
    }
    j["platforms"] = nlohmann::json::array();
    for (const auto& p : c.platforms)
        j["platforms"].push_back({{"name", p.name}, {"max_window_s", p.max_window_s}});
    j["fractions"] = {{"interface", c.fractions.interface_pairs},
                      {"junction", c.fractions.junction_pairs},
                      {"backbone", c.fractions.backbone_pairs}};
    j["epsilon_service"] = c.epsilon_service;
    j["T_SI_seconds"] = c.t_si_seconds;
    j["horizon_intervals"] = c.horizon_intervals;
    j["bonus_enabled"] = c.bonus_enabled;
    j["seeds"] = c.seeds;
    j["check_invariants"] = c.check_invariants;
    j["bonus_budget_fraction"] = c.bonus_budget_fraction;
    return j.dump(2);
}

} // namespace qns

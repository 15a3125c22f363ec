#pragma once

#include "qns/schedule.hpp"
#include "qns/topology.hpp"
#include "qns/validate.hpp"

namespace qns {

struct ApplicationSpec {
    std::string name;
    double min_fidelity = 0.8;
    std::uint32_t pairs = 2;
    double window_s = 5.0;
    double minsep_s = 10.0;
    std::uint32_t n_inst = 10;
    double expiry_rel_s = 3600.0;
    double resubmit_mean_s = 1800.0;
    double platform_window_floor_s = 5.0; // minimum supported memory window
    double service_epsilon = 0.0;         // 0 = use the controller-wide value
};

struct PlatformSpec {
    std::string name;
    double max_window_s = 5.0;
};

struct CellFractions {
    double interface_pairs = 0.8;
    double junction_pairs = 0.1;
    double backbone_pairs = 0.1;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    std::optional<ResourceGraph> topology;       // wins over topology_params
    std::optional<TopologyParams> topology_params;
    std::optional<std::uint64_t> topology_seed;  // default: split from run seed
    CapabilityModel capabilities;
    std::vector<ApplicationSpec> applications;
    std::vector<PlatformSpec> platforms = {{"nv", 8.0}, {"trapped-ion", 2.0}};
    CellFractions fractions;
    double epsilon_service = 1e-5;
    double t_si_seconds = 1800.0;
    std::int64_t horizon_intervals = 200;
    bool bonus_enabled = true;
    std::vector<std::uint64_t> seeds = {1};
    PgtCreationParams pgt_params;
    bool check_invariants = true;
    double bonus_budget_fraction = 0.8; // of T_SI, wall-clock seconds
    bool export_schedules = false; // keep the final interval's schedule
    // test hook: clone this many extra demand sources at the given interval
    std::int64_t burst_interval = -1;
    std::uint32_t burst_sources = 0;
};

ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& config);
std::vector<ApplicationSpec> default_application_catalog();

struct DemandSource {
    std::size_t app_index = 0;
    ComponentId src = 0;
    ComponentId dst = 0;
    Nanos next_submit_ns = 0;
    std::optional<DemandId> active_demand;
};

// Samples end-node pairs per partition cell kind, assigns a compatible
// application to each sampled pair (discoverability and platform window
// rules applied), and draws initial submission times.
std::vector<DemandSource> assign_applications(const ResourceGraph& graph,
                                              const PathPartition& partition,
                                              const CellFractions& fractions,
                                              const std::vector<ApplicationSpec>& catalog,
                                              const std::vector<PlatformSpec>& platforms,
                                              Nanos t_si_ns, std::uint64_t seed);

// Mocked execution of one interval of one task's PGAs: when the scheduled
// count cannot finish the demand, one Binomial draw; otherwise Bernoulli per
// PGA, stopping at the success that completes the demand.
std::uint32_t execute_schedule_draws(std::uint64_t scheduled_count,
                                     std::uint32_t remaining, double packet_success,
                                     RngStream& rng);

struct IntervalMetrics {
    std::int64_t interval = 0;
    std::uint64_t seed = 0;
    std::size_t active_pgts = 0;
    std::uint32_t submitted = 0;
    std::uint32_t registered = 0;
    std::uint32_t accepted = 0;
    std::uint32_t rejected = 0;
    std::uint64_t pgas_minimal = 0;
    std::uint64_t pgas_bonus = 0;
    double t_update_s = 0, t_admit_s = 0, t_minimal_s = 0, t_bonus_s = 0,
           t_compile_s = 0, t_total_s = 0;
    std::uint32_t satisfied = 0;
    std::uint32_t expired = 0;
    std::uint32_t invariant_violations = 0;
    std::uint32_t violations_accounting = 0;
    std::uint32_t violations_schedule = 0;
    std::uint32_t violations_counts = 0;
    std::uint32_t violations_duration = 0;
};

struct DemandRecord {
    DemandId demand_id = 0;
    std::size_t source_index = 0;
    Nanos submit_ns = 0;
    Nanos accept_ns = -1;
    Nanos satisfy_ns = -1;
    Nanos start_time_ns = 0;
    Nanos expiry_ns = 0;
    PgtId pgt_id = 0;
    std::uint32_t min_alloc = 0;
    std::uint32_t n_inst = 0;
    enum class Outcome { Pending, Satisfied, Expired, Rejected, FailedRegistration, Removed };
    Outcome outcome = Outcome::Pending;
    bool minimal_service = false;
    double service_to_expiry = 0.0; // fraction of the service horizon used
};

struct EventRecord {
    Nanos t_ns = 0;
    DemandId demand_id = 0;
    std::string event;
    std::string reason;
};

struct RunResult {
    std::uint64_t seed = 0;
    std::size_t source_count = 0;
    std::string last_schedule_jsonl; // filled when export_schedules is set
    std::string last_pgts_json;
    std::vector<IntervalMetrics> intervals;
    std::vector<DemandRecord> demands;
    std::vector<EventRecord> events;
    std::uint64_t invariant_violations = 0;
};

struct ScenarioSummary {
    double minimal_service_proportion = 0; // among accepted demands that completed
    double acceptance_proportion = 0;      // accepted / submitted
    double registration_proportion = 0;    // registered / submitted
    double mean_service_to_expiry = 0;
    double bonus_pga_proportion = 0;
    std::uint64_t total_submitted = 0;
    std::uint64_t total_registered = 0;
    std::uint64_t total_accepted = 0;
    std::uint64_t total_completed = 0; // accepted demands that expired or terminated
    std::uint64_t total_satisfied = 0;
    std::uint64_t invariant_violations = 0;
    std::uint64_t violations_accounting = 0;
    std::uint64_t violations_schedule = 0;
    std::uint64_t violations_counts = 0;
    std::uint64_t violations_duration = 0;
    double mean_interval_compute_s = 0;
    double max_interval_compute_s = 0;
    double mean_sources = 0;
};

// Full controller + traffic state for one seeded run.
class Simulation {
public:
    Simulation(const ScenarioConfig& config, std::uint64_t seed);

    void step(); // one scheduling interval
    RunResult take_result();

    std::int64_t interval() const { return interval_; }
    const FillingClassSet& classes() const { return classes_; }
    const ResourceGraph& graph() const { return graph_; }

private:
    struct ActiveDemand {
        DemandId demand_id = 0;
        std::size_t source_index = 0;
        PgtId pgt_id = 0;
        double packet_success = 0;
        std::uint32_t remaining = 0;
        Nanos start_time_ns = 0;
        Nanos expiry_ns = 0;
        bool done = false;
    };
    struct ExecRecordEntry {
        PgtId pgt_id;
        DemandId demand_id;
        double packet_success;
        std::uint64_t count;
    };

    void submit_due_demands();
    void run_scheduler();
    void execute_interval();
    void schedule_resubmit(std::size_t source_index, Nanos from_ns);
    void log_event(DemandId id, const std::string& event, const std::string& reason = {});

    ScenarioConfig config_;
    std::uint64_t seed_;
    Nanos t_si_ns_;
    std::int64_t interval_ = 0;

    ResourceGraph graph_;
    LocalAreaSet areas_;
    PathPartition partition_;
    AssociatedResourceMap xi_;
    CapabilitiesTable table_;
    FillingClassSet classes_;

    DemandLedger ledger_;
    TaskIntakeBuffer intake_;
    TerminationBuffer terminations_;

    std::vector<DemandSource> sources_;
    std::vector<RngStream> source_rngs_;
    RngStream exec_rng_;
    RngStream burst_rng_;

    std::map<DemandId, ActiveDemand> active_;
    std::map<PgtId, DemandId> pgt_demand_;
    std::map<std::int64_t, std::vector<ExecRecordEntry>> exec_records_;
    std::map<DemandId, std::size_t> record_index_;

    DemandId next_demand_id_ = 1;
    PgtId next_pgt_id_ = 1;
    IntervalMetrics current_;
    RunResult result_;
};

RunResult run_single(const ScenarioConfig& config, std::uint64_t seed);
ScenarioSummary summarize(const std::vector<RunResult>& runs);
ScenarioSummary run_scenario(const ScenarioConfig& config,
                             std::vector<RunResult>* runs_out = nullptr,
                             unsigned jobs = 1);

std::string metrics_to_csv(const std::vector<RunResult>& runs);
std::string summary_to_json(const ScenarioSummary& summary);
std::string events_to_jsonl(const std::vector<RunResult>& runs);

} // namespace qns

#pragma once

#include "qns/filling.hpp"

#include <chrono>

namespace qns {

struct Pga {
    PgtId pgt_id = 0;
    DemandId demand_id = 0;
    Nanos start_ns = 0;
    Nanos end_ns = 0;
};

// Aligned per-resource schedules: a PGA appears on every internal resource
// of its task's path with identical start and end. Lists stay sorted by
// start time and free of overlaps.
struct NetworkSchedule {
    std::map<ComponentId, std::vector<Pga>> per_resource;
    std::int64_t interval_index = 0;
    std::uint64_t version = 0;

    // counts per pgt, split by phase, maintained by the builders
    std::map<PgtId, std::uint64_t> minimal_pga_count;
    std::map<PgtId, std::uint64_t> bonus_pga_count;

    Nanos max_end() const;
    std::uint64_t total_minimal() const;
    std::uint64_t total_bonus() const;
};

// Appends the cycle-structured block for one class starting at t0: the m-th
// drop-out stage runs n_m back-to-back cycles of duration c_m, followed by
// one final PGA of the dropping task.
void direct_allocation(const FillingClass& fc, const ResourceGraph& graph,
                       NetworkSchedule& schedule, Nanos t0);

// Minimal phase over all classes: each class block starts after the summed
// required times of all strictly greater classes.
NetworkSchedule minimal_allocation_phase(const FillingClassSet& classes,
                                         const ResourceGraph& graph, Nanos t_si_ns);

struct BonusBudget {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    bool expired() const {
        return deadline && std::chrono::steady_clock::now() >= *deadline;
    }
};

// Round-robin gap filling for one class. Candidate start times are PGA end
// times and pending release times; a PGA is added when the whole path is
// free, no minsep violation arises, and it completes strictly before T_SI.
// Cutting off at the wall-clock deadline never invalidates the schedule.
void round_robin_bonus(const FillingClass& fc, const ResourceGraph& graph,
                       NetworkSchedule& schedule, Nanos t_si_ns,
                       const BonusBudget& budget = {});

// Bonus phase over all classes in the minimal-phase order.
void bonus_allocation(const FillingClassSet& classes, const ResourceGraph& graph,
                      NetworkSchedule& schedule, Nanos t_si_ns,
                      const BonusBudget& budget = {});

// Flat transmissible per-component records, including end nodes on paths.
struct CompiledEntry {
    PgtId pgt_id = 0;
    DemandId demand_id = 0;
    Nanos start_ns = 0;
    Nanos end_ns = 0;
};

using CompiledSchedule = std::map<ComponentId, std::vector<CompiledEntry>>;

CompiledSchedule compile_schedule(const NetworkSchedule& schedule,
                                  const FillingClassSet& classes);

// Store of compiled schedules keyed by interval index.
class ScheduleStore {
public:
    void put(std::int64_t interval, std::uint64_t version, CompiledSchedule compiled);
    const CompiledSchedule* get(std::int64_t interval) const;
    std::optional<std::uint64_t> version_of(std::int64_t interval) const;
    void drop_before(std::int64_t interval);

private:
    struct Entry {
        std::uint64_t version;
        CompiledSchedule compiled;
    };
    std::map<std::int64_t, Entry> entries_;
};

// JSON lines export: one object per component
//   {"component_id":..,"interval":..,"version":..,
//    "pgas":[{"pgt":..,"demand":..,"start_ns":..,"end_ns":..},...]}
std::string schedule_to_jsonl(const NetworkSchedule& schedule);
NetworkSchedule schedule_from_jsonl(const std::string& text);

std::string pgts_to_json(const std::vector<Pgt>& pgts);
std::vector<Pgt> pgts_from_json(const std::string& text);

} // namespace qns

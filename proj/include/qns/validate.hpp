#pragma once

#include "qns/schedule.hpp"

namespace qns {

struct ScheduleConflict {
    ComponentId resource;
    Pga first;
    Pga second;
};

struct MinsepViolation {
    PgtId pgt_id;
    Pga earlier;
    Pga later;
    Nanos separation_ns;
    Nanos required_ns;
};

struct ScheduleReport {
    std::vector<ScheduleConflict> conflicts;
    std::vector<MinsepViolation> minsep_violations;
    std::vector<PgtId> alignment_failures;       // missing copies on path resources
    std::map<PgtId, std::uint64_t> pga_counts;   // one count per task, not per copy
    std::vector<PgtId> under_allocated;          // count below min_alloc
    Nanos max_end_ns = 0;
    bool duration_ok = true;

    bool valid() const {
        return conflicts.empty() && minsep_violations.empty() &&
               alignment_failures.empty() && duration_ok;
    }
    bool minimal_allocations_met() const { return under_allocated.empty(); }
};

// Independent checker: rebuilds every verdict from the raw per-resource
// lists without reusing any scheduler bookkeeping. Reports resource
// conflicts, minsep violations, per-task PGA counts versus min_alloc,
// alignment completeness, and the schedule duration versus T_SI.
ScheduleReport validate_schedule(const NetworkSchedule& schedule,
                                 const std::vector<Pgt>& tasks, Nanos t_si_ns);

} // namespace qns
